// Nominal tracking control: LQR position loop, force synthesis, desired attitude
// composition and the quaternion attitude loop.
#pragma once

#include <stdexcept>

#include "safeyaw/dynamics.hpp"
#include "safeyaw/math.hpp"

namespace safeyaw {

struct PositionReference {
    Vec3 r_d;
    Vec3 v_d;
    Vec3 a_d;
};

/// Per-axis gains of the decoupled double-integrator LQR. The full K_lqr is
/// [kp I, kv I] acting on [r_d - r; v_d - v].
struct LqrGain {
    double kp = 0.0;
    double kv = 0.0;
};

struct AttitudeGains {
    double k_q = 400.0;
    double k_omega = 40.0;
};

class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Continuous-time LQR for x'' = u with cost q_pos x^2 + q_vel x'^2 + r u^2.
LqrGain lqr_synthesize(double q_pos_weight, double q_vel_weight, double r_weight);

/// Desired virtual acceleration mu_d.
Vec3 position_control(const UavState& s, const PositionReference& ref, const LqrGain& k);

/// f_d = m (mu - g).
inline Vec3 force_from_mu(const Vec3& mu, double mass) { return mass * (mu - kGravity); }

/// Thrown when the desired force is too small to define a thrust axis.
class DegenerateThrust : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Attitude whose body z is along f_d and whose heading equals psi_d.
/// Throws DegenerateThrust when |f_d| < 1e-9.
Quat compose_desired_attitude(const Vec3& f_d, double psi_d);

/// Body torque from the quaternion error law and inverse-dynamics cancellation.
Vec3 attitude_control(const UavState& s, const Quat& q_d, const Vec3& omega_d, const Vec3& omega_dot_d,
                      const AttitudeGains& gains, const Vec3& inertia);

/// Thrust magnitude realized along the current body z axis.
inline double thrust_along_body(const Vec3& f_d, const Quat& q) {
    const double t = dot(f_d, body_z(q));
    return t > 0.0 ? t : 0.0;
}

}  // namespace safeyaw
