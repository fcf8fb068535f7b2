#include "safeyaw/tracking.hpp"

#include <cmath>
#include <string>

namespace safeyaw {

LqrGain lqr_synthesize(double q_pos_weight, double q_vel_weight, double r_weight) {
    if (!(q_pos_weight > 0.0)) throw ConfigError("lqr: q_pos must be > 0");
    if (!(q_vel_weight >= 0.0)) throw ConfigError("lqr: q_vel must be >= 0");
    if (!(r_weight > 0.0)) throw ConfigError("lqr: r must be > 0");
    LqrGain k;
    k.kp = std::sqrt(q_pos_weight / r_weight);
    k.kv = std::sqrt(q_vel_weight / r_weight + 2.0 * k.kp);
    return k;
}

Vec3 position_control(const UavState& s, const PositionReference& ref, const LqrGain& k) {
    return k.kp * (ref.r_d - s.r) + k.kv * (ref.v_d - s.v) + ref.a_d;
}

Quat compose_desired_attitude(const Vec3& f_d, double psi_d) {
    const double f = norm(f_d);
    if (!(f >= 1e-9)) throw DegenerateThrust("compose_desired_attitude: |f_d| below 1e-9");
    const Vec3 b3 = f_d / f;
    const Vec3 heading{std::cos(psi_d), std::sin(psi_d), 0.0};
    // b1 lies in the vertical plane through the heading, orthogonal to b3.
    Vec3 b1 = b3.z * heading - dot(heading, b3) * Vec3{0.0, 0.0, 1.0};
    const double n1 = norm(b1);
    if (n1 < 1e-12) {
        // Thrust axis horizontal and along the heading: any b1 in the vertical plane works.
        b1 = {0.0, 0.0, dot(heading, b3) > 0.0 ? -1.0 : 1.0};
    } else {
        b1 = b1 / n1;
    }
    const Vec3 b2 = cross(b3, b1);
    return quat_from_columns(b1, b2, b3);
}

Vec3 attitude_control(const UavState& s, const Quat& q_d, const Vec3& omega_d, const Vec3& omega_dot_d,
                      const AttitudeGains& gains, const Vec3& inertia) {
    const Quat qe = quat_error(s.q, q_d);
    const double sgn = qe.w >= 0.0 ? 1.0 : -1.0;
    const Vec3 n_e{qe.x, qe.y, qe.z};
    const Vec3 nu = (gains.k_q * sgn) * n_e + gains.k_omega * (omega_d - s.omega) + omega_dot_d;
    return hadamard(inertia, nu) + cross(s.omega, hadamard(inertia, s.omega));
}

}  // namespace safeyaw
