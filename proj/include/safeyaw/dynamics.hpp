// Quadrotor rigid body and obstacle kinematics.
#pragma once

#include <stdexcept>
#include <string>

#include "safeyaw/math.hpp"

namespace safeyaw {

inline constexpr Vec3 kGravity{0.0, 0.0, -9.81};

struct UavState {
    Vec3 r;      ///< position [m], world
    Vec3 v;      ///< velocity [m/s], world
    Quat q;      ///< body-to-world attitude
    Vec3 omega;  ///< angular rate [rad/s], body

    friend bool operator==(const UavState&, const UavState&) = default;
};

/// Crazyflie 2.1 class defaults.
struct UavParams {
    double mass = 0.033;
    Vec3 inertia{1.66e-5, 1.66e-5, 2.93e-5};  ///< diagonal of J [kg m^2]
    Vec3 mu_min{-5.0, -5.0, -5.0};           ///< virtual acceleration bounds [m/s^2]
    Vec3 mu_max{5.0, 5.0, 5.0};
    double radius = 0.06;  ///< body radius [m]
    double max_yaw_rate = 3.5;  ///< slew limit applied to the yaw reference [rad/s]
};

/// Thrown when integration produces a non-finite state.
class DynamicsFault : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// One RK4 step with constant body-z thrust [N] and body torque [N m].
/// dt must lie in (0, 0.01] and thrust must be non-negative.
UavState step_uav(const UavState& s, const UavParams& p, double thrust, const Vec3& torque, double dt);

/// Time derivative of the rigid-body state; exposed for tests.
struct UavDerivative {
    Vec3 r_dot;
    Vec3 v_dot;
    Quat q_dot;
    Vec3 omega_dot;
};
UavDerivative uav_derivative(const UavState& s, const UavParams& p, double thrust, const Vec3& torque);

struct ObstacleState {
    Vec3 r_c;                    ///< center [m]
    Vec3 v_c;                    ///< velocity [m/s]
    Vec3 a_c;                    ///< acceleration [m/s^2] (impulses at reflections are not represented)
    double radius_true = 0.1;    ///< physical radius [m]
    double radius_barrier = 0.1; ///< R used by the barrier [m]
};

enum class TrajectoryKind { Static, Linear, Sinusoidal };

/// Axis-aligned box; positions reflect off its faces when enabled.
struct ReflectBox {
    bool enabled = false;
    Vec3 lo;
    Vec3 hi;
};

/// r(t) = anchor + velocity t + amplitude sin(2 pi frequency t + phase), optionally folded into a box.
/// Static ignores velocity and amplitude; Linear ignores amplitude.
struct ObstacleTrajectory {
    TrajectoryKind kind = TrajectoryKind::Static;
    Vec3 anchor;
    Vec3 velocity;
    Vec3 amplitude;
    double frequency = 0.0;  ///< [Hz]
    double phase = 0.0;      ///< [rad]
    ReflectBox box;
};

ObstacleState obstacle_state_at(const ObstacleTrajectory& traj, double radius_true, double radius_barrier, double t);

std::string to_string(TrajectoryKind kind);
TrajectoryKind trajectory_kind_from_string(const std::string& name);

}  // namespace safeyaw
