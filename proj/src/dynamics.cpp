#include "safeyaw/dynamics.hpp"

#include <cmath>

namespace safeyaw {

namespace {

UavState advance(const UavState& s, const UavDerivative& d, double h) {
    return {s.r + h * d.r_dot,
            s.v + h * d.v_dot,
            {s.q.w + h * d.q_dot.w, s.q.x + h * d.q_dot.x, s.q.y + h * d.q_dot.y, s.q.z + h * d.q_dot.z},
            s.omega + h * d.omega_dot};
}

bool finite_state(const UavState& s) {
    return is_finite(s.r) && is_finite(s.v) && is_finite(s.omega) && std::isfinite(s.q.w) &&
           std::isfinite(s.q.x) && std::isfinite(s.q.y) && std::isfinite(s.q.z);
}

// Fold x into [lo, hi] as a triangle wave; returns the sign of dx/dt after folding.
double fold(double& x, double lo, double hi) {
    const double span = hi - lo;
    if (span <= 0.0) {
        x = lo;
        return 0.0;
    }
    double m = std::fmod(x - lo, 2.0 * span);
    if (m < 0.0) m += 2.0 * span;
    if (m <= span) {
        x = lo + m;
        return 1.0;
    }
    x = lo + 2.0 * span - m;
    return -1.0;
}

}  // namespace

UavDerivative uav_derivative(const UavState& s, const UavParams& p, double thrust, const Vec3& torque) {
    UavDerivative d;
    d.r_dot = s.v;
    // The quaternion is not renormalized between RK stages, so use the unnormalized body z.
    const Quat& q = s.q;
    const double n2 = q.w * q.w + q.x * q.x + q.y * q.y + q.z * q.z;
    const Vec3 bz = body_z(q) / n2;
    d.v_dot = kGravity + (thrust / p.mass) * bz;
    d.q_dot = hamilton(q, Quat{0.0, 0.5 * s.omega.x, 0.5 * s.omega.y, 0.5 * s.omega.z});
    const Vec3 j_omega = hadamard(p.inertia, s.omega);
    const Vec3 rhs = torque - cross(s.omega, j_omega);
    d.omega_dot = {rhs.x / p.inertia.x, rhs.y / p.inertia.y, rhs.z / p.inertia.z};
    return d;
}

UavState step_uav(const UavState& s, const UavParams& p, double thrust, const Vec3& torque, double dt) {
    if (!(dt > 0.0 && dt <= 0.01)) throw std::invalid_argument("step_uav: dt must lie in (0, 0.01]");
    if (!(thrust >= 0.0)) throw std::invalid_argument("step_uav: thrust must be non-negative");

    const UavDerivative k1 = uav_derivative(s, p, thrust, torque);
    const UavDerivative k2 = uav_derivative(advance(s, k1, 0.5 * dt), p, thrust, torque);
    const UavDerivative k3 = uav_derivative(advance(s, k2, 0.5 * dt), p, thrust, torque);
    const UavDerivative k4 = uav_derivative(advance(s, k3, dt), p, thrust, torque);

    const double w = dt / 6.0;
    UavDerivative sum;
    sum.r_dot = k1.r_dot + 2.0 * k2.r_dot + 2.0 * k3.r_dot + k4.r_dot;
    sum.v_dot = k1.v_dot + 2.0 * k2.v_dot + 2.0 * k3.v_dot + k4.v_dot;
    sum.omega_dot = k1.omega_dot + 2.0 * k2.omega_dot + 2.0 * k3.omega_dot + k4.omega_dot;
    sum.q_dot = {k1.q_dot.w + 2.0 * k2.q_dot.w + 2.0 * k3.q_dot.w + k4.q_dot.w,
                 k1.q_dot.x + 2.0 * k2.q_dot.x + 2.0 * k3.q_dot.x + k4.q_dot.x,
                 k1.q_dot.y + 2.0 * k2.q_dot.y + 2.0 * k3.q_dot.y + k4.q_dot.y,
                 k1.q_dot.z + 2.0 * k2.q_dot.z + 2.0 * k3.q_dot.z + k4.q_dot.z};

    UavState next = advance(s, sum, w);
    if (!finite_state(next)) throw DynamicsFault("step_uav: non-finite state after integration");
    next.q = normalized(next.q);
    if (!finite_state(next)) throw DynamicsFault("step_uav: degenerate attitude quaternion");
    return next;
}

ObstacleState obstacle_state_at(const ObstacleTrajectory& traj, double radius_true, double radius_barrier, double t) {
    ObstacleState out;
    out.radius_true = radius_true;
    out.radius_barrier = radius_barrier;
    switch (traj.kind) {
        case TrajectoryKind::Static:
            out.r_c = traj.anchor;
            break;
        case TrajectoryKind::Linear:
            out.r_c = traj.anchor + t * traj.velocity;
            out.v_c = traj.velocity;
            break;
        case TrajectoryKind::Sinusoidal: {
            const double w = kTwoPi * traj.frequency;
            const double arg = w * t + traj.phase;
            out.r_c = traj.anchor + t * traj.velocity + std::sin(arg) * traj.amplitude;
            out.v_c = traj.velocity + (w * std::cos(arg)) * traj.amplitude;
            out.a_c = (-w * w * std::sin(arg)) * traj.amplitude;
            break;
        }
    }
    if (traj.box.enabled) {
        const double sx = fold(out.r_c.x, traj.box.lo.x, traj.box.hi.x);
        const double sy = fold(out.r_c.y, traj.box.lo.y, traj.box.hi.y);
        const double sz = fold(out.r_c.z, traj.box.lo.z, traj.box.hi.z);
        out.v_c = {sx * out.v_c.x, sy * out.v_c.y, sz * out.v_c.z};
        out.a_c = {sx * out.a_c.x, sy * out.a_c.y, sz * out.a_c.z};
    }
    return out;
}

std::string to_string(TrajectoryKind kind) {
    switch (kind) {
        case TrajectoryKind::Static: return "static";
        case TrajectoryKind::Linear: return "linear";
        case TrajectoryKind::Sinusoidal: return "sinusoidal";
    }
    return "static";
}

TrajectoryKind trajectory_kind_from_string(const std::string& name) {
    if (name == "static") return TrajectoryKind::Static;
    if (name == "linear") return TrajectoryKind::Linear;
    if (name == "sinusoidal") return TrajectoryKind::Sinusoidal;
    throw std::invalid_argument("unknown trajectory kind '" + name + "'");
}

}  // namespace safeyaw
