// Vec3 / Quat arithmetic, angle wrapping and the deterministic random source.
//
// Quaternion convention: Hamilton product, scalar-first (w, x, y, z),
// q rotates body-frame vectors into the world frame.
#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>

namespace safeyaw {

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

struct Vec3 {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;

    friend bool operator==(const Vec3&, const Vec3&) = default;
};

inline constexpr Vec3 operator+(const Vec3& a, const Vec3& b) { return {a.x + b.x, a.y + b.y, a.z + b.z}; }
inline constexpr Vec3 operator-(const Vec3& a, const Vec3& b) { return {a.x - b.x, a.y - b.y, a.z - b.z}; }
inline constexpr Vec3 operator-(const Vec3& a) { return {-a.x, -a.y, -a.z}; }
inline constexpr Vec3 operator*(double s, const Vec3& v) { return {s * v.x, s * v.y, s * v.z}; }
inline constexpr Vec3 operator*(const Vec3& v, double s) { return s * v; }
inline constexpr Vec3 operator/(const Vec3& v, double s) { return {v.x / s, v.y / s, v.z / s}; }

inline constexpr Vec3& operator+=(Vec3& a, const Vec3& b) {
    a.x += b.x;
    a.y += b.y;
    a.z += b.z;
    return a;
}

inline constexpr Vec3& operator-=(Vec3& a, const Vec3& b) {
    a.x -= b.x;
    a.y -= b.y;
    a.z -= b.z;
    return a;
}

inline constexpr double dot(const Vec3& a, const Vec3& b) { return a.x * b.x + a.y * b.y + a.z * b.z; }

inline constexpr Vec3 cross(const Vec3& a, const Vec3& b) {
    return {a.y * b.z - a.z * b.y, a.z * b.x - a.x * b.z, a.x * b.y - a.y * b.x};
}

inline double norm(const Vec3& v) { return std::sqrt(dot(v, v)); }

inline Vec3 normalized(const Vec3& v) { return v / norm(v); }

/// Componentwise product (diagonal matrix times vector).
inline constexpr Vec3 hadamard(const Vec3& a, const Vec3& b) { return {a.x * b.x, a.y * b.y, a.z * b.z}; }

inline bool is_finite(const Vec3& v) { return std::isfinite(v.x) && std::isfinite(v.y) && std::isfinite(v.z); }

/// Horizontal (xy-plane) distance between two points.
inline double horizontal_distance(const Vec3& a, const Vec3& b) { return std::hypot(b.x - a.x, b.y - a.y); }

/// Bearing of b as seen from a, measured in the xy-plane from +x toward +y.
inline double horizontal_bearing(const Vec3& from, const Vec3& to) { return std::atan2(to.y - from.y, to.x - from.x); }

struct Quat {
    double w = 1.0;
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;

    static constexpr Quat identity() { return {}; }
    friend bool operator==(const Quat&, const Quat&) = default;
};

inline double norm(const Quat& q) { return std::sqrt(q.w * q.w + q.x * q.x + q.y * q.y + q.z * q.z); }

inline Quat normalized(const Quat& q) {
    const double n = norm(q);
    return {q.w / n, q.x / n, q.y / n, q.z / n};
}

inline constexpr Quat conjugate(const Quat& q) { return {q.w, -q.x, -q.y, -q.z}; }

inline constexpr Quat operator-(const Quat& q) { return {-q.w, -q.x, -q.y, -q.z}; }

/// Raw Hamilton product without renormalization (used inside the integrator).
inline constexpr Quat hamilton(const Quat& a, const Quat& b) {
    return {a.w * b.w - a.x * b.x - a.y * b.y - a.z * b.z,
            a.w * b.x + a.x * b.w + a.y * b.z - a.z * b.y,
            a.w * b.y - a.x * b.z + a.y * b.w + a.z * b.x,
            a.w * b.z + a.x * b.y - a.y * b.x + a.z * b.w};
}

/// Hamilton product of two unit quaternions, renormalized.
inline Quat quat_mul(const Quat& a, const Quat& b) { return normalized(hamilton(a, b)); }

/// Inverse of a unit quaternion.
inline constexpr Quat inverse(const Quat& q) { return conjugate(q); }

/// Attitude error q^-1 (x) q_d: the desired attitude expressed relative to the current one.
inline Quat quat_error(const Quat& q, const Quat& q_d) { return quat_mul(inverse(q), q_d); }

inline Quat quat_from_axis_angle(const Vec3& axis, double angle) {
    const Vec3 u = normalized(axis);
    const double s = std::sin(0.5 * angle);
    return {std::cos(0.5 * angle), s * u.x, s * u.y, s * u.z};
}

inline Quat quat_from_yaw(double yaw) { return {std::cos(0.5 * yaw), 0.0, 0.0, std::sin(0.5 * yaw)}; }

/// Rotate a body-frame vector into the world frame.
inline Vec3 rotate(const Quat& q, const Vec3& v) {
    const Vec3 u{q.x, q.y, q.z};
    const Vec3 t = 2.0 * cross(u, v);
    return v + q.w * t + cross(u, t);
}

/// Body z axis expressed in the world frame (the thrust direction).
inline Vec3 body_z(const Quat& q) {
    return {2.0 * (q.x * q.z + q.w * q.y), 2.0 * (q.y * q.z - q.w * q.x), 1.0 - 2.0 * (q.x * q.x + q.y * q.y)};
}

/// Heading: angle of the body x axis projected into the world horizontal plane.
inline double yaw_of(const Quat& q) {
    return std::atan2(2.0 * (q.w * q.z + q.x * q.y), 1.0 - 2.0 * (q.y * q.y + q.z * q.z));
}

/// Quaternion (w >= 0) of the rotation whose matrix has columns c0, c1, c2.
Quat quat_from_columns(const Vec3& c0, const Vec3& c1, const Vec3& c2);

/// Wrap to the half-open interval [-pi, pi).
inline double wrap_angle(double a) {
    double r = a - kTwoPi * std::floor((a + kPi) / kTwoPi);
    // floor rounding can land exactly on +pi
    if (r >= kPi) r -= kTwoPi;
    if (r < -kPi) r = -kPi;
    return r;
}

/// Seedable xoshiro256** generator, state expanded from the seed with splitmix64.
/// The draw sequence depends only on the seed.
class Rng {
public:
    explicit Rng(std::uint64_t seed);

    std::uint64_t next_u64();
    /// Uniform on [0, 1) with 53 random bits.
    double uniform();
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
    /// Uniform integer in [0, n).
    std::uint64_t below(std::uint64_t n);
    /// Independent generator for a labelled sub-stream.
    Rng derive(std::uint64_t stream) const;

    std::uint64_t seed() const { return seed_; }

private:
    std::uint64_t seed_;
    std::array<std::uint64_t, 4> s_{};
};

std::uint64_t splitmix64(std::uint64_t& state);

}  // namespace safeyaw
