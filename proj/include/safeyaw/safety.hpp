// Exponential CBF rows, the quadratic CLF row and the CLF-CBF-QP safety filter
// that turns the desired virtual acceleration mu_d into mu.
#pragma once

#include <stdexcept>
#include <vector>

#include "safeyaw/dynamics.hpp"
#include "safeyaw/qp.hpp"
#include "safeyaw/tracking.hpp"

namespace safeyaw {

struct CbfParams {
    double zeta = 1.0;
    double omega_n = 3.0;
};

/// One half-space A mu <= b equivalent to h(mu) >= 0.
struct CbfRow {
    Vec3 a;
    double b = 0.0;
    double h_value = 0.0;  ///< h evaluated at the probe acceleration
};

/// Softened CLF row A mu <= b + delta.
struct ClfRow {
    Vec3 a;
    double b = 0.0;
};

class SingularGeometry : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// B = |r_c - r| - R.
inline double barrier_value(const Vec3& r, const Vec3& r_c, double radius_barrier) {
    return norm(r_c - r) - radius_barrier;
}

/// h(mu) = B'' + 2 zeta omega_n B' + omega_n^2 B for a spherical obstacle with
/// known acceleration. B'' is affine in the UAV acceleration mu.
CbfRow cbf_row(const UavState& uav, const Vec3& mu_probe, const ObstacleState& obs, const Vec3& obs_accel,
               const CbfParams& p);

/// Row enforcing V' <= -rate V for V = 1/2 |e|^2, e = [r_d - r; v_d - v].
ClfRow clf_row(const UavState& uav, const PositionReference& ref, double clf_rate);

struct QpProblem {
    Vec3 h_diag{1.0, 1.0, 1.0};
    double xi = 1.0;
    Vec3 mu_d;
    std::vector<CbfRow> cbf;
    bool use_clf = true;
    ClfRow clf;
    Vec3 mu_min{-5.0, -5.0, -5.0};
    Vec3 mu_max{5.0, 5.0, 5.0};
};

enum class QpStatus { Optimal, Infeasible };

struct QpSolution {
    Vec3 mu;
    Vec3 mu_qp;
    double delta = 0.0;
    QpStatus status = QpStatus::Optimal;
    /// Uniform relaxation added to every CBF row when the hard problem is infeasible.
    double relaxation = 0.0;
    qp::Result raw;  ///< solver output on the (mu_qp, delta) problem
};

/// Weight on the CBF relaxation variable of the infeasibility fallback.
inline constexpr double kRelaxationWeight = 1e8;

/// Rows of the hard problem over x = (mu_qp, delta), in the order:
/// CBF rows, CLF row (if used), upper box x/y/z, lower box x/y/z, delta >= 0.
std::vector<qp::Row> assemble_rows(const QpProblem& p);

/// Minimizes 1/2 mu_qp' H mu_qp + 1/2 xi delta^2 over the rows above.
/// On infeasibility the least-violating point inside the box is returned:
/// all CBF rows are relaxed by a common s >= 0 penalized by kRelaxationWeight.
QpSolution solve_qp(const QpProblem& p);

}  // namespace safeyaw
