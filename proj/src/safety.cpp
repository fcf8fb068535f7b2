#include "safeyaw/safety.hpp"

#include <cmath>

namespace safeyaw {

CbfRow cbf_row(const UavState& uav, const Vec3& mu_probe, const ObstacleState& obs, const Vec3& obs_accel,
               const CbfParams& p) {
    const Vec3 d = obs.r_c - uav.r;
    const double dist = norm(d);
    if (!(dist > 1e-9)) throw SingularGeometry("cbf_row: UAV and obstacle centers coincide");
    const Vec3 n = d / dist;
    const Vec3 d_dot = obs.v_c - uav.v;

    const double b = dist - obs.radius_barrier;
    const double b_dot = dot(n, d_dot);
    // B'' = n . (a_c - mu) + (|d'|^2 - (n . d')^2) / |d|
    const double curvature = (dot(d_dot, d_dot) - b_dot * b_dot) / dist;
    const double omega2 = p.omega_n * p.omega_n;

    CbfRow row;
    row.a = n;
    row.b = dot(n, obs_accel) + curvature + 2.0 * p.zeta * p.omega_n * b_dot + omega2 * b;
    row.h_value = row.b - dot(row.a, mu_probe);
    return row;
}

ClfRow clf_row(const UavState& uav, const PositionReference& ref, double clf_rate) {
    const Vec3 e_p = ref.r_d - uav.r;
    const Vec3 e_v = ref.v_d - uav.v;
    const double v = 0.5 * (dot(e_p, e_p) + dot(e_v, e_v));
    // V' = e_p . e_v + e_v . (a_d - mu)
    ClfRow row;
    row.a = -e_v;
    row.b = -clf_rate * v - dot(e_p, e_v) - dot(e_v, ref.a_d);
    return row;
}

namespace {

qp::Row make_row(const Vec3& g, double g_delta, double h) {
    qp::Row row;
    row.g[0] = g.x;
    row.g[1] = g.y;
    row.g[2] = g.z;
    row.g[3] = g_delta;
    row.h = h;
    return row;
}

}  // namespace

std::vector<qp::Row> assemble_rows(const QpProblem& p) {
    std::vector<qp::Row> rows;
    rows.reserve(p.cbf.size() + 8);
    for (const CbfRow& c : p.cbf) rows.push_back(make_row(c.a, 0.0, c.b - dot(c.a, p.mu_d)));
    if (p.use_clf) rows.push_back(make_row(p.clf.a, -1.0, p.clf.b - dot(p.clf.a, p.mu_d)));
    rows.push_back(make_row({1, 0, 0}, 0.0, p.mu_max.x - p.mu_d.x));
    rows.push_back(make_row({0, 1, 0}, 0.0, p.mu_max.y - p.mu_d.y));
    rows.push_back(make_row({0, 0, 1}, 0.0, p.mu_max.z - p.mu_d.z));
    rows.push_back(make_row({-1, 0, 0}, 0.0, p.mu_d.x - p.mu_min.x));
    rows.push_back(make_row({0, -1, 0}, 0.0, p.mu_d.y - p.mu_min.y));
    rows.push_back(make_row({0, 0, -1}, 0.0, p.mu_d.z - p.mu_min.z));
    rows.push_back(make_row({0, 0, 0}, -1.0, 0.0));
    return rows;
}

QpSolution solve_qp(const QpProblem& p) {
    const std::vector<qp::Row> rows = assemble_rows(p);
    const double diag[4] = {p.h_diag.x, p.h_diag.y, p.h_diag.z, p.xi};

    QpSolution sol;
    sol.raw = qp::solve_diagonal(4, diag, rows);
    if (sol.raw.status != qp::Status::Optimal) {
        sol.status = QpStatus::Infeasible;
        // x = (mu_qp, delta, s): every CBF row gains -s, and s >= 0.
        std::vector<qp::Row> relaxed = rows;
        for (std::size_t i = 0; i < p.cbf.size(); ++i) relaxed[i].g[4] = -1.0;
        qp::Row s_nonneg;
        s_nonneg.g[4] = -1.0;
        relaxed.push_back(s_nonneg);
        const double diag5[5] = {p.h_diag.x, p.h_diag.y, p.h_diag.z, p.xi, kRelaxationWeight};
        sol.raw = qp::solve_diagonal(5, diag5, relaxed);
        sol.relaxation = std::max(0.0, sol.raw.x[4]);
    }
    sol.mu_qp = {sol.raw.x[0], sol.raw.x[1], sol.raw.x[2]};
    sol.delta = std::max(0.0, sol.raw.x[3]);
    sol.mu = p.mu_d + sol.mu_qp;
    // Box bounds are hard in both problems; clamp away round-off.
    sol.mu = {std::clamp(sol.mu.x, p.mu_min.x, p.mu_max.x), std::clamp(sol.mu.y, p.mu_min.y, p.mu_max.y),
              std::clamp(sol.mu.z, p.mu_min.z, p.mu_max.z)};
    return sol;
}

}  // namespace safeyaw
