#include "doctest.h"

#include <cmath>

#include "oracles.hpp"
#include "safeyaw/qp.hpp"
#include "safeyaw/safety.hpp"
#include "safeyaw/tracking.hpp"

using namespace safeyaw;

namespace {

struct RandomQp {
    int n = 0;
    std::vector<double> d;
    std::vector<qp::Row> rows;
};

RandomQp random_qp(Rng& rng, int n, int m) {
    RandomQp p;
    p.n = n;
    for (int i = 0; i < n; ++i) p.d.push_back(rng.uniform(0.2, 5.0));
    for (int r = 0; r < m; ++r) {
        qp::Row row;
        for (int i = 0; i < n; ++i) row.g[i] = rng.uniform(-1, 1);
        row.h = rng.uniform(-1.0, 1.0);
        p.rows.push_back(row);
    }
    return p;
}

double objective(const std::vector<double>& d, const qp::Vector& x) {
    double s = 0.0;
    for (std::size_t i = 0; i < d.size(); ++i) s += 0.5 * d[i] * x[i] * x[i];
    return s;
}

}  // namespace

TEST_CASE("dual active-set solver agrees with KKT enumeration") {
    Rng rng(100);
    int feasible = 0;
    for (int trial = 0; trial < 400; ++trial) {
        const int n = 1 + static_cast<int>(rng.below(4));
        const int m = static_cast<int>(rng.below(7));
        const RandomQp p = random_qp(rng, n, m);
        std::vector<std::vector<double>> g;
        std::vector<double> h;
        for (const auto& r : p.rows) {
            g.emplace_back(r.g.begin(), r.g.begin() + n);
            h.push_back(r.h);
        }
        const auto ref = oracle::enumerate_qp(p.d, g, h);
        const qp::Result res = qp::solve_diagonal(n, p.d, p.rows);
        if (!ref.feasible) {
            CHECK(res.status == qp::Status::Infeasible);
            continue;
        }
        ++feasible;
        REQUIRE(res.status == qp::Status::Optimal);
        CHECK(qp::max_violation(n, res.x, p.rows) < 1e-9);
        CHECK(objective(p.d, res.x) == doctest::Approx(ref.objective).epsilon(1e-8));
        for (int i = 0; i < n; ++i) CHECK(res.x[i] == doctest::Approx(ref.x[i]).epsilon(1e-6));
        for (double l : res.multipliers) CHECK(l >= -1e-12);
    }
    CHECK(feasible > 200);
}

TEST_CASE("solver edge cases") {
    const std::vector<double> d{1.0, 2.0};
    SUBCASE("no rows gives the origin") {
        const auto r = qp::solve_diagonal(2, d, {});
        CHECK(r.status == qp::Status::Optimal);
        CHECK(r.x[0] == 0.0);
    }
    SUBCASE("single active half-space has the projection as solution") {
        qp::Row row;
        row.g[0] = -1.0;
        row.h = -2.0;  // x0 >= 2
        const std::vector<qp::Row> rows{row};
        const auto r = qp::solve_diagonal(2, d, rows);
        CHECK(r.x[0] == doctest::Approx(2.0));
        CHECK(r.x[1] == doctest::Approx(0.0));
        CHECK(r.multipliers[0] == doctest::Approx(2.0));
    }
    SUBCASE("contradictory rows are infeasible") {
        qp::Row a, b;
        a.g[0] = 1.0;
        a.h = -1.0;  // x0 <= -1
        b.g[0] = -1.0;
        b.h = -1.0;  // x0 >= 1
        const std::vector<qp::Row> rows{a, b};
        CHECK(qp::solve_diagonal(2, d, rows).status == qp::Status::Infeasible);
    }
}

TEST_CASE("degenerate vertices with more active rows than variables") {
    // Every row passes within round-off of one point, so the active set saturates.
    Rng rng(404);
    for (int trial = 0; trial < 3000; ++trial) {
        const int n = 1 + trial % 4;
        const int m = n + 1 + static_cast<int>(rng.uniform(0.0, 5.0));
        std::vector<double> d;
        for (int i = 0; i < n; ++i) d.push_back(rng.uniform(0.2, 5.0));
        qp::Vector vertex{};
        for (int i = 0; i < n; ++i) vertex[i] = rng.uniform(-3.0, 3.0);
        std::vector<qp::Row> rows;
        for (int r = 0; r < m; ++r) {
            qp::Row row;
            double gx = 0.0;
            for (int i = 0; i < n; ++i) {
                row.g[i] = rng.uniform(-1.0, 1.0) * std::pow(10.0, rng.uniform(-3.0, 3.0));
                gx += row.g[i] * vertex[i];
            }
            row.h = gx * (1.0 + rng.uniform(-1.0, 1.0) * 1e-15);
            rows.push_back(row);
        }
        qp::Result res;
        REQUIRE_NOTHROW(res = qp::solve_diagonal(n, d, rows));
        CHECK(static_cast<int>(res.active.size()) <= n);
        if (res.status == qp::Status::Optimal) CHECK(qp::max_violation(n, res.x, rows) < 1e-6);
    }
}

TEST_CASE("CBF row encodes B'' + 2 zeta w B' + w^2 B") {
    // Oracle: finite differences of B along the double-integrator flow r'' = mu
    // and the obstacle flow r_c'' = a_c.
    Rng rng(7);
    const CbfParams p{1.3, 2.5};
    for (int trial = 0; trial < 200; ++trial) {
        UavState uav{{rng.uniform(-2, 2), rng.uniform(-2, 2), rng.uniform(0, 1)},
                     {rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-0.3, 0.3)},
                     Quat::identity(),
                     {}};
        ObstacleState obs{{rng.uniform(-2, 2), rng.uniform(-2, 2), rng.uniform(0, 1)},
                          {rng.uniform(-0.5, 0.5), rng.uniform(-0.5, 0.5), 0.0},
                          {rng.uniform(-0.3, 0.3), rng.uniform(-0.3, 0.3), 0.0},
                          0.1,
                          0.24};
        if (norm(obs.r_c - uav.r) < 0.3) continue;
        const Vec3 mu{rng.uniform(-3, 3), rng.uniform(-3, 3), rng.uniform(-3, 3)};
        auto barrier_at = [&](double t) {
            const Vec3 r = uav.r + t * uav.v + 0.5 * t * t * mu;
            const Vec3 rc = obs.r_c + t * obs.v_c + 0.5 * t * t * obs.a_c;
            return norm(rc - r) - obs.radius_barrier;
        };
        const double h = 1e-4;
        const double b0 = barrier_at(0), bp = barrier_at(h), bm = barrier_at(-h);
        const double b1 = (bp - bm) / (2 * h), b2 = (bp - 2 * b0 + bm) / (h * h);
        const double expected = b2 + 2 * p.zeta * p.omega_n * b1 + p.omega_n * p.omega_n * b0;

        const CbfRow row = cbf_row(uav, mu, obs, obs.a_c, p);
        CHECK(row.h_value == doctest::Approx(expected).epsilon(1e-5));
        CHECK(row.b - dot(row.a, mu) == doctest::Approx(row.h_value));
        CHECK(norm(row.a) == doctest::Approx(1.0));
    }
    UavState same{{1, 1, 1}, {}, Quat::identity(), {}};
    ObstacleState coincide{{1, 1, 1}, {}, {}, 0.1, 0.2};
    CHECK_THROWS_AS(cbf_row(same, {}, coincide, {}, {}), SingularGeometry);
}

TEST_CASE("CLF row encodes V' <= -rate V") {
    const UavState uav{{0.3, -0.2, 0.5}, {0.1, 0.4, 0.0}, Quat::identity(), {}};
    const PositionReference ref{{0.5, 0.0, 0.5}, {0.2, 0.1, 0.0}, {0.05, -0.1, 0.0}};
    const double rate = 0.7;
    const ClfRow row = clf_row(uav, ref, rate);
    Rng rng(4);
    for (int i = 0; i < 20; ++i) {
        const Vec3 mu{rng.uniform(-2, 2), rng.uniform(-2, 2), rng.uniform(-2, 2)};
        const Vec3 ep = ref.r_d - uav.r, ev = ref.v_d - uav.v;
        const double v = 0.5 * (dot(ep, ep) + dot(ev, ev));
        const double vdot = dot(ep, ev) + dot(ev, ref.a_d - mu);
        CHECK(dot(row.a, mu) - row.b == doctest::Approx(vdot + rate * v));
    }
}

TEST_CASE("safety filter") {
    QpProblem p;
    p.mu_d = {1.0, -0.5, 0.2};
    p.xi = 10.0;
    p.use_clf = false;

    SUBCASE("inactive constraints pass mu_d through") {
        const QpSolution s = solve_qp(p);
        CHECK(s.status == QpStatus::Optimal);
        CHECK(norm(s.mu - p.mu_d) < 1e-12);
        CHECK(s.delta == 0.0);
    }
    SUBCASE("an active CBF row projects mu_d onto the half-space") {
        CbfRow row;
        row.a = {1, 0, 0};
        row.b = 0.25;  // mu_x <= 0.25
        p.cbf.push_back(row);
        const QpSolution s = solve_qp(p);
        CHECK(s.mu.x == doctest::Approx(0.25));
        CHECK(s.mu.y == doctest::Approx(-0.5));
    }
    SUBCASE("box bounds hold") {
        p.mu_d = {9.0, -9.0, 0.0};
        const QpSolution s = solve_qp(p);
        CHECK(s.mu.x == doctest::Approx(5.0));
        CHECK(s.mu.y == doctest::Approx(-5.0));
    }
    SUBCASE("conflicting rows fall back to the least-violating point in the box") {
        CbfRow a, b;
        a.a = {1, 0, 0};
        a.b = -1.0;  // mu_x <= -1
        b.a = {-1, 0, 0};
        b.b = -1.0;  // mu_x >= 1
        p.cbf = {a, b};
        const QpSolution s = solve_qp(p);
        CHECK(s.status == QpStatus::Infeasible);
        CHECK(s.relaxation == doctest::Approx(1.0).epsilon(1e-6));
        CHECK(std::abs(s.mu.x) < 1e-6);
    }
    SUBCASE("the CLF row is softened by delta") {
        p.use_clf = true;
        p.clf.a = {-1, 0, 0};
        p.clf.b = -3.0;  // wants mu_x >= 3
        const QpSolution s = solve_qp(p);
        CHECK(s.status == QpStatus::Optimal);
        CHECK(s.delta > 0.0);
        CHECK(-s.mu.x <= -3.0 + s.delta + 1e-9);
        // Stationarity along x: (mu_x - mu_dx) = lambda and xi delta = lambda.
        CHECK(s.mu.x - p.mu_d.x == doctest::Approx(p.xi * s.delta).epsilon(1e-8));
    }
}

TEST_CASE("assembled rows follow the documented order") {
    QpProblem p;
    p.cbf.resize(2);
    p.use_clf = true;
    const auto rows = assemble_rows(p);
    REQUIRE(rows.size() == 2 + 1 + 3 + 3 + 1);
    CHECK(rows[3].g[0] == 1.0);   // upper box x
    CHECK(rows[6].g[0] == -1.0);  // lower box x
    CHECK(rows[9].g[3] == -1.0);  // delta >= 0
    CHECK(rows[2].g[3] == -1.0);  // CLF row carries -delta
}
