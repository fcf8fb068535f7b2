// Independent reference computations used by the unit and acceptance tests.
// Nothing here calls into the code under test beyond plain data types.
#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <limits>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "safeyaw/math.hpp"
#include "safeyaw/perception.hpp"

namespace oracle {

inline double adaptive(const std::function<double(double)>& f, double a, double b, double tol = 1e-11) {
    double err = 0.0;
    return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, a, b, 12, tol, &err);
}

/// Density evaluated straight from its definition.
inline double density(const safeyaw::DensityScene& scene, double r, double theta) {
    double sum = 0.0;
    for (const auto& p : scene.peaks) {
        const double d2 = r * r - 2.0 * r * p.r * std::cos(theta - p.theta) + p.r * p.r;
        sum += p.alpha / (p.beta * d2 + 1.0);
    }
    return sum;
}

/// Radial integral of Phi(r, theta) r over [0, rho] by adaptive quadrature, split
/// at the closest approach to each peak so the narrow bumps are resolved.
inline double radial(const safeyaw::DensityScene& scene, double rho, double theta) {
    std::vector<double> cuts{0.0, rho};
    for (const auto& p : scene.peaks) {
        const double c = p.r * std::cos(theta - p.theta);
        if (c > 0.0 && c < rho) cuts.push_back(c);
    }
    std::sort(cuts.begin(), cuts.end());
    double total = 0.0;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        if (cuts[i + 1] <= cuts[i]) continue;
        total += adaptive([&](double r) { return density(scene, r, theta) * r; }, cuts[i], cuts[i + 1]);
    }
    return total;
}

inline double quality(const safeyaw::SensorModel& s, double delta) {
    delta = std::remainder(delta, 2.0 * safeyaw::kPi);
    if (std::abs(delta) > s.sigma) return 0.0;
    if (s.mode == safeyaw::QualityMode::Binary) return 1.0;
    return (std::cos(delta) - std::cos(s.kappa)) / (1.0 - std::cos(s.kappa));
}

/// Direct 2-D quadrature of the observed risk over the sensed wedge: the
/// angular integral is adaptive, the inner radial integral is adaptive too.
inline double gamma_2d(const safeyaw::DensityScene& scene, const safeyaw::SensorModel& s, double psi) {
    auto inner = [&](double theta) {
        const double q = quality(s, psi - theta);
        if (q == 0.0) return 0.0;
        return q * radial(scene, s.rho, theta);
    };
    return boost::math::quadrature::gauss_kronrod<double, 31>::integrate(inner, psi - s.sigma, psi + s.sigma, 15,
                                                                        1e-10);
}

/// Steady state of the matrix Riccati ODE for x'' = u with cost q_p x^2 + q_v x'^2 + r u^2,
/// integrated with RK4 until it stops changing. Returns (k_p, k_v) = R^-1 B' P.
inline std::array<double, 2> riccati_gains(double qp, double qv, double r) {
    // P = [[p11, p12], [p12, p22]]; A = [[0, 1], [0, 0]]; B = [0; 1].
    auto rhs = [&](const std::array<double, 3>& p) {
        const double p11 = p[0], p12 = p[1], p22 = p[2];
        // dP/ds = A'P + PA - P B R^-1 B' P + Q  (s = reverse time)
        return std::array<double, 3>{-p12 * p12 / r + qp, p11 - p12 * p22 / r, 2.0 * p12 - p22 * p22 / r + qv};
    };
    std::array<double, 3> p{0.0, 0.0, 0.0};
    const double h = 1e-3;
    for (int it = 0; it < 2000000; ++it) {
        auto add = [](const std::array<double, 3>& a, const std::array<double, 3>& b, double s) {
            return std::array<double, 3>{a[0] + s * b[0], a[1] + s * b[1], a[2] + s * b[2]};
        };
        const auto k1 = rhs(p);
        const auto k2 = rhs(add(p, k1, h / 2));
        const auto k3 = rhs(add(p, k2, h / 2));
        const auto k4 = rhs(add(p, k3, h));
        std::array<double, 3> next;
        double change = 0.0;
        for (int i = 0; i < 3; ++i) {
            next[i] = p[i] + h / 6.0 * (k1[i] + 2 * k2[i] + 2 * k3[i] + k4[i]);
            change = std::max(change, std::abs(next[i] - p[i]));
        }
        p = next;
        if (change < 1e-15 * std::max(1.0, std::abs(p[0]))) break;
    }
    return {p[1] / r, p[2] / r};
}

/// Minimizes 1/2 sum d_i x_i^2 subject to G x <= h by enumerating every active
/// set of size <= n, solving its KKT system, and keeping the feasible,
/// dual-feasible candidate with the smallest objective.
struct EnumResult {
    bool feasible = false;
    std::vector<double> x;
    double objective = std::numeric_limits<double>::infinity();
};

inline bool solve_dense(std::vector<std::vector<double>> a, std::vector<double> b, std::vector<double>& x) {
    const std::size_t n = b.size();
    for (std::size_t c = 0; c < n; ++c) {
        std::size_t piv = c;
        for (std::size_t r = c + 1; r < n; ++r)
            if (std::abs(a[r][c]) > std::abs(a[piv][c])) piv = r;
        if (std::abs(a[piv][c]) < 1e-13) return false;
        std::swap(a[piv], a[c]);
        std::swap(b[piv], b[c]);
        for (std::size_t r = 0; r < n; ++r) {
            if (r == c) continue;
            const double f = a[r][c] / a[c][c];
            for (std::size_t k = c; k < n; ++k) a[r][k] -= f * a[c][k];
            b[r] -= f * b[c];
        }
    }
    x.resize(n);
    for (std::size_t i = 0; i < n; ++i) x[i] = b[i] / a[i][i];
    return true;
}

inline EnumResult enumerate_qp(const std::vector<double>& d, const std::vector<std::vector<double>>& g,
                               const std::vector<double>& h, double feas_tol = 1e-9) {
    const std::size_t n = d.size(), m = h.size();
    EnumResult best;
    // Iterate over subsets of rows with |S| <= n.
    for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << m); ++mask) {
        std::vector<std::size_t> s;
        for (std::size_t i = 0; i < m; ++i)
            if (mask >> i & 1u) s.push_back(i);
        if (s.size() > n) continue;
        // KKT: D x + G_S' lambda = 0, G_S x = h_S.
        const std::size_t k = s.size();
        std::vector<std::vector<double>> a(n + k, std::vector<double>(n + k, 0.0));
        std::vector<double> rhs(n + k, 0.0);
        for (std::size_t i = 0; i < n; ++i) a[i][i] = d[i];
        for (std::size_t j = 0; j < k; ++j) {
            for (std::size_t i = 0; i < n; ++i) {
                a[i][n + j] = g[s[j]][i];
                a[n + j][i] = g[s[j]][i];
            }
            rhs[n + j] = h[s[j]];
        }
        std::vector<double> sol;
        if (!solve_dense(a, rhs, sol)) continue;
        bool ok = true;
        for (std::size_t j = 0; j < k && ok; ++j) ok = sol[n + j] >= -1e-9;
        for (std::size_t r = 0; r < m && ok; ++r) {
            double gx = 0.0;
            for (std::size_t i = 0; i < n; ++i) gx += g[r][i] * sol[i];
            ok = gx <= h[r] + feas_tol;
        }
        if (!ok) continue;
        double obj = 0.0;
        for (std::size_t i = 0; i < n; ++i) obj += 0.5 * d[i] * sol[i] * sol[i];
        if (obj < best.objective) {
            best.feasible = true;
            best.objective = obj;
            best.x.assign(sol.begin(), sol.begin() + static_cast<std::ptrdiff_t>(n));
        }
    }
    return best;
}

}  // namespace oracle
