#include "safeyaw/qp.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace safeyaw::qp {

namespace {

using Vec = Eigen::Matrix<double, Eigen::Dynamic, 1, 0, kMaxDim, 1>;
using Mat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, 0, kMaxDim, kMaxDim>;

constexpr double kInf = std::numeric_limits<double>::infinity();

// Step directions for adding constraint normal np to the active set N:
// z is the component of np orthogonal to span(N), r the least-squares
// coefficients so that np = N r + z.
void directions(const Mat& active_normals, int q, const Vec& np, Vec& z, Vec& r) {
    if (q == 0) {
        z = np;
        r.resize(0);
        return;
    }
    const Mat n_active = active_normals.leftCols(q);
    Eigen::HouseholderQR<Mat> qr(n_active);
    r = qr.solve(np);
    z = np - n_active * r;
}

}  // namespace

Result solve_diagonal(int n, std::span<const double> diag, std::span<const Row> rows) {
    if (n < 1 || n > kMaxDim) throw std::invalid_argument("qp: dimension out of range");
    if (static_cast<int>(diag.size()) < n) throw std::invalid_argument("qp: missing Hessian entries");
    for (int j = 0; j < n; ++j)
        if (!(diag[j] > 0.0)) throw std::invalid_argument("qp: Hessian diagonal must be positive");

    const int m = static_cast<int>(rows.size());
    Result res;
    res.multipliers.assign(m, 0.0);

    // Scaled coordinates y = D^{1/2} x turn the problem into a min-norm
    // projection with constraints n_i' y >= b_i, n_i = -D^{-1/2} g_i, b_i = -h_i.
    Vec inv_sqrt(n);
    for (int j = 0; j < n; ++j) inv_sqrt[j] = 1.0 / std::sqrt(diag[j]);
    auto normal = [&](int i) {
        Vec v(n);
        for (int j = 0; j < n; ++j) v[j] = -rows[i].g[j] * inv_sqrt[j];
        return v;
    };
    auto slack = [&](int i, const Vec& y) { return normal(i).dot(y) + rows[i].h; };

    Vec y = Vec::Zero(n);
    Mat active_normals(n, n);
    std::array<int, kMaxDim> active{};
    Vec u(n);  // multipliers of the active set
    int q = 0;

    const int max_iter = 50 * (m + n) + 100;
    int iter = 0;
    Vec z(n), r(n);

    for (;;) {
        // Most violated constraint, scaled by its normal length.
        int p = -1;
        double worst = 0.0;
        for (int i = 0; i < m; ++i) {
            bool is_active = false;
            for (int k = 0; k < q; ++k) is_active |= (active[k] == i);
            if (is_active) continue;
            const Vec ni = normal(i);
            const double nn = ni.norm();
            const double s = slack(i, y);
            const double tol = 1e-13 * std::max({1.0, std::abs(rows[i].h), nn * y.norm()});
            if (s >= -tol) continue;
            const double scaled = nn > 0.0 ? s / nn : -kInf;
            if (p < 0 || scaled < worst) {
                p = i;
                worst = scaled;
            }
        }
        if (p < 0) {
            res.status = Status::Optimal;
            break;
        }

        const Vec np = normal(p);
        double u_p = 0.0;
        bool added = false;
        bool infeasible = false;
        while (!added) {
            if (++iter > max_iter) {
                res.status = Status::IterationLimit;
                infeasible = true;
                break;
            }
            directions(active_normals, q, np, z, r);
            const double zz = z.squaredNorm();
            // With n active normals the span is full and z is zero up to round-off.
            const bool z_zero = q >= n || zz <= 1e-24 * std::max(1.0, np.squaredNorm());

            // Partial (dual) step length: first active multiplier to reach zero.
            double t1 = kInf;
            int drop = -1;
            for (int k = 0; k < q; ++k) {
                if (r[k] > 1e-14) {
                    const double ratio = u[k] / r[k];
                    if (ratio < t1) {
                        t1 = ratio;
                        drop = k;
                    }
                }
            }
            const double s_p = slack(p, y);
            const double t2 = z_zero ? kInf : -s_p / zz;

            if (t1 == kInf && t2 == kInf) {
                res.status = Status::Infeasible;
                infeasible = true;
                break;
            }
            const double t = std::min(t1, t2);
            if (!z_zero) y += t * z;
            for (int k = 0; k < q; ++k) u[k] -= t * r[k];
            u_p += t;

            if (t2 <= t1) {
                active_normals.col(q) = np;
                active[q] = p;
                u[q] = u_p;
                ++q;
                added = true;
            } else {
                for (int k = drop; k + 1 < q; ++k) {
                    active_normals.col(k) = active_normals.col(k + 1);
                    active[k] = active[k + 1];
                    u[k] = u[k + 1];
                }
                --q;
            }
        }
        if (infeasible) break;
    }

    res.iterations = iter;
    for (int j = 0; j < n; ++j) res.x[j] = y[j] * inv_sqrt[j];
    for (int k = 0; k < q; ++k) {
        res.multipliers[active[k]] = std::max(0.0, u[k]);
        res.active.push_back(active[k]);
    }
    std::sort(res.active.begin(), res.active.end());
    return res;
}

double max_violation(int n, const Vector& x, std::span<const Row> rows) {
    double worst = 0.0;
    for (const Row& row : rows) {
        double lhs = 0.0;
        for (int j = 0; j < n; ++j) lhs += row.g[j] * x[j];
        worst = std::max(worst, lhs - row.h);
    }
    return worst;
}

}  // namespace safeyaw::qp
