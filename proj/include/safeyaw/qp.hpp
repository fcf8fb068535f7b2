// Small dense strictly convex QP with a diagonal Hessian:
//
//   minimize    1/2 x' D x
//   subject to  g_i' x <= h_i,   i = 1..m
//
// solved with the Goldfarb-Idnani dual active-set method. Decision vectors are
// at most kMaxDim long and live on the stack.
#pragma once

#include <array>
#include <span>
#include <vector>

namespace safeyaw::qp {

inline constexpr int kMaxDim = 6;

using Vector = std::array<double, kMaxDim>;

struct Row {
    Vector g{};
    double h = 0.0;
};

enum class Status { Optimal, Infeasible, IterationLimit };

struct Result {
    Status status = Status::Optimal;
    Vector x{};
    std::vector<double> multipliers;  ///< one per row, >= 0
    std::vector<int> active;          ///< indices of active rows
    int iterations = 0;
};

/// Solves the QP above for a problem of dimension n (1..kMaxDim).
/// `diag` holds the n positive Hessian diagonal entries.
Result solve_diagonal(int n, std::span<const double> diag, std::span<const Row> rows);

/// Largest violation max(0, g'x - h) over all rows.
double max_violation(int n, const Vector& x, std::span<const Row> rows);

}  // namespace safeyaw::qp
