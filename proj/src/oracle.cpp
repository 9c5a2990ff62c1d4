// SPDX-License-Identifier: Apache-2.0

#include "nsalloc/oracle.hpp"

#include <Eigen/QR>

#include <cmath>

namespace nsalloc {

namespace {

constexpr double kBoundSlack = 1e-9;
constexpr double kFeasibleResidual = 1e-9;
constexpr double kNormWindow = 1e-12;

bool within_bounds(const Vector& u, const Bounds& b) {
    for (Eigen::Index i = 0; i < u.size(); ++i)
        if (u(i) < b.u_min(i) - kBoundSlack || u(i) > b.u_max(i) + kBoundSlack)
            return false;
    return true;
}

}  // namespace

OracleSolution solve_exact(const Matrix& B, const Vector& v_desire,
                           const Bounds& bounds) {
    const int n = static_cast<int>(B.rows());
    const int m = static_cast<int>(B.cols());
    if (m > 8)
        throw ContractViolation("solve_exact: enumeration capped at 8 elements");
    if (v_desire.size() != n) throw ContractViolation("solve_exact: size mismatch");
    validate_bounds(bounds, m);

    long total = 1;
    for (int i = 0; i < m; ++i) total *= 3;

    bool have = false;
    OracleSolution best;
    std::vector<int> code(static_cast<std::size_t>(m));

    for (long pattern = 0; pattern < total; ++pattern) {
        // Base-3 digits, most significant first, so patterns come out in
        // lexicographic order and ties resolve deterministically.
        long rest = pattern;
        for (int i = m - 1; i >= 0; --i) {
            code[static_cast<std::size_t>(i)] = static_cast<int>(rest % 3);
            rest /= 3;
        }

        Vector u = Vector::Zero(m);
        std::vector<int> free_idx;
        Vector v_rem = v_desire;
        for (int i = 0; i < m; ++i) {
            if (code[static_cast<std::size_t>(i)] == 0) {
                free_idx.push_back(i);
            } else {
                const double val = code[static_cast<std::size_t>(i)] == 1
                                       ? bounds.u_min(i)
                                       : bounds.u_max(i);
                u(i) = val;
                v_rem -= B.col(i) * val;
            }
        }

        if (!free_idx.empty()) {
            Matrix B_free(n, static_cast<Eigen::Index>(free_idx.size()));
            for (std::size_t c = 0; c < free_idx.size(); ++c)
                B_free.col(static_cast<Eigen::Index>(c)) = B.col(free_idx[c]);
            // Min-norm least squares, rank-safe for any free block shape.
            Eigen::CompleteOrthogonalDecomposition<Matrix> cod(B_free);
            const Vector u_free = cod.solve(v_rem);
            for (std::size_t c = 0; c < free_idx.size(); ++c)
                u(free_idx[c]) = u_free(static_cast<Eigen::Index>(c));
        }

        if (!within_bounds(u, bounds)) continue;

        const double residual = (B * u - v_desire).norm();
        const bool feasible = residual <= kFeasibleResidual;

        bool better = false;
        if (!have) {
            better = true;
        } else if (feasible && best.status == Feasibility::Infeasible) {
            better = true;
        } else if (feasible && best.status == Feasibility::Feasible) {
            better = u.squaredNorm() < best.u.squaredNorm() - kNormWindow;
        } else if (!feasible && best.status == Feasibility::Infeasible) {
            if (residual < best.objective - kNormWindow)
                better = true;
            else if (residual <= best.objective + kNormWindow)
                better = u.squaredNorm() < best.u.squaredNorm() - kNormWindow;
        }
        if (!better) continue;

        have = true;
        best.u = u;
        best.status = feasible ? Feasibility::Feasible : Feasibility::Infeasible;
        best.objective = feasible ? u.norm() : residual;
        best.active_set.clear();
        for (int i = 0; i < m; ++i)
            if (code[static_cast<std::size_t>(i)] != 0)
                best.active_set.emplace_back(
                    i, code[static_cast<std::size_t>(i)] == 1 ? -1 : +1);
    }

    if (!have)
        throw NumericalError("solve_exact: no bounded candidate found");
    return best;
}

}  // namespace nsalloc
