// SPDX-License-Identifier: Apache-2.0

#include "nsalloc/allocator.hpp"

#include <cmath>
#include <stdexcept>
#include <variant>

#include "nsalloc/feasible.hpp"
#include "nsalloc/infeasible.hpp"

namespace nsalloc {

const char* to_string(Feasibility f) {
    return f == Feasibility::Feasible ? "feasible" : "infeasible";
}

AllocationResult finish_result(const Matrix& B, const Vector& v_desire,
                               const Bounds& bounds, const Vector& u,
                               const SolveTrace& trace) {
    AllocationResult res;
    res.u = u;
    res.w = weighted_distance(u, bounds).w;
    res.residual = (B * u - v_desire).norm();
    const double scale = std::max(1.0, v_desire.norm());
    res.classification = res.residual <= 1e-8 * scale ? Feasibility::Feasible
                                                      : Feasibility::Infeasible;
    res.iterations_feasible = trace.feasible_iterations;
    res.iterations_infeasible = trace.infeasible_iterations;
    res.trace = trace;
    return res;
}

AllocationResult allocate(const AllocationProblem& problem,
                          const SolverOptions& options) {
    const Matrix& B = problem.B;
    const Vector& v = problem.v_desire;
    const int n = static_cast<int>(B.rows());
    const int m = static_cast<int>(B.cols());

    if (n < 1 || m <= n)
        throw std::invalid_argument("allocate: need a wide matrix (cols > rows >= 1)");
    if (!B.allFinite() || !v.allFinite())
        throw std::invalid_argument("allocate: non-finite input");
    if (v.size() != n)
        throw std::invalid_argument("allocate: v_desire length must match rows of B");
    validate_bounds(problem.bounds, m);

    if (rank_with_tol(B) < n) {
        // No exact pseudo-inverse start exists; open with the rank-repaired
        // inverse and hand straight to the constrained walk.
        const Matrix G = singular_inverse(B);
        Vector u = G * v;
        SolveTrace trace;
        trace.u_initial = u;
        WeightedDistance wd = weighted_distance(u, problem.bounds);
        trace.w_initial = wd.w;
        if (wd.w.maxCoeff() <= 1.0 + options.strict_tol)
            return finish_result(B, v, problem.bounds, u, trace);
        SaturationState sat = saturated_set(wd, options.tie_tol);
        trace.handoff = "rank-deficient effectiveness matrix";
        trace.handoff_saturated = sat.saturated;
        return allocate_infeasible(B, v, problem.bounds, sat, u, trace, options);
    }

    const Matrix B_pinv = pinv_right(B);
    const Matrix N = null_space(B);
    SolveTrace trace;
    auto outcome = allocate_feasible(B, B_pinv, N, v, problem.bounds, trace, options);
    if (auto* done = std::get_if<AllocationResult>(&outcome)) return *done;
    auto& handoff = std::get<InfeasibleHandoff>(outcome);
    return allocate_infeasible(B, v, problem.bounds, handoff.sat, handoff.u,
                               trace, options);
}

}  // namespace nsalloc
