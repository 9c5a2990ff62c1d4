// SPDX-License-Identifier: Apache-2.0

#include "nsalloc/feasible.hpp"

#include <algorithm>
#include <cmath>

namespace nsalloc {

Vector reduction_direction(const Matrix& N, const SaturationState& sat,
                           const WeightedDistance& wd) {
    const Matrix NS = select_rows(N, sat.saturated);
    const int k = static_cast<int>(sat.saturated.size());
    if (rank_with_tol(NS) < k)
        throw SingularMatrixError(
            "reduction_direction: saturated rows of the null basis are rank-deficient");
    const Vector step = saturated_step(sat, wd);
    const Matrix gram = NS * NS.transpose();
    // Interpolant: restricted to the saturated rows it reproduces `step`
    // exactly, and it lies in the null space, so B*u is untouched.
    return N * (NS.transpose() * gram.ldlt().solve(step));
}

std::optional<double> intersection_feasible(int j, const SaturationState& sat,
                                            const Vector& u,
                                            const Vector& u_reduction,
                                            const WeightedDistance& wd) {
    const int t = sat.pivot;
    const double hbt = std::abs(wd.border(t) - wd.center(t));
    const double pivot_rate = 1.0 / hbt;
    const double wt = wd.w(t);
    const double hbj = wd.border(j) - wd.center(j);

    // Free element j moves by -u_reduction_j per unit step; its weighted
    // distance is measured toward the border given by the sign of hb. When
    // the raw value is invalid, retry once with the opposite border.
    auto try_border = [&](double hb) -> std::optional<double> {
        const double den = pivot_rate - u_reduction(j) / hb;
        if (std::abs(den) <= 1e-14) return std::nullopt;
        const double wj = (u(j) - wd.center(j)) / hb;
        const double dj = (wt - wj) / den;
        if (dj > -1e-12 && (wt - dj * pivot_rate) > 0.0) return std::max(dj, 0.0);
        return std::nullopt;
    };
    if (auto dj = try_border(hbj)) return dj;
    return try_border(-hbj);
}

namespace {

void record_iteration(SolveTrace& trace, char phase, const SaturationState& sat,
                      const std::map<int, double>& candidates, double delta,
                      int chosen, bool exit_step, const Vector& u,
                      const WeightedDistance& wd) {
    IterationRecord rec;
    rec.number = static_cast<int>(trace.iterations.size()) + 1;
    rec.phase = phase;
    rec.saturated = sat.saturated;
    rec.pivot = sat.pivot;
    rec.delta_candidates = candidates;
    rec.chosen_delta = delta;
    rec.chosen_index = chosen;
    rec.exit_step = exit_step;
    rec.u_after = u;
    rec.w_after = wd.w;
    trace.iterations.push_back(std::move(rec));
}

}  // namespace

std::variant<AllocationResult, InfeasibleHandoff> allocate_feasible(
    const Matrix& B, const Matrix& B_pinv, const Matrix& N,
    const Vector& v_desire, const Bounds& bounds, SolveTrace& trace,
    const SolverOptions& options) {
    const int n = static_cast<int>(B.rows());
    const int m = static_cast<int>(B.cols());
    const int budget = m - n;

    Vector u = B_pinv * v_desire;
    WeightedDistance wd = weighted_distance(u, bounds);
    trace.u_initial = u;
    trace.w_initial = wd.w;
    if (wd.w.maxCoeff() <= 1.0 + options.strict_tol)
        return finish_result(B, v_desire, bounds, u, trace);

    int sticky_pivot = -1;
    for (int trip = 0; trip < budget + 2; ++trip) {
        SaturationState sat = saturated_set(wd, options.tie_tol);
        // The pivot stays on the element that saturated first as long as it
        // remains saturated; the traced step lengths are referenced to it.
        if (sticky_pivot >= 0 &&
            std::binary_search(sat.saturated.begin(), sat.saturated.end(), sticky_pivot))
            sat.pivot = sticky_pivot;
        sticky_pivot = sat.pivot;

        const InfeasibilityDiagnosis diag =
            diagnose(B, N, sat, options.ns_singular_tol);
        if (diag.condition != InfeasibilityDiagnosis::Condition::None) {
            trace.handoff = std::string(to_string(diag.condition)) +
                            (diag.detail.empty() ? "" : ": " + diag.detail);
            trace.handoff_saturated = sat.saturated;
            return InfeasibleHandoff{diag, sat, u};
        }

        const Vector u_red = reduction_direction(N, sat, wd);
        std::map<int, double> candidates;
        for (int j : sat.free_set)
            if (auto dj = intersection_feasible(j, sat, u, u_red, wd))
                candidates[j] = *dj;

        const double hbt = std::abs(wd.border(sat.pivot) - wd.center(sat.pivot));
        const double wt = wd.w(sat.pivot);
        int jstar = -1;
        double dmin = 0.0;
        for (const auto& [j, dj] : candidates) {
            if (jstar < 0 || dj < dmin) {
                jstar = j;
                dmin = dj;
            }
        }

        if (jstar >= 0 && (wt - dmin / hbt) > 1.0 + options.strict_tol) {
            // Pivot is still out of bounds once element jstar catches the
            // saturated level: take that step and keep walking.
            u -= u_red * dmin;
            wd = weighted_distance(u, bounds);
            ++trace.feasible_iterations;
            record_iteration(trace, 'F', sat, candidates, dmin, jstar, false, u, wd);
            if (trace.feasible_iterations > budget)
                throw NumericalError("feasible walk: modification budget exceeded");
            continue;
        }

        // Exit step: the length that parks every saturated element exactly
        // on its border (no overshoot past the limits, no needless margin).
        const double dexit = std::abs(u(sat.pivot) - wd.border(sat.pivot));
        u -= u_red * dexit;
        wd = weighted_distance(u, bounds);
        ++trace.feasible_iterations;
        record_iteration(trace, 'F', sat, candidates, dexit, -1, true, u, wd);
        if (trace.feasible_iterations > budget)
            throw NumericalError("feasible walk: modification budget exceeded");
        return finish_result(B, v_desire, bounds, u, trace);
    }
    throw NumericalError("feasible walk: no exit within the trip budget");
}

}  // namespace nsalloc
