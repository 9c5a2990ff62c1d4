// SPDX-License-Identifier: Apache-2.0

#include "nsalloc/infeasible.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace nsalloc {

const char* to_string(InfeasibilityDiagnosis::Condition c) {
    switch (c) {
        case InfeasibilityDiagnosis::Condition::None: return "none";
        case InfeasibilityDiagnosis::Condition::TooManySaturated: return "too_many_saturated";
        case InfeasibilityDiagnosis::Condition::RankDeficientB: return "rank_deficient_b";
        case InfeasibilityDiagnosis::Condition::SingularNS: return "singular_ns";
    }
    return "?";
}

const char* to_string(FreeInverse::Case c) {
    switch (c) {
        case FreeInverse::Case::FullRank: return "full_rank";
        case FreeInverse::Case::LeastSquares: return "least_squares";
        case FreeInverse::Case::Augmented: return "augmented";
    }
    return "?";
}

InfeasibilityDiagnosis diagnose(const Matrix& B, const Matrix& N,
                                const SaturationState& sat,
                                double ns_singular_tol) {
    const int n = static_cast<int>(B.rows());
    const int m = static_cast<int>(B.cols());
    const int k = static_cast<int>(sat.saturated.size());

    const int rank_b = rank_with_tol(B);
    if (rank_b < n)
        return {InfeasibilityDiagnosis::Condition::RankDeficientB,
                "rank " + std::to_string(rank_b) + " < rows " + std::to_string(n)};

    // The saturated rows of the null basis must carry the full step. Their
    // singular values live in [0, 1] (rows of an orthonormal basis), so an
    // absolute cut on the smallest one is the meaningful test; a largest-
    // value-relative tolerance cannot see an exactly-zero row next to O(1)
    // rows.
    const Matrix NS = select_rows(N, sat.saturated);
    const double smin = svd(NS).singular_values.minCoeff();
    if (smin <= ns_singular_tol)
        return {InfeasibilityDiagnosis::Condition::SingularNS,
                "sigma_min(N_S) = " + std::to_string(smin)};

    if (k > m - n)
        return {InfeasibilityDiagnosis::Condition::TooManySaturated,
                "k = " + std::to_string(k) + " > m-n = " + std::to_string(m - n)};

    return {};
}

FreeInverse free_inverse(const Matrix& B_F, int n, int k, int m) {
    const int q = m - k;
    if (B_F.rows() != n || B_F.cols() != q)
        throw ContractViolation("free_inverse: B_F must be n x (m-k)");
    const int r = rank_with_tol(B_F);
    if (r == n) return {pinv_right(B_F), FreeInverse::Case::FullRank};
    if (r == q) return {lsq_inverse(B_F), FreeInverse::Case::LeastSquares};
    return {singular_inverse(B_F), FreeInverse::Case::Augmented};
}

Vector apply_modification(const Vector& u_S, double delta,
                          const SaturationState& sat, const Matrix& B_S,
                          const FreeInverse& free_inv, const Vector& v_desire,
                          const WeightedDistance& wd) {
    const Vector step = saturated_step(sat, wd);
    const Vector uS2 = u_S - step * delta;
    const Vector uF = free_inv.matrix * (v_desire - B_S * uS2);
    Vector u(static_cast<Eigen::Index>(sat.saturated.size() + sat.free_set.size()));
    for (std::size_t i = 0; i < sat.saturated.size(); ++i)
        u(sat.saturated[i]) = uS2(static_cast<Eigen::Index>(i));
    for (std::size_t i = 0; i < sat.free_set.size(); ++i)
        u(sat.free_set[i]) = uF(static_cast<Eigen::Index>(i));
    return u;
}

namespace {

// Refresh delta_bar after the saturated set changed; signs follow the side
// each saturated element currently leans toward.
void rebuild_delta_bar(SaturationState& sat, const WeightedDistance& wd) {
    sat.delta_bar.resize(static_cast<Eigen::Index>(sat.saturated.size()));
    for (std::size_t i = 0; i < sat.saturated.size(); ++i) {
        const int l = sat.saturated[i];
        sat.delta_bar(static_cast<Eigen::Index>(i)) =
            (wd.border(l) - wd.center(l)) > 0.0 ? 1.0 : -1.0;
    }
}

void transfer_to_saturated(SaturationState& sat, int j, const WeightedDistance& wd) {
    sat.saturated.insert(
        std::upper_bound(sat.saturated.begin(), sat.saturated.end(), j), j);
    sat.free_set.erase(std::find(sat.free_set.begin(), sat.free_set.end(), j));
    rebuild_delta_bar(sat, wd);
}

void record_iteration(SolveTrace& trace, const SaturationState& sat,
                      const FreeInverse& inv, const std::map<int, double>& candidates,
                      double delta, int chosen, bool exit_step, const Vector& u,
                      const WeightedDistance& wd) {
    IterationRecord rec;
    rec.number = static_cast<int>(trace.iterations.size()) + 1;
    rec.phase = 'I';
    rec.saturated = sat.saturated;
    rec.pivot = sat.pivot;
    rec.inverse_case = to_string(inv.kind);
    rec.free_inverse = inv.matrix;
    rec.delta_candidates = candidates;
    rec.chosen_delta = delta;
    rec.chosen_index = chosen;
    rec.exit_step = exit_step;
    rec.u_after = u;
    rec.w_after = wd.w;
    trace.iterations.push_back(std::move(rec));
}

}  // namespace

std::optional<int> repair_escaped(Vector& u, SaturationState& sat,
                                  const FreeInverse& free_inv,
                                  const Matrix& B_S, const WeightedDistance& wd) {
    const double wt = wd.w(sat.pivot);
    std::vector<int> escaped;
    for (int j : sat.free_set)
        if (wd.w(j) > wt + 1e-12) escaped.push_back(j);
    if (escaped.empty()) return std::nullopt;

    // Per unit step the saturated side moves by `step`, dragging each free
    // element along through the free inverse; the escaped element needing
    // the largest step to be caught is transferred first.
    const Vector step = saturated_step(sat, wd);
    const Vector drag = free_inv.matrix * (B_S * step);
    int best = -1;
    double best_dp = -std::numeric_limits<double>::infinity();
    for (int j : escaped) {
        const auto jj = static_cast<Eigen::Index>(
            std::find(sat.free_set.begin(), sat.free_set.end(), j) -
            sat.free_set.begin());
        const double hbj = wd.border(j) - wd.center(j);
        const double rate = drag(jj) / hbj;
        const double dp = (std::abs(rate) < 1e-14)
                              ? std::numeric_limits<double>::infinity()
                              : (wd.w(j) - wt) / rate;
        if (dp > best_dp) {
            best_dp = dp;
            best = j;
        }
    }
    // Park the chosen element at the saturated level on its own side and
    // move it into the saturated set.
    u(best) = wt * (wd.border(best) - wd.center(best)) + wd.center(best);
    transfer_to_saturated(sat, best, wd);
    return best;
}

std::optional<double> intersection_infeasible(int j, const SaturationState& sat,
                                              const Vector& u,
                                              const FreeInverse& free_inv,
                                              const Matrix& B_S,
                                              const Vector& v_desire,
                                              const WeightedDistance& wd) {
    (void)v_desire;  // the zero-step re-derived state u already folds it in
    const int t = sat.pivot;
    const double hbt = std::abs(wd.border(t) - wd.center(t));
    const double pivot_rate = 1.0 / hbt;
    const double wt = wd.w(t);
    const double hbj = wd.border(j) - wd.center(j);

    const auto jj = static_cast<Eigen::Index>(
        std::find(sat.free_set.begin(), sat.free_set.end(), j) -
        sat.free_set.begin());
    const Vector step = saturated_step(sat, wd);
    const double drag_j = (free_inv.matrix * (B_S * step))(jj);

    // Free element j moves by +drag_j per unit step here (it is re-derived
    // from what the saturated elements give up), hence the plus sign.
    auto try_border = [&](double hb) -> std::optional<double> {
        const double den = pivot_rate + drag_j / hb;
        if (std::abs(den) <= 1e-14) return std::nullopt;
        const double wj = (u(j) - wd.center(j)) / hb;
        const double dj = (wt - wj) / den;
        if (dj > -1e-12 && (wt - dj * pivot_rate) > 0.0) return std::max(dj, 0.0);
        return std::nullopt;
    };
    if (auto dj = try_border(hbj)) return dj;
    return try_border(-hbj);
}

AllocationResult allocate_infeasible(const Matrix& B, const Vector& v_desire,
                                     const Bounds& bounds, SaturationState sat,
                                     Vector u, SolveTrace& trace,
                                     const SolverOptions& options) {
    const int n = static_cast<int>(B.rows());
    const int m = static_cast<int>(B.cols());

    for (int trip = 0; trip < 2 * m + 6; ++trip) {
        WeightedDistance wd = weighted_distance(u, bounds);
        if (sat.free_set.empty()) {
            // Everything saturated: the best in-bounds point is the border
            // itself (terminal projection, not a counted walk step).
            u = wd.border;
            wd = weighted_distance(u, bounds);
            record_iteration(trace, sat, FreeInverse{}, {}, 0.0, -1, true, u, wd);
            return finish_result(B, v_desire, bounds, u, trace);
        }

        const Matrix B_F = select_columns(B, sat.free_set);
        const Matrix B_S = select_columns(B, sat.saturated);
        const int k = static_cast<int>(sat.saturated.size());
        const FreeInverse inv = free_inverse(B_F, n, k, m);
        const Vector u_S = select(u, sat.saturated);

        // Zero-step re-derivation of the free side; escapes are judged and
        // intersections measured from this state.
        Vector u0 = apply_modification(u_S, 0.0, sat, B_S, inv, v_desire, wd);
        WeightedDistance wd0 = weighted_distance(u0, bounds);

        if (auto moved = repair_escaped(u0, sat, inv, B_S, wd0)) {
            u = u0;
            trace.escaped.push_back(*moved);
            continue;  // free set changed; rebuild the inverse and re-enter
        }

        std::map<int, double> candidates;
        for (int j : sat.free_set)
            if (auto dj = intersection_infeasible(j, sat, u0, inv, B_S, v_desire, wd0))
                candidates[j] = *dj;

        const double hbt = std::abs(wd0.border(sat.pivot) - wd0.center(sat.pivot));
        const double wt = wd0.w(sat.pivot);
        int jstar = -1;
        double dmin = 0.0;
        for (const auto& [j, dj] : candidates) {
            if (jstar < 0 || dj < dmin) {
                jstar = j;
                dmin = dj;
            }
        }

        if (jstar >= 0 && (wt - dmin / hbt) > 1.0 + options.strict_tol) {
            // Saturated side still out of bounds when jstar catches it:
            // take the step, absorb jstar, keep walking.
            u = apply_modification(u_S, dmin, sat, B_S, inv, v_desire, wd0);
            WeightedDistance wdn = weighted_distance(u, bounds);
            ++trace.infeasible_iterations;
            record_iteration(trace, sat, inv, candidates, dmin, jstar, false, u, wdn);
            if (trace.feasible_iterations + trace.infeasible_iterations > m)
                throw NumericalError("infeasible walk: modification budget exceeded");
            transfer_to_saturated(sat, jstar, wdn);
            continue;
        }

        // Exit step: park the saturated elements exactly on their borders
        // and re-derive the free side one last time.
        const double dexit = std::abs(u0(sat.pivot) - wd0.border(sat.pivot));
        u = apply_modification(u_S, dexit, sat, B_S, inv, v_desire, wd0);
        WeightedDistance wdn = weighted_distance(u, bounds);
        ++trace.infeasible_iterations;
        record_iteration(trace, sat, inv, candidates, dexit, -1, true, u, wdn);
        if (trace.feasible_iterations + trace.infeasible_iterations > m)
            throw NumericalError("infeasible walk: modification budget exceeded");
        return finish_result(B, v_desire, bounds, u, trace);
    }
    throw NumericalError("infeasible walk: no exit within the trip budget");
}

}  // namespace nsalloc
