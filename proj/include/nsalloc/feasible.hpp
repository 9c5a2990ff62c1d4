// SPDX-License-Identifier: Apache-2.0
//
// Feasible-phase walk: starting from the minimum-norm pseudo-inverse
// solution, out-of-bounds elements are pulled back toward their borders
// along null-space directions (so the product B*u never changes) until
// everything is inside its limits or a diagnosis routes the problem to the
// minimum-residual walk.

#pragma once

#include <map>
#include <optional>
#include <variant>

#include "nsalloc/infeasible.hpp"

namespace nsalloc {

struct FeasibleStep {
    Vector u_reduction;                      // full-length correction direction
    std::map<int, double> intersections;     // free index -> catch-up step length
    double chosen_delta = 0.0;
    int chosen_index = -1;
};

// The walk cannot continue; the minimum-residual walk takes over from this
// exact state.
struct InfeasibleHandoff {
    InfeasibilityDiagnosis diagnosis;
    SaturationState sat;
    Vector u;
};

// Null-space interpolant of the saturated step: the unique combination of
// null-basis columns whose restriction to the saturated rows equals the
// half-width-scaled step (so B*u is preserved while the saturated elements
// march toward their borders in lockstep). Requires full-row-rank N_S;
// callers diagnose first, this throws SingularMatrixError as a backstop.
Vector reduction_direction(const Matrix& N, const SaturationState& sat,
                           const WeightedDistance& wd);

// Step length at which free element j's weighted distance catches the
// falling saturated level. Applies the opposite-border retry once when the
// raw value is invalid; nullopt when j cannot catch up at all.
std::optional<double> intersection_feasible(int j, const SaturationState& sat,
                                            const Vector& u,
                                            const Vector& u_reduction,
                                            const WeightedDistance& wd);

// Full feasible walk. Returns the allocation, or the handoff state when a
// diagnosis trips. Modifications are budgeted at m-n; exceeding the budget
// raises NumericalError with the trace intact.
std::variant<AllocationResult, InfeasibleHandoff> allocate_feasible(
    const Matrix& B, const Matrix& B_pinv, const Matrix& N,
    const Vector& v_desire, const Bounds& bounds, SolveTrace& trace,
    const SolverOptions& options = {});

}  // namespace nsalloc
