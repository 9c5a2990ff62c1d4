// SPDX-License-Identifier: Apache-2.0
//
// Minimum-residual walk for unreachable desired vectors and singular cases.
// Saturated elements march toward their borders; free elements are re-derived
// each step through an inverse of the free-column submatrix whose form
// depends on its rank (exact / least-squares / augmented). Free elements
// whose re-derived value escapes above the saturated level are transferred
// into the saturated set before intersections are evaluated.

#pragma once

#include <optional>

#include "nsalloc/allocator.hpp"

namespace nsalloc {

struct InfeasibilityDiagnosis {
    enum class Condition { None, TooManySaturated, RankDeficientB, SingularNS };
    Condition condition = Condition::None;
    std::string detail;
};

const char* to_string(InfeasibilityDiagnosis::Condition c);

struct FreeInverse {
    enum class Case { FullRank, LeastSquares, Augmented };
    Matrix matrix;  // (m-k) x n
    Case kind = Case::FullRank;
};

const char* to_string(FreeInverse::Case c);

// Why (or whether) the feasible walk cannot proceed. Checks, in order:
// rank-deficient B; rank-deficient saturated-row submatrix of the null
// basis (absolute smallest-singular-value cut, see SolverOptions); more
// saturated elements than the null-space dimension.
InfeasibilityDiagnosis diagnose(const Matrix& B, const Matrix& N,
                                const SaturationState& sat,
                                double ns_singular_tol = 1e-12);

// Inverse of B_F (free columns of B, n x (m-k)) picked by rank:
// rank n -> right pseudo-inverse; rank m-k -> least-squares inverse;
// below m-k -> augmented generalized inverse.
FreeInverse free_inverse(const Matrix& B_F, int n, int k, int m);

// One walk step at scalar length delta: saturated elements move by the
// half-width-scaled step, free elements are re-derived from what remains of
// v_desire. Returns the assembled full-length u.
Vector apply_modification(const Vector& u_S, double delta,
                          const SaturationState& sat, const Matrix& B_S,
                          const FreeInverse& free_inv, const Vector& v_desire,
                          const WeightedDistance& wd);

// If any free element's re-derived value (u must already hold the zero-step
// re-derivation) exceeds the saturated level, transfer the one with the
// largest catch-up step length to the saturated set, placed exactly at the
// saturated level on its own side. Returns the transferred element, or
// nullopt when nothing escaped; the caller rebuilds the free inverse and
// re-enters until it returns nullopt.
std::optional<int> repair_escaped(Vector& u, SaturationState& sat,
                                  const FreeInverse& free_inv,
                                  const Matrix& B_S, const WeightedDistance& wd);

// Step length at which free element j's weighted distance meets the falling
// saturated level, measured on the zero-step re-derived state u/wd. Applies
// the opposite-border retry once; nullopt when no valid intersection exists.
std::optional<double> intersection_infeasible(int j, const SaturationState& sat,
                                              const Vector& u,
                                              const FreeInverse& free_inv,
                                              const Matrix& B_S,
                                              const Vector& v_desire,
                                              const WeightedDistance& wd);

// Full minimum-residual walk. Entered from the feasible walk's handoff or
// directly when a diagnosis trips at the first saturation. sat/u are the
// state at entry. Iterations (modifications, both phases combined) are
// budgeted at m; exceeding it raises NumericalError with the trace intact.
AllocationResult allocate_infeasible(const Matrix& B, const Vector& v_desire,
                                     const Bounds& bounds, SaturationState sat,
                                     Vector u, SolveTrace& trace,
                                     const SolverOptions& options = {});

}  // namespace nsalloc
