// SPDX-License-Identifier: Apache-2.0
//
// Brute-force reference solver: enumerate every saturation pattern and keep
// the best bounded solution. Exponential in the input width, so it is only
// meant for checking the fast walk on small problems.

#pragma once

#include <utility>
#include <vector>

#include "nsalloc/allocator.hpp"

namespace nsalloc {

struct OracleSolution {
    Vector u;
    double objective = 0.0;  // residual if infeasible, ||u|| if feasible
    // (index, side) pairs; side is -1 for the lower border, +1 for the upper
    std::vector<std::pair<int, int>> active_set;
    Feasibility status = Feasibility::Infeasible;
};

// Enumerates the 3^m patterns {free, min, max} per element, solves the free
// block by min-norm least squares, and keeps the best bounded candidate:
// any feasible one beats every infeasible one; feasible ties break toward
// the smaller norm, infeasible toward the smaller residual. Width capped at
// 8 elements.
OracleSolution solve_exact(const Matrix& B, const Vector& v_desire,
                           const Bounds& bounds);

}  // namespace nsalloc
