// SPDX-License-Identifier: Apache-2.0
//
// The embedded worked example: a 3x5 allocation with two equal effectiveness
// columns that walks through the feasible phase, a singular hand-off, both
// reduced-inverse kinds, and an infeasible exit. Ships with its expected
// intermediate values so the walk can be audited end to end.

#pragma once

#include <string>
#include <vector>

#include "nsalloc/allocator.hpp"

namespace nsalloc {

AllocationProblem reference_problem();

struct CheckOutcome {
    bool ok = true;
    std::string first_divergence;    // empty when ok
    std::vector<std::string> notes;  // commentary on expected values
};

// Compares a solve of reference_problem() against the embedded expectation
// table at 1e-3 absolute. perturb_final shifts the expected final u(1) to
// let tests prove the check can fail.
CheckOutcome check_reference(const AllocationResult& result,
                             double perturb_final = 0.0);

// Human-readable walk trace, 6 significant digits, elements numbered from 1.
std::string render_trace_text(const AllocationProblem& problem,
                              const AllocationResult& result);

}  // namespace nsalloc
