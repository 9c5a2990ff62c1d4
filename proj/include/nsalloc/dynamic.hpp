// SPDX-License-Identifier: Apache-2.0
//
// Sample-by-sample allocation under position and rate limits. Each call
// intersects the position window with what the rate limits allow from the
// previous output, runs the constrained allocation, and commits the result.

#pragma once

#include "nsalloc/allocator.hpp"

namespace nsalloc {

struct ActuatorLimits {
    Vector pos_min;
    Vector pos_max;
    Vector rate_min;  // signed, per second (lower rates negative)
    Vector rate_max;
};

void validate_limits(const ActuatorLimits& limits, int m);

struct AllocatorState {
    Vector u_prev;
    double T = 0.01;  // sample period, seconds
};

// Per-sample box: [max(pos_min, u_prev + T*rate_min),
//                  min(pos_max, u_prev + T*rate_max)].
// Throws ContractViolation if any interval collapses (u_prev outside the
// reachable window, e.g. an inconsistent restart).
Bounds effective_bounds(const ActuatorLimits& limits, const AllocatorState& state);

// One closed-loop sample: allocate within the effective box, then commit
// u_prev on success. State is untouched when allocation throws.
AllocationResult step(const Matrix& B, const Vector& v_desire,
                      const ActuatorLimits& limits, AllocatorState& state,
                      const SolverOptions& options = {});

}  // namespace nsalloc
