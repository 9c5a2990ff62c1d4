// SPDX-License-Identifier: Apache-2.0

#include "nsalloc/dynamic.hpp"

#include <stdexcept>
#include <string>

namespace nsalloc {

void validate_limits(const ActuatorLimits& limits, int m) {
    Bounds pos{limits.pos_min, limits.pos_max};
    validate_bounds(pos, m);
    if (limits.rate_min.size() != m || limits.rate_max.size() != m)
        throw std::invalid_argument("limits: rate vectors must have length " +
                                    std::to_string(m));
    if (!limits.rate_min.allFinite() || !limits.rate_max.allFinite())
        throw std::invalid_argument("limits: non-finite rate entry");
    for (int i = 0; i < m; ++i)
        if (limits.rate_min(i) >= 0.0 || limits.rate_max(i) <= 0.0)
            throw std::invalid_argument("limits: element " + std::to_string(i + 1) +
                                        " rate window must straddle zero");
}

Bounds effective_bounds(const ActuatorLimits& limits, const AllocatorState& state) {
    const int m = static_cast<int>(limits.pos_min.size());
    validate_limits(limits, m);
    if (state.u_prev.size() != m)
        throw std::invalid_argument("state: u_prev length mismatch");
    if (!(state.T > 0.0))
        throw std::invalid_argument("state: sample period must be positive");

    Bounds eff;
    eff.u_min = limits.pos_min.cwiseMax(state.u_prev + state.T * limits.rate_min);
    eff.u_max = limits.pos_max.cwiseMin(state.u_prev + state.T * limits.rate_max);
    for (int i = 0; i < m; ++i)
        if (!(eff.u_min(i) < eff.u_max(i)))
            throw ContractViolation("effective bounds collapsed at element " +
                                    std::to_string(i + 1) +
                                    ": previous output outside reachable window");
    return eff;
}

AllocationResult step(const Matrix& B, const Vector& v_desire,
                      const ActuatorLimits& limits, AllocatorState& state,
                      const SolverOptions& options) {
    AllocationProblem problem{B, effective_bounds(limits, state), v_desire};
    AllocationResult res = allocate(problem, options);
    state.u_prev = res.u;  // commit only after a clean solve
    return res;
}

}  // namespace nsalloc
