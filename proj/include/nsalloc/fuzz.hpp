// SPDX-License-Identifier: Apache-2.0
//
// Seeded random-instance audit for the allocator: invariant checks on every
// case, optional comparison against the enumeration oracle. Deterministic
// for a fixed configuration; each case draws from its own seed so offending
// instances can be replayed in isolation.

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "nsalloc/allocator.hpp"

namespace nsalloc {

struct FuzzConfig {
    int count = 1000;
    std::uint64_t seed = 42;
    int fixed_n = 0;  // 0 = draw n from [3, 7]
    int fixed_m = 0;  // 0 = draw m from [n+1, 8]
    bool with_oracle = false;
};

struct FuzzReport {
    FuzzConfig config;
    int cases = 0;
    int classified_feasible = 0;
    int classified_infeasible = 0;
    int engineered_feasible = 0;
    int duplicated_columns = 0;

    int solver_errors = 0;
    int bounds_violations = 0;
    int budget_violations = 0;
    int rate_violations = 0;  // only populated by callers that audit rates
    double max_bound_excess = 0.0;  // max over cases of max(w) - 1, clamped at 0

    // max absolute ||B u - v|| over cases classified feasible
    double max_feasible_residual = 0.0;

    int oracle_cases = 0;
    int exactness_misses = 0;   // oracle found an exact solution, walk did not
    int misses_small_active = 0;  // subset of the above with active set <= m-n
    int norm_gaps_over_tol = 0; // both exact, small oracle active set, gap > 1e-6
    double max_norm_gap = 0.0;
    int clip_regressions = 0;   // walk residual worse than clipped start + 1e-9
    double max_clip_excess = 0.0;
    double max_residual_gap = 0.0;  // walk residual minus oracle residual

    // Per-case seeds that violated a hard invariant (replay: --count 1 --seed s)
    std::vector<std::uint64_t> offending_seeds;

    bool invariants_ok() const {
        return solver_errors == 0 && bounds_violations == 0 &&
               budget_violations == 0;
    }
    std::string summary() const;
};

// Seed for case i of a run; exposed so reports stay replayable.
std::uint64_t case_seed(const FuzzConfig& config, int index);

struct FuzzCase {
    AllocationProblem problem;
    bool engineered_feasible = false;
    bool duplicated_column = false;
};

FuzzCase generate_case(std::uint64_t seed, int fixed_n, int fixed_m);

FuzzReport run_fuzz(const FuzzConfig& config);

}  // namespace nsalloc
