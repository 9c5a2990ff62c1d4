// SPDX-License-Identifier: Apache-2.0
//
// Caller-owned iteration recorder. Every modification the solver applies is
// appended here with the quantities the walk derived it from; this is the
// comparison surface for the golden worked-example checks.

#pragma once

#include <map>
#include <string>
#include <vector>

#include "nsalloc/linalg.hpp"

namespace nsalloc {

struct IterationRecord {
    int number = 0;       // 1-based, counted across both phases
    char phase = 'F';     // 'F' feasible walk, 'I' infeasible walk
    std::vector<int> saturated;            // S before the modification (0-based)
    int pivot = -1;                        // 0-based
    std::string inverse_case;              // "", "full_rank", "least_squares", "augmented"
    Matrix free_inverse;                   // empty in the feasible phase
    std::map<int, double> delta_candidates;  // free index (0-based) -> intersection
    double chosen_delta = 0.0;
    int chosen_index = -1;                 // free element that joins S; -1 on exit step
    bool exit_step = false;                // true when this step parked S on its borders
    Vector u_after;
    Vector w_after;
};

struct SolveTrace {
    Vector u_initial;
    Vector w_initial;
    std::string handoff;  // empty, or the diagnosis that routed to the infeasible walk
    std::vector<int> handoff_saturated;      // S at handoff time (0-based)
    std::vector<int> escaped;                // elements transferred by escape repair
    std::vector<IterationRecord> iterations;
    int feasible_iterations = 0;
    int infeasible_iterations = 0;
};

}  // namespace nsalloc
