// SPDX-License-Identifier: Apache-2.0
//
// Problem/result types and the top-level dispatch: pseudo-inverse start,
// feasible null-space walk, and handoff to the minimum-residual walk when a
// diagnosis trips. See feasible.hpp / infeasible.hpp for the two phases.

#pragma once

#include "nsalloc/geometry.hpp"
#include "nsalloc/trace.hpp"

namespace nsalloc {

struct AllocationProblem {
    Matrix B;        // n x m effectiveness matrix, m > n
    Bounds bounds;   // length-m position limits
    Vector v_desire; // length-n desired virtual control
};

enum class Feasibility { Feasible, Infeasible };

struct AllocationResult {
    Vector u;                    // allocated input vector, within bounds
    Vector w;                    // weighted distances of u
    double residual = 0.0;       // ||v_desire - B*u||_2
    Feasibility classification = Feasibility::Feasible;
    int iterations_feasible = 0;
    int iterations_infeasible = 0;
    SolveTrace trace;

    int iterations() const { return iterations_feasible + iterations_infeasible; }
};

struct SolverOptions {
    double tie_tol = 1e-9;          // relative tie window for the saturated set
    double strict_tol = 1e-9;       // slack on the "pivot still out of bounds" test
    double ns_singular_tol = 1e-12; // absolute smallest-singular-value cut for
                                    // the null-basis row submatrix (its singular
                                    // values live in [0, 1], so absolute is right)
};

const char* to_string(Feasibility f);

// Assemble a classified result from a finished walk state: recomputes w and
// the residual and copies the recorder in. Classification is Feasible when
// the returned u demonstrates attainability:
// residual <= 1e-8 * max(1, ||v_desire||).
AllocationResult finish_result(const Matrix& B, const Vector& v_desire,
                               const Bounds& bounds, const Vector& u,
                               const SolveTrace& trace);

// Full dispatch. Validates the problem, picks the start (right pseudo-inverse,
// or the augmented generalized inverse when B itself is rank-deficient), runs
// the feasible walk, and routes to the infeasible walk on diagnosis.
AllocationResult allocate(const AllocationProblem& problem,
                          const SolverOptions& options = {});

}  // namespace nsalloc
