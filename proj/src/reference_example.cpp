// SPDX-License-Identifier: Apache-2.0

#include "nsalloc/reference_example.hpp"

#include <cmath>
#include <cstdio>
#include <map>
#include <sstream>

namespace nsalloc {

AllocationProblem reference_problem() {
    Matrix B(3, 5);
    B << 1, 1, 1, 1, 1,
         1, 1, 1, 0, 0,
         1, 0, 0, 0, 0;
    Vector u_min(5), u_max(5), v(3);
    u_min << -1, 0.2, -1, -0.4, -0.2;
    u_max << 1.2, 1, 0, 0.6, 0.1;
    v << 1.4, 1, -1;
    return {B, Bounds{u_min, u_max}, v};
}

namespace {

constexpr double kTol = 1e-3;

Vector vec5(double a, double b, double c, double d, double e) {
    Vector v(5);
    v << a, b, c, d, e;
    return v;
}

std::string fmt(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", x);
    return buf;
}

std::string fmt_vec(const Vector& v) {
    std::string s = "(";
    for (Eigen::Index i = 0; i < v.size(); ++i)
        s += (i ? ", " : "") + fmt(v(i));
    return s + ")";
}

struct Checker {
    CheckOutcome out;

    bool close(double a, double b) const { return std::abs(a - b) <= kTol; }

    void mismatch(const std::string& what, const std::string& expected,
                  const std::string& got) {
        if (!out.ok) return;
        out.ok = false;
        out.first_divergence = what + ": expected " + expected + ", got " + got;
    }

    void value(const std::string& what, double expected, double got) {
        if (!close(expected, got)) mismatch(what, fmt(expected), fmt(got));
    }

    void vector(const std::string& what, const Vector& expected, const Vector& got) {
        if (expected.size() != got.size() ||
            (expected - got).cwiseAbs().maxCoeff() > kTol)
            mismatch(what, fmt_vec(expected), fmt_vec(got));
    }

    void matrix(const std::string& what, const Matrix& expected, const Matrix& got) {
        if (expected.rows() != got.rows() || expected.cols() != got.cols() ||
            (expected - got).cwiseAbs().maxCoeff() > kTol)
            mismatch(what, "a " + std::to_string(expected.rows()) + "x" +
                               std::to_string(expected.cols()) + " inverse",
                     "different values");
    }

    void candidates(const std::string& what, const std::map<int, double>& expected,
                    const std::map<int, double>& got) {
        if (expected.size() != got.size()) {
            mismatch(what, std::to_string(expected.size()) + " candidates",
                     std::to_string(got.size()) + " candidates");
            return;
        }
        for (const auto& [j, dj] : expected) {
            auto it = got.find(j);
            if (it == got.end()) {
                mismatch(what, "candidate at element " + std::to_string(j + 1),
                         "none");
                return;
            }
            value(what + ", element " + std::to_string(j + 1), dj, it->second);
        }
    }
};

}  // namespace

CheckOutcome check_reference(const AllocationResult& result, double perturb_final) {
    Checker ck;

    ck.vector("initial u", vec5(-1, 1, 1, 0.2, 0.2), result.trace.u_initial);
    ck.vector("initial w", vec5(1, 1, 3, 0.2, 1.667), result.trace.w_initial);

    const auto& iters = result.trace.iterations;
    if (iters.size() != 4) {
        ck.mismatch("iteration count", "4", std::to_string(iters.size()));
        return ck.out;
    }

    // Iteration 1: feasible redistribution away from element 3.
    ck.candidates("step-1 intersections",
                  {{0, 1.0}, {1, 0.444}, {3, 1.4}, {4, 0.667}},
                  iters[0].delta_candidates);
    ck.value("step-1 delta", 0.444, iters[0].chosen_delta);
    ck.vector("u after step 1", vec5(-1, 1.444, 0.556, 0.2, 0.2), iters[0].u_after);
    if (iters[0].phase != 'F')
        ck.mismatch("step-1 phase", "feasible", "infeasible");

    // Hand-off: elements 2 and 3 saturate together and their null-space
    // block is singular (equal effectiveness columns).
    if (result.trace.handoff_saturated != std::vector<int>{1, 2})
        ck.mismatch("hand-off saturated set", "{2, 3}", "different");
    if (result.trace.handoff.find("singular") == std::string::npos)
        ck.mismatch("hand-off reason", "singular saturated null block",
                    result.trace.handoff.empty() ? "none" : result.trace.handoff);

    // Iteration 2: rank-repaired (augmented) inverse of the free block.
    Matrix aug(3, 3);
    aug << 0, 0.5, 0.5,
           0.5, -0.25, -0.25,
           0.5, -0.25, -0.25;
    if (iters[1].inverse_case != "augmented")
        ck.mismatch("step-2 inverse kind", "augmented", iters[1].inverse_case);
    ck.matrix("step-2 free inverse", aug, iters[1].free_inverse);
    ck.candidates("step-2 intersections", {{0, 0.940}, {3, 0.659}, {4, 0.088}},
                  iters[1].delta_candidates);
    ck.value("step-2 delta", 0.088, iters[1].chosen_delta);
    ck.vector("u after step 2", vec5(-0.92, 1.373, 0.467, 0.24, 0.24),
              iters[1].u_after);
    // First entry follows from u(1) = -0.92 directly:
    // (-0.92 - 0.1)/(-1 - 0.1) = 0.9273. A circulated 0.972 for this entry
    // transposes the digits and contradicts the u it is paired with.
    ck.vector("w after step 2", vec5(0.9273, 1.933, 1.933, 0.28, 1.933),
              iters[1].w_after);
    ck.out.notes.push_back(
        "w(1) after step 2 is checked as 0.9273 = (-0.92 - 0.1)/(-1 - 0.1); "
        "the sometimes-quoted 0.972 is a digit transposition inconsistent "
        "with u(1) = -0.92.");

    // Iteration 3: least-squares inverse once four elements are pinned.
    Matrix lsq(2, 3);
    lsq << 0, 0.5, 0.5,
           1, -0.5, -0.5;
    if (iters[2].inverse_case != "least_squares")
        ck.mismatch("step-3 inverse kind", "least_squares", iters[2].inverse_case);
    ck.matrix("step-3 free inverse", lsq, iters[2].free_inverse);
    ck.value("step-3 delta", 0.376, iters[2].chosen_delta);
    ck.vector("u after step 3", vec5(-0.581, 1.072, 0.091, 0.691, 0.127),
              iters[2].u_after);
    ck.vector("w after step 3", vec5(0.62, 1.182, 1.182, 1.182, 1.182),
              iters[2].w_after);

    // Iteration 4: exit step parks the saturated elements on their borders.
    if (!iters[3].exit_step)
        ck.mismatch("step-4 kind", "exit step", "regular step");
    ck.value("final delta", 0.0909, iters[3].chosen_delta);
    ck.vector("final u", vec5(-0.433 + perturb_final, 1, 0, 0.6, 0.1),
              iters[3].u_after);

    if (result.classification != Feasibility::Infeasible)
        ck.mismatch("classification", "infeasible", "feasible");
    if (result.iterations_feasible != 1)
        ck.mismatch("feasible step count", "1",
                    std::to_string(result.iterations_feasible));
    if (result.iterations_infeasible != 3)
        ck.mismatch("infeasible step count", "3",
                    std::to_string(result.iterations_infeasible));
    return ck.out;
}

std::string render_trace_text(const AllocationProblem& problem,
                              const AllocationResult& result) {
    std::ostringstream os;
    const int n = static_cast<int>(problem.B.rows());
    const int m = static_cast<int>(problem.B.cols());
    os << "problem: " << n << "x" << m << " effectiveness matrix, " << m
       << " elements\n";
    os << "v_desire = " << fmt_vec(problem.v_desire) << "\n\n";
    os << "initial u = " << fmt_vec(result.trace.u_initial) << "\n";
    os << "initial w = " << fmt_vec(result.trace.w_initial) << "\n";

    for (const auto& it : result.trace.iterations) {
        os << "\nstep " << it.number << " ["
           << (it.phase == 'F' ? "feasible" : "infeasible") << "] S = {";
        for (std::size_t i = 0; i < it.saturated.size(); ++i)
            os << (i ? ", " : "") << it.saturated[i] + 1;
        os << "}, pivot " << it.pivot + 1;
        if (!it.inverse_case.empty()) os << ", inverse: " << it.inverse_case;
        os << "\n";
        if (!it.delta_candidates.empty()) {
            os << "  delta candidates:";
            for (const auto& [j, dj] : it.delta_candidates)
                os << " j=" << j + 1 << ": " << fmt(dj);
            os << "\n";
        }
        if (it.exit_step)
            os << "  exit delta = " << fmt(it.chosen_delta) << "\n";
        else
            os << "  chosen delta = " << fmt(it.chosen_delta) << " (element "
               << it.chosen_index + 1 << ")\n";
        os << "  u = " << fmt_vec(it.u_after) << "\n";
        os << "  w = " << fmt_vec(it.w_after) << "\n";
    }

    if (!result.trace.handoff.empty())
        os << "\nhand-off to infeasible walk: " << result.trace.handoff << "\n";
    for (int j : result.trace.escaped)
        os << "escape repair: element " << j + 1 << " pinned at the saturated level\n";

    os << "\nclassification: " << to_string(result.classification) << "\n";
    os << "residual = " << fmt(result.residual) << "\n";
    os << "steps: " << result.iterations_feasible << " feasible + "
       << result.iterations_infeasible << " infeasible\n";
    os << "final u = " << fmt_vec(result.u) << "\n";
    os << "final w = " << fmt_vec(result.w) << "\n";
    return os.str();
}

}  // namespace nsalloc
