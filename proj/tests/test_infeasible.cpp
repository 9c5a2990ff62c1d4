// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <cmath>

#include "nsalloc/infeasible.hpp"
#include "nsalloc/reference_example.hpp"

using namespace nsalloc;

namespace {

bool close(const Vector& a, const Vector& b, double tol) {
    return a.size() == b.size() && (a - b).cwiseAbs().maxCoeff() <= tol;
}

bool close_m(const Matrix& a, const Matrix& b, double tol) {
    return a.rows() == b.rows() && a.cols() == b.cols() &&
           (a - b).cwiseAbs().maxCoeff() <= tol;
}

// The worked example at its hand-off point: elements 2 and 3 saturated,
// element 3 is the sticky pivot.
struct Handoff {
    AllocationProblem problem = reference_problem();
    Vector u;
    WeightedDistance wd;
    SaturationState sat;
    Matrix B_S, B_F;

    Handoff() {
        u = Vector(5);
        u << -1, 13.0 / 9.0, 5.0 / 9.0, 0.2, 0.2;  // exact tie at w = 19/9
        wd = weighted_distance(u, problem.bounds);
        sat = saturated_set(wd);
        sat.pivot = 2;
        B_S = select_columns(problem.B, sat.saturated);
        B_F = select_columns(problem.B, sat.free_set);
    }
};

}  // namespace

TEST_CASE("diagnose orders rank deficiency before singular blocks before count") {
    // Rank-deficient effectiveness matrix wins regardless of S.
    Matrix Bdef(3, 5);
    Bdef << 1, 1, 1, 1, 1,
            1, 1, 1, 0, 0,
            2, 2, 2, 0, 0;  // row 3 = 2 * row 2
    SaturationState sat;
    sat.saturated = {0};
    sat.free_set = {1, 2, 3, 4};
    sat.pivot = 0;
    Matrix Nfull = null_space(reference_problem().B);
    const auto d1 = diagnose(Bdef, Nfull, sat);
    CHECK(d1.condition == InfeasibilityDiagnosis::Condition::RankDeficientB);
    CHECK(d1.detail.find("rank") != std::string::npos);

    // Equal effectiveness columns saturated together: singular null block.
    const Handoff h;
    const auto d2 = diagnose(h.problem.B, Nfull, h.sat);
    CHECK(d2.condition == InfeasibilityDiagnosis::Condition::SingularNS);
    CHECK(d2.detail.find("sigma_min") != std::string::npos);

    // Everything saturated on a wide single-axis problem: the null block
    // keeps orthonormal rows (sigma = 1), so only the count fires.
    Matrix B1(1, 3);
    B1 << 1, 0.3, -0.5;
    SaturationState all;
    all.saturated = {0, 1, 2};
    all.free_set = {};
    all.pivot = 0;
    const auto d3 = diagnose(B1, null_space(B1), all);
    CHECK(d3.condition == InfeasibilityDiagnosis::Condition::TooManySaturated);
    CHECK(d3.detail.find("k = 3") != std::string::npos);

    // Healthy state: nothing to report.
    SaturationState one;
    one.saturated = {2};
    one.free_set = {0, 1, 3, 4};
    one.pivot = 2;
    CHECK(diagnose(h.problem.B, Nfull, one).condition ==
          InfeasibilityDiagnosis::Condition::None);
}

TEST_CASE("free_inverse dispatches on the free block's rank") {
    const Matrix B = reference_problem().B;

    // Three independent columns: true right inverse.
    const FreeInverse full = free_inverse(select_columns(B, {0, 1, 3}), 3, 2, 5);
    CHECK(full.kind == FreeInverse::Case::FullRank);
    CHECK((select_columns(B, {0, 1, 3}) * full.matrix - Matrix::Identity(3, 3))
              .cwiseAbs()
              .maxCoeff() <= 1e-12);

    // Tall block, full column rank: least squares.
    const FreeInverse lsq = free_inverse(select_columns(B, {0, 3}), 3, 3, 5);
    CHECK(lsq.kind == FreeInverse::Case::LeastSquares);
    Matrix lsq_expected(2, 3);
    lsq_expected << 0, 0.5, 0.5,
                    1, -0.5, -0.5;
    CHECK(close_m(lsq.matrix, lsq_expected, 1e-12));

    // Singular block: rank-repaired inverse.
    const FreeInverse aug = free_inverse(select_columns(B, {0, 3, 4}), 3, 2, 5);
    CHECK(aug.kind == FreeInverse::Case::Augmented);
    Matrix aug_expected(3, 3);
    aug_expected << 0, 0.5, 0.5,
                    0.5, -0.25, -0.25,
                    0.5, -0.25, -0.25;
    CHECK(close_m(aug.matrix, aug_expected, 1e-12));

    CHECK_THROWS_AS((void)free_inverse(select_columns(B, {0, 3}), 3, 2, 5),
                    ContractViolation);  // shape mismatch (claims k=2, m=5)
}

TEST_CASE("apply_modification rederives the free side from what S gives up") {
    const Handoff h;
    const FreeInverse inv = free_inverse(h.B_F, 3, 2, 5);
    REQUIRE(inv.kind == FreeInverse::Case::Augmented);
    const Vector u_S = select(h.u, h.sat.saturated);

    // Zero step: the free side lands exactly where the walk left it.
    const Vector u0 = apply_modification(u_S, 0.0, h.sat, h.B_S, inv,
                                         h.problem.v_desire, h.wd);
    Vector expected0(5);
    expected0 << -1, 1.444444, 0.5555556, 0.2, 0.2;
    CHECK(close(u0, expected0, 1e-5));

    // The worked example's chosen step.
    const Vector u2 = apply_modification(u_S, 0.0888889, h.sat, h.B_S, inv,
                                         h.problem.v_desire, h.wd);
    Vector expected2(5);
    expected2 << -0.92, 1.373333, 0.4666667, 0.24, 0.24;
    CHECK(close(u2, expected2, 1e-5));
}

TEST_CASE("infeasible intersections reproduce the worked example") {
    const Handoff h;
    const FreeInverse inv = free_inverse(h.B_F, 3, 2, 5);
    const double expected[3] = {0.940, 0.659, 0.088};
    const int elements[3] = {0, 3, 4};
    for (int i = 0; i < 3; ++i) {
        const auto dj = intersection_infeasible(elements[i], h.sat, h.u, inv,
                                                h.B_S, h.problem.v_desire, h.wd);
        REQUIRE(dj.has_value());
        CHECK(*dj == doctest::Approx(expected[i]).epsilon(2e-3));
    }
}

TEST_CASE("repair_escaped is a no-op when no free element overshoots") {
    const Handoff h;
    const FreeInverse inv = free_inverse(h.B_F, 3, 2, 5);
    Vector u = h.u;
    SaturationState sat = h.sat;
    CHECK(!repair_escaped(u, sat, inv, h.B_S, h.wd).has_value());
    CHECK(close(u, h.u, 0.0));
    CHECK(sat.saturated == h.sat.saturated);
}

TEST_CASE("multi-escape entry collapses to the all-border clamp") {
    // Near-dependent slack columns cannot reproduce what the saturated pair
    // gives up, so the rederived free side overshoots; both free elements
    // get transferred, then F is empty and the border clamp exits.
    Matrix B(2, 4);
    B << 1, 0, 0.01, 0.02,
         0, 1, 0.01, 0.02;
    Bounds bounds{Vector::Constant(4, -1.0), Vector::Constant(4, 1.0)};
    Vector v(2);
    v << 2, 2;
    Vector u(4);
    u << 1.5, 1.5, 0, 0;
    SaturationState sat;
    sat.saturated = {0, 1};
    sat.free_set = {2, 3};
    sat.delta_bar = Vector::Ones(2);
    sat.pivot = 0;

    SolveTrace trace;
    const AllocationResult res =
        allocate_infeasible(B, v, bounds, sat, u, trace);
    CHECK(trace.escaped == std::vector<int>{3, 2});
    CHECK(close(res.u, Vector::Ones(4), 1e-12));
    CHECK(res.classification == Feasibility::Infeasible);
    CHECK(res.iterations_infeasible == 0);  // transfers and clamp are not steps
    CHECK(res.residual == doctest::Approx((v - B * Vector::Ones(4)).norm()));
}

TEST_CASE("single escape transfers once and the walk continues") {
    Matrix B(2, 4);
    B << 1, 0, 3, 0.01,
         0, 1, 0, 0.01;
    Bounds bounds{Vector::Constant(4, -1.0), Vector::Constant(4, 1.0)};
    Vector v(2);
    v << 2, 2;
    Vector u(4);
    u << 1.5, 1.5, 0, 0;
    SaturationState sat;
    sat.saturated = {0, 1};
    sat.free_set = {2, 3};
    sat.delta_bar = Vector::Ones(2);
    sat.pivot = 0;

    SolveTrace trace;
    const AllocationResult res = allocate_infeasible(B, v, bounds, sat, u, trace);
    CHECK(trace.escaped == std::vector<int>{3});
    CHECK(res.iterations_infeasible == 1);
    // Once the saturated trio parks on its borders, the free element absorbs
    // the rest of row 1: u(2) = (2 - 1 - 0.01) / 3, leaving row 2 short 0.99.
    Vector expected(4);
    expected << 1, 1, 0.33, 1;
    CHECK(close(res.u, expected, 1e-9));
    CHECK(res.residual == doctest::Approx(0.99).epsilon(1e-9));
    // The transferred element sits exactly at the saturated w level when
    // it is pinned, and ends on a border like the rest of S.
    CHECK(res.w.maxCoeff() <= 1.0 + 1e-12);
}

TEST_CASE("empty free set clamps straight to the borders") {
    Matrix B(1, 3);
    B << 1, 1, 1;
    Bounds bounds{Vector::Constant(3, -1.0), Vector::Constant(3, 1.0)};
    Vector v(1);
    v << 10;
    Vector u = Vector::Constant(3, 10.0 / 3.0);
    SaturationState sat;
    sat.saturated = {0, 1, 2};
    sat.free_set = {};
    sat.delta_bar = Vector::Ones(3);
    sat.pivot = 0;
    SolveTrace trace;
    const AllocationResult res = allocate_infeasible(B, v, bounds, sat, u, trace);
    CHECK(close(res.u, Vector::Ones(3), 1e-15));
    CHECK(res.iterations_infeasible == 0);
    CHECK(res.residual == doctest::Approx(7.0));
}

TEST_CASE("allocate_infeasible finishes the worked example from the hand-off") {
    const Handoff h;
    SolveTrace trace;
    trace.feasible_iterations = 1;  // as left by the feasible phase
    const AllocationResult res = allocate_infeasible(
        h.problem.B, h.problem.v_desire, h.problem.bounds, h.sat, h.u, trace);

    Vector expected(5);
    expected << -0.433333, 1, 0, 0.6, 0.1;
    CHECK(close(res.u, expected, 1e-5));
    CHECK(res.classification == Feasibility::Infeasible);
    CHECK(res.iterations_infeasible == 3);
    CHECK(res.residual == doctest::Approx(0.725718).epsilon(1e-4));

    // The final step is the exit at delta = 0.0909 and the rejected
    // candidate on the last free element is 0.517.
    const auto& last = trace.iterations.back();
    CHECK(last.exit_step);
    CHECK(last.chosen_delta == doctest::Approx(0.0909).epsilon(2e-3));
    REQUIRE(last.delta_candidates.count(0) == 1);
    CHECK(last.delta_candidates.at(0) == doctest::Approx(0.517).epsilon(2e-3));

    // Better than the clipped unconstrained start on this problem.
    const Vector clipped = (pinv_right(h.problem.B) * h.problem.v_desire)
                               .cwiseMax(h.problem.bounds.u_min)
                               .cwiseMin(h.problem.bounds.u_max);
    const double clip_res = (h.problem.B * clipped - h.problem.v_desire).norm();
    CHECK(clip_res == doctest::Approx(1.4866).epsilon(1e-3));
    CHECK(res.residual < clip_res);
}
