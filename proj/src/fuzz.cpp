// SPDX-License-Identifier: Apache-2.0

#include "nsalloc/fuzz.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>
#include <stdexcept>

#include "nsalloc/oracle.hpp"

namespace nsalloc {

namespace {

double round2(double x) { return std::round(x * 100.0) / 100.0; }

Vector clamp(const Vector& u, const Bounds& b) {
    return u.cwiseMax(b.u_min).cwiseMin(b.u_max);
}

// Residual of the clipped unconstrained start, the naive baseline any
// redistribution scheme has to beat.
double clipped_start_residual(const Matrix& B, const Vector& v, const Bounds& b) {
    const int n = static_cast<int>(B.rows());
    const Matrix G = rank_with_tol(B) < n ? singular_inverse(B) : pinv_right(B);
    return (B * clamp(G * v, b) - v).norm();
}

}  // namespace

std::uint64_t case_seed(const FuzzConfig& config, int index) {
    return config.seed + static_cast<std::uint64_t>(index);
}

FuzzCase generate_case(std::uint64_t seed, int fixed_n, int fixed_m) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss;
    std::uniform_real_distribution<double> unit(0.0, 1.0);

    const int n = fixed_n ? fixed_n
                          : std::uniform_int_distribution<int>(3, 7)(rng);
    const int m = fixed_m ? fixed_m
                          : std::uniform_int_distribution<int>(n + 1, 8)(rng);
    if (!(3 <= n && n < m && m <= 8))
        throw std::invalid_argument("generate_case: need 3 <= n < m <= 8");

    FuzzCase out;
    Matrix B(n, m);
    for (int r = 0; r < n; ++r)
        for (int c = 0; c < m; ++c) B(r, c) = round2(gauss(rng));
    if (unit(rng) < 0.35) {
        // Deliberate linear dependence: overwrite one column with a signed
        // copy of another to force singular saturated null blocks.
        const int src = std::uniform_int_distribution<int>(0, m - 1)(rng);
        int dst = std::uniform_int_distribution<int>(0, m - 2)(rng);
        if (dst >= src) ++dst;
        B.col(dst) = (unit(rng) < 0.5 ? 1.0 : -1.0) * B.col(src);
        out.duplicated_column = true;
    }

    Vector center(m), half(m);
    for (int i = 0; i < m; ++i) {
        center(i) = round2(0.5 * gauss(rng));
        half(i) = round2(0.2 + 1.3 * unit(rng));
    }
    Bounds bounds{center - half, center + half};

    Vector v(n);
    if (unit(rng) < 0.5) {
        Vector u_in(m);
        for (int i = 0; i < m; ++i)
            u_in(i) = center(i) + (2.0 * unit(rng) - 1.0) * half(i);
        v = B * u_in;  // attainable by construction
        out.engineered_feasible = true;
    } else {
        for (int i = 0; i < n; ++i) v(i) = round2(2.5 * gauss(rng));
    }

    out.problem = AllocationProblem{std::move(B), std::move(bounds), std::move(v)};
    return out;
}

FuzzReport run_fuzz(const FuzzConfig& config) {
    if (config.count < 1) throw std::invalid_argument("run_fuzz: count < 1");
    FuzzReport rep;
    rep.config = config;

    for (int i = 0; i < config.count; ++i) {
        const std::uint64_t seed = case_seed(config, i);
        const FuzzCase fc = generate_case(seed, config.fixed_n, config.fixed_m);
        const int n = static_cast<int>(fc.problem.B.rows());
        const int m = static_cast<int>(fc.problem.B.cols());
        ++rep.cases;
        if (fc.engineered_feasible) ++rep.engineered_feasible;
        if (fc.duplicated_column) ++rep.duplicated_columns;

        AllocationResult res;
        try {
            res = allocate(fc.problem);
        } catch (const NumericalError&) {
            ++rep.solver_errors;
            rep.offending_seeds.push_back(seed);
            continue;
        }

        if (res.classification == Feasibility::Feasible) {
            ++rep.classified_feasible;
            if (res.residual > rep.max_feasible_residual)
                rep.max_feasible_residual = res.residual;
        } else {
            ++rep.classified_infeasible;
        }

        bool offends = false;
        const double excess = res.w.maxCoeff() - 1.0;
        if (excess > rep.max_bound_excess) rep.max_bound_excess = excess;
        if (excess > 1e-9) {
            ++rep.bounds_violations;
            offends = true;
        }
        if (res.iterations_feasible > m - n || res.iterations() > m) {
            ++rep.budget_violations;
            offends = true;
        }
        if (offends) rep.offending_seeds.push_back(seed);

        if (!config.with_oracle) continue;
        ++rep.oracle_cases;
        const OracleSolution exact =
            solve_exact(fc.problem.B, fc.problem.v_desire, fc.problem.bounds);

        if (exact.status == Feasibility::Feasible) {
            if (res.classification != Feasibility::Feasible) {
                ++rep.exactness_misses;
                if (static_cast<int>(exact.active_set.size()) <= m - n)
                    ++rep.misses_small_active;
            } else if (static_cast<int>(exact.active_set.size()) <= m - n) {
                const double gap = res.u.norm() - exact.u.norm();
                if (gap > rep.max_norm_gap) rep.max_norm_gap = gap;
                if (gap > 1e-6) ++rep.norm_gaps_over_tol;
            }
        } else {
            const double gap = res.residual - exact.objective;
            if (gap > rep.max_residual_gap) rep.max_residual_gap = gap;
        }
        const double clip = clipped_start_residual(fc.problem.B, fc.problem.v_desire,
                                                   fc.problem.bounds);
        const double clip_excess = res.residual - clip;
        if (clip_excess > 1e-9) {
            ++rep.clip_regressions;
            if (clip_excess > rep.max_clip_excess) rep.max_clip_excess = clip_excess;
        }
    }
    return rep;
}

std::string FuzzReport::summary() const {
    std::ostringstream os;
    os.precision(6);
    os << "cases: " << cases << " (feasible " << classified_feasible
       << ", infeasible " << classified_infeasible << ", engineered "
       << engineered_feasible << ", duplicated-column " << duplicated_columns
       << ")\n";
    os << "solver errors: " << solver_errors << "\n";
    os << "bounds violations (w > 1+1e-9): " << bounds_violations
       << " (max excess " << max_bound_excess << ")\n";
    os << "iteration budget violations: " << budget_violations << "\n";
    os << "max residual among feasible-classified: " << max_feasible_residual
       << "\n";
    if (oracle_cases > 0) {
        os << "oracle comparisons: " << oracle_cases << "\n";
        os << "  exactness misses: " << exactness_misses << " ("
           << misses_small_active << " with small active set)\n";
        os << "  norm gaps > 1e-6 (small oracle active set): " << norm_gaps_over_tol
           << " (max gap " << max_norm_gap << ")\n";
        os << "  clipped-baseline regressions: " << clip_regressions
           << " (max excess " << max_clip_excess << ")\n";
        os << "  max residual gap vs oracle: " << max_residual_gap << "\n";
    }
    if (!offending_seeds.empty()) {
        os << "offending seeds:";
        const std::size_t shown = std::min<std::size_t>(offending_seeds.size(), 20);
        for (std::size_t i = 0; i < shown; ++i) os << " " << offending_seeds[i];
        if (shown < offending_seeds.size())
            os << " (+" << offending_seeds.size() - shown << " more)";
        os << "\n";
    }
    return os.str();
}

}  // namespace nsalloc
