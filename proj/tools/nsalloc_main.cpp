// SPDX-License-Identifier: Apache-2.0
//
// Command-line front end: run the embedded worked example, solve allocation
// problems from files, run the closed-loop launch-vehicle simulation, and
// fuzz the solver against the enumeration oracle.
//
// Exit codes: 0 success, 2 input/parse error, 3 solver numerical failure,
// 4 verification mismatch.

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "nsalloc/block_doc.hpp"
#include "nsalloc/fuzz.hpp"
#include "nsalloc/reference_example.hpp"
#include "nsalloc/slv_sim.hpp"

namespace {

using nsalloc::Matrix;
using nsalloc::Vector;
using nlohmann::json;

constexpr int kExitOk = 0;
constexpr int kExitInput = 2;
constexpr int kExitSolver = 3;
constexpr int kExitMismatch = 4;

json to_json(const Vector& v) {
    json arr = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) arr.push_back(v(i));
    return arr;
}

json to_json(const Matrix& m) {
    json rows = json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        json row = json::array();
        for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
        rows.push_back(row);
    }
    return rows;
}

json result_to_json(const nsalloc::AllocationResult& res) {
    json j;
    j["u"] = to_json(res.u);
    j["w"] = to_json(res.w);
    j["residual"] = res.residual;
    j["classification"] = nsalloc::to_string(res.classification);
    j["iterations_feasible"] = res.iterations_feasible;
    j["iterations_infeasible"] = res.iterations_infeasible;

    json steps = json::array();
    for (const auto& it : res.trace.iterations) {
        json s;
        s["number"] = it.number;
        s["phase"] = it.phase == 'F' ? "feasible" : "infeasible";
        s["saturated"] = it.saturated;  // indices from 0 in structured output
        s["pivot"] = it.pivot;
        if (!it.inverse_case.empty()) s["inverse"] = it.inverse_case;
        json cand = json::object();
        for (const auto& [idx, dj] : it.delta_candidates)
            cand[std::to_string(idx)] = dj;
        s["delta_candidates"] = cand;
        s["delta"] = it.chosen_delta;
        s["chosen_element"] = it.chosen_index;
        s["exit_step"] = it.exit_step;
        s["u"] = to_json(it.u_after);
        s["w"] = to_json(it.w_after);
        steps.push_back(s);
    }
    json trace;
    trace["u_initial"] = to_json(res.trace.u_initial);
    trace["w_initial"] = to_json(res.trace.w_initial);
    trace["steps"] = steps;
    if (!res.trace.handoff.empty()) trace["handoff"] = res.trace.handoff;
    trace["escaped"] = res.trace.escaped;
    j["trace"] = trace;
    return j;
}

json problem_to_json(const nsalloc::AllocationProblem& p) {
    json j;
    j["B"] = to_json(p.B);
    j["u_min"] = to_json(p.bounds.u_min);
    j["u_max"] = to_json(p.bounds.u_max);
    j["v_desire"] = to_json(p.v_desire);
    return j;
}

int cmd_example(bool as_json, double perturb) {
    const nsalloc::AllocationProblem problem = nsalloc::reference_problem();
    nsalloc::AllocationResult result;
    try {
        result = nsalloc::allocate(problem);
    } catch (const nsalloc::NumericalError& e) {
        std::cerr << "solver failure: " << e.what() << "\n";
        return kExitSolver;
    }
    const nsalloc::CheckOutcome check = nsalloc::check_reference(result, perturb);

    if (as_json) {
        json j;
        j["problem"] = problem_to_json(problem);
        j["result"] = result_to_json(result);
        j["check"]["ok"] = check.ok;
        if (!check.ok) j["check"]["first_divergence"] = check.first_divergence;
        j["check"]["notes"] = check.notes;
        std::cout << j.dump(2) << "\n";
    } else {
        std::cout << nsalloc::render_trace_text(problem, result);
        std::cout << "\nself-check: " << (check.ok ? "ok" : "MISMATCH") << "\n";
        if (!check.ok)
            std::cout << "first divergence: " << check.first_divergence << "\n";
        for (const auto& note : check.notes) std::cout << "note: " << note << "\n";
    }
    return check.ok ? kExitOk : kExitMismatch;
}

// Problem files are block documents: matrix B, vectors u_min/u_max/v_desire,
// optionally rate_min/rate_max (+ scalar T, vector u_prev) to solve inside
// one rate-limited sample window.
nsalloc::AllocationProblem load_problem(const std::string& path) {
    const nsalloc::BlockDoc doc = nsalloc::load_block_doc(path);
    auto itB = doc.matrices.find("B");
    if (itB == doc.matrices.end())
        throw nsalloc::ParseError(path + ": missing matrix 'B'");
    const Matrix& B = itB->second;
    const int n = static_cast<int>(B.rows());
    const int m = static_cast<int>(B.cols());

    nsalloc::AllocationProblem p;
    p.B = B;
    p.v_desire = doc.require_vector("v_desire", n);
    p.bounds.u_min = doc.require_vector("u_min", m);
    p.bounds.u_max = doc.require_vector("u_max", m);

    const bool has_rates = doc.vectors.count("rate_min") || doc.vectors.count("rate_max");
    if (has_rates) {
        nsalloc::ActuatorLimits limits;
        limits.pos_min = p.bounds.u_min;
        limits.pos_max = p.bounds.u_max;
        limits.rate_min = doc.require_vector("rate_min", m);
        limits.rate_max = doc.require_vector("rate_max", m);
        nsalloc::AllocatorState state;
        state.T = doc.scalars.count("T") ? doc.require_scalar("T") : 0.01;
        state.u_prev = doc.vectors.count("u_prev") ? doc.require_vector("u_prev", m)
                                                   : Vector::Zero(m);
        p.bounds = nsalloc::effective_bounds(limits, state);
    }
    return p;
}

int cmd_allocate(const std::string& path, bool as_json) {
    nsalloc::AllocationProblem problem;
    try {
        problem = load_problem(path);
    } catch (const std::exception& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return kExitInput;
    }
    nsalloc::AllocationResult result;
    try {
        result = nsalloc::allocate(problem);
    } catch (const nsalloc::ContractViolation& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return kExitInput;
    } catch (const std::invalid_argument& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return kExitInput;
    } catch (const nsalloc::NumericalError& e) {
        std::cerr << "solver failure: " << e.what() << "\n";
        return kExitSolver;
    }
    if (as_json) {
        json j;
        j["problem"] = problem_to_json(problem);
        j["result"] = result_to_json(result);
        std::cout << j.dump(2) << "\n";
    } else {
        std::cout << nsalloc::render_trace_text(problem, result);
    }
    return kExitOk;
}

int cmd_simulate(const std::string& model_path, double T, double duration,
                 int substeps, const std::vector<std::string>& set_points,
                 const std::string& out_prefix) {
    nsalloc::SlvData data;
    try {
        data = nsalloc::load_slv_data(model_path);
    } catch (const std::exception& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return kExitInput;
    }

    nsalloc::SimConfig config;
    config.T = T;
    config.duration = duration;
    config.substeps = substeps;
    if (set_points.empty()) {
        config.schedule = nsalloc::default_schedule();
    } else {
        for (const auto& spec_str : set_points) {
            // "time:r1,r2,r3"
            double t = 0, r1 = 0, r2 = 0, r3 = 0;
            if (std::sscanf(spec_str.c_str(), "%lf:%lf,%lf,%lf", &t, &r1, &r2,
                            &r3) != 4) {
                std::cerr << "input error: bad --set-point '" << spec_str
                          << "', expected time:r1,r2,r3\n";
                return kExitInput;
            }
            Vector r(3);
            r << r1, r2, r3;
            config.schedule.emplace_back(t, r);
        }
    }

    nsalloc::SimResult result;
    try {
        result = nsalloc::run(data, config);
    } catch (const nsalloc::NumericalError& e) {
        std::cerr << "solver failure: " << e.what() << "\n";
        return kExitSolver;
    } catch (const std::exception& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return kExitInput;
    }

    const std::string trace_path = out_prefix + "_trace.csv";
    nsalloc::write_trace_csv(result, trace_path);
    nsalloc::write_states_csv(result, data.model, out_prefix + "_states.csv");
    nsalloc::write_inputs_csv(result, data.limits, out_prefix + "_inputs.csv");
    nsalloc::write_rates_csv(result, data.limits, config.T, out_prefix + "_rates.csv");

    int feasible = 0;
    double max_w = 0.0, max_rate_excess = 0.0;
    for (const auto& s : result.samples) {
        if (s.feasible) ++feasible;
        const Vector w =
            nsalloc::weighted_distance(s.u, nsalloc::Bounds{s.u_min_eff, s.u_max_eff}).w;
        max_w = std::max(max_w, w.maxCoeff());
        const Vector rate = (s.u - s.u_prev) / config.T;
        max_rate_excess = std::max(
            max_rate_excess,
            std::max((rate - data.limits.rate_max).maxCoeff(),
                     (data.limits.rate_min - rate).maxCoeff()));
    }
    std::cout << "samples: " << result.samples.size() << " (feasible " << feasible
              << ")\n";
    std::cout << "max weighted distance: " << max_w << "\n";
    std::cout << "max rate excess: " << max_rate_excess << "\n";
    std::cout << "wrote " << trace_path << " and _states/_inputs/_rates extracts\n";
    return kExitOk;
}

int cmd_fuzz(int count, std::uint64_t seed, int m, int n, bool skip_oracle) {
    nsalloc::FuzzConfig config;
    config.count = count;
    config.seed = seed;
    config.fixed_m = m;
    config.fixed_n = n;
    config.with_oracle = !skip_oracle;
    nsalloc::FuzzReport report;
    try {
        report = nsalloc::run_fuzz(config);
    } catch (const std::invalid_argument& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return kExitInput;
    }
    std::cout << report.summary();
    return report.invariants_ok() ? kExitOk : kExitMismatch;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"constrained control allocation: solver, simulator, fuzzer"};
    app.require_subcommand(1);

    auto* example = app.add_subcommand("example", "run the embedded worked example");
    bool example_json = false;
    double perturb = 0.0;
    example->add_flag("--json", example_json, "structured output");
    example->add_option("--perturb-expected", perturb,
                        "shift the expected final u(1) (self-check test hook)")
        ->group("");  // hidden

    auto* alloc = app.add_subcommand("allocate", "solve an allocation problem file");
    std::string problem_path;
    bool alloc_json = false;
    alloc->add_option("file", problem_path, "problem document")->required();
    alloc->add_flag("--json", alloc_json, "structured output");

    auto* sim = app.add_subcommand("simulate", "run the closed-loop simulation");
    std::string model_path = std::string(NSALLOC_DATA_DIR) + "/slv_model.txt";
    double T = 0.01, duration = 10.0;
    int substeps = 4;
    std::string out_prefix = "slv";
    std::vector<std::string> set_points;
    sim->add_option("--model", model_path, "model document");
    sim->add_option("--T", T, "sample period, seconds");
    sim->add_option("--duration", duration, "simulated time, seconds");
    sim->add_option("--substeps", substeps, "integrator steps per sample");
    sim->add_option("--out", out_prefix, "output file prefix");
    sim->add_option("--set-point", set_points,
                    "time:r1,r2,r3 command (repeatable, overrides the default)");

    auto* fuzz = app.add_subcommand("fuzz", "audit the solver on random instances");
    int count = 1000;
    std::uint64_t seed = 42;
    int fixed_m = 0, fixed_n = 0;
    bool skip_oracle = false;
    fuzz->add_option("--count", count, "number of instances");
    fuzz->add_option("--seed", seed, "master seed");
    fuzz->add_option("--m", fixed_m, "fix the element count (default random 4..8)");
    fuzz->add_option("--n", fixed_n, "fix the axis count (default random 3..7)");
    fuzz->add_flag("--skip-oracle", skip_oracle, "invariants only, no enumeration");

    CLI11_PARSE(app, argc, argv);

    try {
        if (example->parsed()) return cmd_example(example_json, perturb);
        if (alloc->parsed()) return cmd_allocate(problem_path, alloc_json);
        if (sim->parsed())
            return cmd_simulate(model_path, T, duration, substeps, set_points,
                                out_prefix);
        if (fuzz->parsed()) return cmd_fuzz(count, seed, fixed_m, fixed_n, skip_oracle);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInput;
    }
    return kExitOk;
}
