// SPDX-License-Identifier: Apache-2.0

#include "nsalloc/slv_sim.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

#include "nsalloc/block_doc.hpp"

namespace nsalloc {

SlvData load_slv_data(const std::string& path) {
    const BlockDoc doc = load_block_doc(path);
    SlvData data;
    data.model.A = doc.require_matrix("A", 6, 6);
    data.model.B_v = doc.require_matrix("B_v", 6, 3);
    data.model.B = doc.require_matrix("B", 3, 8);
    data.model.C = doc.require_matrix("C", 3, 6);
    data.model.K = doc.require_matrix("K", 3, 6);
    data.model.N_ff = doc.require_matrix("N_ff", 3, 3);
    data.model.F = doc.require_matrix("F", 6, 3);
    data.limits.pos_min = doc.require_vector("pos_min", 8);
    data.limits.pos_max = doc.require_vector("pos_max", 8);
    data.limits.rate_min = doc.require_vector("rate_min", 8);
    data.limits.rate_max = doc.require_vector("rate_max", 8);
    validate_limits(data.limits, 8);
    return data;
}

std::vector<std::pair<double, Vector>> default_schedule() {
    const double deg = M_PI / 180.0;
    Vector r2(3), r6(3);
    r2 << 0.28 * deg, 0.4 * deg, 0.12 * deg;
    r6 << -0.014 * deg, -0.018 * deg, -0.018 * deg;
    return {{2.0, r2}, {6.0, r6}};
}

Vector controller(const SlvModel& model, const Vector& x, const Vector& r) {
    // Feedforward on the command plus feedback on the deviation from the
    // commanded equilibrium x* = -F r.
    return model.N_ff * r - model.K * (x + model.F * r);
}

Vector plant_step(const SlvModel& model, const Vector& x, const Vector& u,
                  double T, int substeps) {
    if (substeps < 1) throw std::invalid_argument("plant_step: substeps < 1");
    const Vector forcing = model.B_v * (model.B * u);
    auto deriv = [&](const Vector& s) -> Vector { return model.A * s + forcing; };
    const double h = T / substeps;
    Vector s = x;
    for (int i = 0; i < substeps; ++i) {
        const Vector k1 = deriv(s);
        const Vector k2 = deriv(s + 0.5 * h * k1);
        const Vector k3 = deriv(s + 0.5 * h * k2);
        const Vector k4 = deriv(s + h * k3);
        s += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
    if (!s.allFinite()) throw NumericalError("plant_step: state diverged");
    return s;
}

const SimSample& SimResult::at_time(double t) const {
    if (samples.empty()) throw std::logic_error("at_time: empty result");
    const SimSample* best = &samples.front();
    for (const auto& s : samples)
        if (std::abs(s.t - t) < std::abs(best->t - t)) best = &s;
    return *best;
}

SimResult run(const SlvData& data, const SimConfig& config) {
    if (!(config.T > 0.0)) throw std::invalid_argument("run: T must be positive");
    if (!(config.duration >= 0.0))
        throw std::invalid_argument("run: duration must be non-negative");

    auto schedule = config.schedule;
    std::stable_sort(schedule.begin(), schedule.end(),
                     [](const auto& a, const auto& b) { return a.first < b.first; });

    const int steps = static_cast<int>(std::llround(config.duration / config.T));
    Vector x = Vector::Zero(6);
    Vector r = Vector::Zero(3);
    AllocatorState state{Vector::Zero(8), config.T};

    SimResult result;
    result.samples.reserve(static_cast<std::size_t>(steps) + 1);
    std::size_t next_cmd = 0;

    for (int step_no = 0; step_no <= steps; ++step_no) {
        const double t = step_no * config.T;
        while (next_cmd < schedule.size() && schedule[next_cmd].first <= t + 1e-12)
            r = schedule[next_cmd++].second;

        SimSample sample;
        sample.t = t;
        sample.x = x;
        sample.r = r;
        sample.u_prev = state.u_prev;
        sample.v_desire = controller(data.model, x, r);

        const Bounds eff = effective_bounds(data.limits, state);
        sample.u_min_eff = eff.u_min;
        sample.u_max_eff = eff.u_max;

        AllocationResult alloc = step(data.model.B, sample.v_desire, data.limits, state);
        sample.u = alloc.u;
        sample.v = data.model.B * alloc.u;
        sample.feasible = alloc.classification == Feasibility::Feasible;
        sample.iterations = alloc.iterations();
        result.samples.push_back(std::move(sample));

        if (step_no < steps)
            x = plant_step(data.model, x, alloc.u, config.T, config.substeps);
    }
    return result;
}

namespace {

class CsvWriter {
  public:
    explicit CsvWriter(const std::string& path) : out_(path) {
        if (!out_) throw std::runtime_error(path + ": cannot open for writing");
        out_.precision(10);
    }
    void header(const std::vector<std::string>& names) {
        for (std::size_t i = 0; i < names.size(); ++i)
            out_ << (i ? "," : "") << names[i];
        out_ << '\n';
    }
    void begin_row(double t) {
        first_ = true;
        field(t);
    }
    void field(double v) {
        char buf[40];
        std::snprintf(buf, sizeof buf, "%.10g", v);
        out_ << (first_ ? "" : ",") << buf;
        first_ = false;
    }
    void field(int v) {
        out_ << (first_ ? "" : ",") << v;
        first_ = false;
    }
    void fields(const Vector& v) {
        for (Eigen::Index i = 0; i < v.size(); ++i) field(v(i));
    }
    void end_row() { out_ << '\n'; }

  private:
    std::ofstream out_;
    bool first_ = true;
};

std::vector<std::string> numbered(const std::string& stem, int count) {
    std::vector<std::string> names;
    for (int i = 1; i <= count; ++i) names.push_back(stem + std::to_string(i));
    return names;
}

void append(std::vector<std::string>& into, const std::vector<std::string>& from) {
    into.insert(into.end(), from.begin(), from.end());
}

}  // namespace

void write_trace_csv(const SimResult& result, const std::string& path) {
    CsvWriter csv(path);
    std::vector<std::string> names{"t"};
    append(names, numbered("x", 6));
    append(names, numbered("vd", 3));
    append(names, numbered("v", 3));
    append(names, numbered("u", 8));
    append(names, numbered("umin", 8));
    append(names, numbered("umax", 8));
    names.push_back("feasible");
    names.push_back("iters");
    csv.header(names);
    for (const auto& s : result.samples) {
        csv.begin_row(s.t);
        csv.fields(s.x);
        csv.fields(s.v_desire);
        csv.fields(s.v);
        csv.fields(s.u);
        csv.fields(s.u_min_eff);
        csv.fields(s.u_max_eff);
        csv.field(s.feasible ? 1 : 0);
        csv.field(s.iterations);
        csv.end_row();
    }
}

void write_states_csv(const SimResult& result, const SlvModel& model,
                      const std::string& path) {
    CsvWriter csv(path);
    std::vector<std::string> names{"t"};
    append(names, numbered("y", 3));
    append(names, numbered("r", 3));
    csv.header(names);
    for (const auto& s : result.samples) {
        csv.begin_row(s.t);
        csv.fields(model.C * s.x);
        csv.fields(s.r);
        csv.end_row();
    }
}

void write_inputs_csv(const SimResult& result, const ActuatorLimits& limits,
                      const std::string& path) {
    CsvWriter csv(path);
    std::vector<std::string> names{"t"};
    append(names, numbered("u", 8));
    append(names, numbered("umin", 8));
    append(names, numbered("umax", 8));
    csv.header(names);
    for (const auto& s : result.samples) {
        csv.begin_row(s.t);
        csv.fields(s.u);
        csv.fields(limits.pos_min);
        csv.fields(limits.pos_max);
        csv.end_row();
    }
}

void write_rates_csv(const SimResult& result, const ActuatorLimits& limits,
                     double T, const std::string& path) {
    CsvWriter csv(path);
    std::vector<std::string> names{"t"};
    append(names, numbered("du", 8));
    append(names, numbered("dumin", 8));
    append(names, numbered("dumax", 8));
    csv.header(names);
    for (const auto& s : result.samples) {
        csv.begin_row(s.t);
        csv.fields((s.u - s.u_prev) / T);
        csv.fields(limits.rate_min);
        csv.fields(limits.rate_max);
        csv.end_row();
    }
}

}  // namespace nsalloc
