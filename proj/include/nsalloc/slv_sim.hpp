// SPDX-License-Identifier: Apache-2.0
//
// Closed-loop launch-vehicle simulation: state-feedback set-point controller
// in front of the constrained allocator, continuous plant integrated with
// RK4 under zero-order-hold inputs.

#pragma once

#include <string>
#include <utility>
#include <vector>

#include "nsalloc/dynamic.hpp"

namespace nsalloc {

struct SlvModel {
    Matrix A;     // plant, 6x6
    Matrix B_v;   // virtual-input map, 6x3
    Matrix B;     // allocation map, 3x8
    Matrix C;     // output map, 3x6
    Matrix K;     // state-feedback gain, 3x6
    Matrix N_ff;  // set-point feedforward, 3x3
    Matrix F;     // set-point-to-state offset, 6x3
};

struct SlvData {
    SlvModel model;
    ActuatorLimits limits;
};

// Reads the named blocks A, B_v, B, C, K, N_ff, F, pos_min, pos_max,
// rate_min, rate_max and validates the dimensions.
SlvData load_slv_data(const std::string& path);

struct SimConfig {
    double T = 0.01;       // allocator sample period, seconds
    double duration = 10;  // seconds
    int substeps = 4;      // RK4 steps per sample
    // (time, set point) pairs; each applies from its time onward
    std::vector<std::pair<double, Vector>> schedule;
};

// Built-in command profile: pitch together with small yaw/roll at 2 s,
// a sign-reversing trim at 6 s.
std::vector<std::pair<double, Vector>> default_schedule();

struct SimSample {
    double t = 0.0;
    Vector x;
    Vector r;
    Vector v_desire;
    Vector v;  // B * u, what the allocation actually produced
    Vector u;
    Vector u_prev;
    Vector u_min_eff;
    Vector u_max_eff;
    bool feasible = false;
    int iterations = 0;
};

struct SimResult {
    std::vector<SimSample> samples;
    const SimSample& at_time(double t) const;  // nearest sample
};

Vector controller(const SlvModel& model, const Vector& x, const Vector& r);

// Integrates dx/dt = A x + B_v * (B u) across one sample with u held.
Vector plant_step(const SlvModel& model, const Vector& x, const Vector& u,
                  double T, int substeps);

SimResult run(const SlvData& data, const SimConfig& config);

void write_trace_csv(const SimResult& result, const std::string& path);
void write_states_csv(const SimResult& result, const SlvModel& model,
                      const std::string& path);
void write_inputs_csv(const SimResult& result, const ActuatorLimits& limits,
                      const std::string& path);
void write_rates_csv(const SimResult& result, const ActuatorLimits& limits,
                     double T, const std::string& path);

}  // namespace nsalloc
