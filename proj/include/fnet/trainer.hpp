#ifndef FNET_TRAINER_HPP
#define FNET_TRAINER_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "fnet/network.hpp"

namespace fnet {

// Full-batch gradient descent on Phi(B) = 1/2 ||y - u||^2. Deterministic:
// fixed evaluation order, no stochasticity, no momentum.
struct TrainConfig {
    double eta = 0.0;          // learning rate, > 0
    long steps = 0;            // T >= 1
    double loss_floor = 1e-10; // early stop when ||u-y||^2 drops below
    bool track_flips = true;
    bool track_drift = true;
};

// Per-step record; row t describes the network after t update steps
// (row 0 is the initial state). `loss` is the squared residual norm
// ||u(t) - y||^2. Drift is measured against t = 0: max_row_drift is
// max_r ||W_r(t) - W_r(0)|| over effective weight rows, b_fro_drift is
// ||B(t) - B(0)||_F. Flips count activation-pattern disagreements with the
// initial pattern. Untracked fields are recorded as 0.
//
// Drift and flip instrumentation is measurement, not training: it does not
// touch the flop counter and adds no terms to the bench cost model.
struct StepRecord {
    long t;
    double loss;
    double max_row_drift;
    double b_fro_drift;
    std::uint64_t total_flips;
    std::int64_t wall_nanos;
};

struct TrainTrace {
    std::vector<StepRecord> steps;              // length T+1 (includes t=0)
    std::vector<std::vector<long>> flip_counts; // per step, per sample i: |S_i(t)|
    double loss0() const { return steps.front().loss; }
    double loss_final() const { return steps.back().loss; }
};

// dPhi/dB, shaped like B (or W for dense):
//   dPhi/dB = -(1/sqrt(m)) sum_j (y_j - u_j) G_j
// with G_j the v-weighted indicator structure of the variant (rows
// v_r 1_{r,j} x_j for dense, v_r 1_{r,j} (x_j C^T) for bc, and
// A^T Z_j (x_j C^T) for abc).
Matrix grad_B(const Network& net, const Dataset& data);

// One descent step: B <- B - eta * grad_B. Frozen parts are untouched
// bit-for-bit. Pure: returns a new network.
Network gd_step(const Network& net, const Dataset& data, double eta);

// T full-batch steps (early stop at loss_floor). The trace records every
// step including t=0. Iterating gd_step by hand gives bit-identical weights.
// Throws diverged_error if the loss leaves the finite range.
std::pair<Network, TrainTrace> train(const Network& net, const Dataset& data,
                                     const TrainConfig& cfg);

// Worst-case-safe default rate with the big-O constant set to 1:
// lambda0/n^2 for dense and bc, lambda0*delta^4/n^2 for abc. Practical runs
// usually override with 1/(2 ||H(0)||_spec).
double default_eta(double lambda0, Index n, double delta, Variant variant);

// Trace CSV: header t,loss,max_row_drift,b_fro_drift,total_flips,wall_nanos,
// one row per step, floats at 17 significant digits.
void write_trace_csv(const TrainTrace& trace, const std::string& path);

}  // namespace fnet

#endif
