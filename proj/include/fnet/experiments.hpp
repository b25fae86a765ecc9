#ifndef FNET_EXPERIMENTS_HPP
#define FNET_EXPERIMENTS_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "fnet/analysis.hpp"
#include "fnet/dataset.hpp"
#include "fnet/ntk.hpp"
#include "fnet/trainer.hpp"

namespace fnet {

// One flat parameter set shared by every experiment; each runner reads the
// fields it needs. Fully JSON-serializable; the effective config of a run
// is echoed verbatim to `<out_dir>/config.echo`.
struct ExperimentConfig {
    std::string out_dir = "out";
    std::uint64_t seed = 0;
    double delta = 0.1;  // failure-probability knob wherever one appears
    std::string variant = "bc";
    Index n = 16;
    Index d = 32;
    Index m = 8192;
    Index l = 16;
    Index k = 512;
    long steps = 2000;
    double eta = 0.0;  // 0 selects 1 / (2 ||H(0)||_spec) per instance
    std::vector<long> m_grid;  // empty: per-experiment default grid
    std::vector<long> n_grid;  // empty: generalization default {8,16,32}
    long seed_count = 20;
    std::uint64_t mc_samples = 10000;
    std::uint64_t eps_samples = 256;
    std::string mode = "sphere-uniform";
    double min_angle_deg = 30.0;
    Index teacher_width = 32;
    double jl_eps = 0.2;
    double tau = 2.0;
    double radius = 0.01;  // drift radius R for flip-event tables
    std::string dataset_path;  // when set, replaces generated data
    long bench_iters = 9;
};

std::string config_to_json(const ExperimentConfig& cfg);
ExperimentConfig config_from_json(const std::string& text);

// One seeded training run with its kernels: the shared engine behind the
// training-backed experiments. Dataset rows/labels and network init both
// derive from `seed` (disjoint sub-streams). eta of 0 resolves to
// 1 / (2 ||H(0)||_spec). For dense/bc, hinf is the closed form; abc has no
// closed form, so hinf aliases the empirical H(0) and lambda0 is read from
// it. steps = 0 skips training and records the single t=0 row.
struct TrainingInstance {
    Dataset data;
    Network net0;
    Network net_t;
    TrainTrace trace;
    KernelMatrix h0;
    KernelMatrix hinf;
    KernelMatrix ht;  // empirical kernel at the final step
    Vector r0;        // y - u(0)
    double eta;
};

TrainingInstance run_training_instance(const ExperimentConfig& cfg, Index m,
                                       std::uint64_t seed, long steps,
                                       bool want_final_kernel);

// Named experiments, one per verified conclusion family:
//   kernel-concentration  H(0) vs Hinf max-entry deviation over an m grid
//   kernel-stability      flip fraction and H(T) vs H(0) deviation over m
//   convergence           one run, geometric envelope and full bound report
//   eigen-predict         one run, spectral loss prediction vs measured
//   drift                 row/Frobenius drift vs bounds over an m grid
//   rademacher            empirical complexity vs the formula bound
//   generalization        teacher-task L1 gap trend over an n grid
//   jl-distortion         pairwise inner-product distortion, both operators
//   bench                 per-iteration cost, all variants
// Writes config.echo, meta, the experiment CSVs, bounds.csv and summary.txt
// into cfg.out_dir (locked for the duration), and returns the report.
//
// Report convention here and in bound_report: smaller measured is better and
// an entry passes iff measured <= bound (drift entries fold their 2x slack
// into the check); trend entries encode distance from the target (slope or
// Spearman rho gap), with the raw slope or rho in summary.txt. Wall-clock
// numbers stay out of bounds.csv so reports are byte-reproducible.
BoundReport run_experiment(const std::string& name, const ExperimentConfig& cfg);

const std::vector<std::string>& experiment_names();

// Rank-correlation helper for trend checks (average ranks on ties).
double spearman_rho(const std::vector<double>& xs, const std::vector<double>& ys);

}  // namespace fnet

#endif
