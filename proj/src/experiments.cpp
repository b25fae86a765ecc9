#include "fnet/experiments.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <cstdlib>
#include <limits>
#include <map>
#include <numeric>
#include <stdexcept>
#include <tuple>

#include "fnet/bench.hpp"
#include "fnet/errors.hpp"
#include "fnet/io.hpp"
#include "fnet/jl.hpp"

namespace fnet {
namespace {

using nlohmann::json;

// Mirrors the bound_report ratio convention.
double ratio_of(double measured, double bound) {
    if (bound > 0.0) return measured / bound;
    if (measured == 0.0) return 0.0;
    return std::numeric_limits<double>::infinity();
}

BoundEntry gate_entry(const std::string& name, double bound, double measured) {
    BoundEntry e;
    e.name = name;
    e.bound = bound;
    e.measured = measured;
    e.ratio = ratio_of(measured, bound);
    e.pass = measured <= bound + 1e-12;
    return e;
}

double median_of(std::vector<double> v) {
    if (v.empty()) throw std::invalid_argument("median_of: empty sample");
    std::sort(v.begin(), v.end());
    const std::size_t h = v.size() / 2;
    return v.size() % 2 ? v[h] : 0.5 * (v[h - 1] + v[h]);
}

std::vector<double> ranks_of(const std::vector<double>& v) {
    std::vector<std::size_t> order(v.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return v[a] < v[b]; });
    std::vector<double> ranks(v.size());
    std::size_t i = 0;
    while (i < order.size()) {
        std::size_t j = i;
        while (j + 1 < order.size() && v[order[j + 1]] == v[order[i]]) ++j;
        const double rank = 0.5 * (double(i) + double(j)) + 1.0;  // average ties
        for (std::size_t t = i; t <= j; ++t) ranks[order[t]] = rank;
        i = j + 1;
    }
    return ranks;
}

std::FILE* open_csv(const std::string& path) {
    std::FILE* f = std::fopen(path.c_str(), "w");
    if (!f) throw std::runtime_error("cannot open " + path);
    return f;
}

void appendf(std::string& out, const char* fmt, ...) {
    char buf[512];
    va_list args;
    va_start(args, fmt);
    std::vsnprintf(buf, sizeof buf, fmt, args);
    va_end(args);
    out += buf;
}

std::vector<long> grid_or(const std::vector<long>& grid,
                          std::initializer_list<long> fallback) {
    if (!grid.empty()) return grid;
    return std::vector<long>(fallback);
}

double spec_norm(const KernelMatrix& K) {
    const SpectralData& s = K.spectral();
    return std::max(std::abs(s.eigenvalues(0)),
                    std::abs(s.eigenvalues(s.eigenvalues.size() - 1)));
}

double auto_eta(const KernelMatrix& h0) {
    const double sigma = spec_norm(h0);
    if (!(sigma > 0.0)) throw numeric_failure("auto eta: H(0) has zero spectral norm");
    return 1.0 / (2.0 * sigma);
}

Dataset slice_rows(const Dataset& data, Index lo, Index count) {
    Dataset out;
    out.X = data.X.middleRows(lo, count);
    out.y = data.y.segment(lo, count);
    return out;
}

// Least-squares slope of log(y) against log(x).
double loglog_slope(const std::vector<double>& xs, const std::vector<double>& ys) {
    const double n = double(xs.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        mx += std::log(xs[i]);
        my += std::log(ys[i]);
    }
    mx /= n;
    my /= n;
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double dx = std::log(xs[i]) - mx;
        sxy += dx * (std::log(ys[i]) - my);
        sxx += dx * dx;
    }
    if (sxx == 0.0) throw std::invalid_argument("loglog_slope: degenerate x grid");
    return sxy / sxx;
}

}  // namespace

double spearman_rho(const std::vector<double>& xs, const std::vector<double>& ys) {
    if (xs.size() != ys.size() || xs.size() < 2)
        throw std::invalid_argument("spearman_rho: need two equal-length series");
    const std::vector<double> rx = ranks_of(xs);
    const std::vector<double> ry = ranks_of(ys);
    const double n = double(xs.size());
    const double mx = std::accumulate(rx.begin(), rx.end(), 0.0) / n;
    const double my = std::accumulate(ry.begin(), ry.end(), 0.0) / n;
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < rx.size(); ++i) {
        sxy += (rx[i] - mx) * (ry[i] - my);
        sxx += (rx[i] - mx) * (rx[i] - mx);
        syy += (ry[i] - my) * (ry[i] - my);
    }
    if (sxx == 0.0 || syy == 0.0) return 0.0;
    return sxy / std::sqrt(sxx * syy);
}

std::string config_to_json(const ExperimentConfig& c) {
    json j;
    j["out_dir"] = c.out_dir;
    j["seed"] = c.seed;
    j["delta"] = c.delta;
    j["variant"] = c.variant;
    j["n"] = c.n;
    j["d"] = c.d;
    j["m"] = c.m;
    j["l"] = c.l;
    j["k"] = c.k;
    j["steps"] = c.steps;
    j["eta"] = c.eta;
    j["m_grid"] = c.m_grid;
    j["n_grid"] = c.n_grid;
    j["seed_count"] = c.seed_count;
    j["mc_samples"] = c.mc_samples;
    j["eps_samples"] = c.eps_samples;
    j["mode"] = c.mode;
    j["min_angle_deg"] = c.min_angle_deg;
    j["teacher_width"] = c.teacher_width;
    j["jl_eps"] = c.jl_eps;
    j["tau"] = c.tau;
    j["radius"] = c.radius;
    j["dataset_path"] = c.dataset_path;
    j["bench_iters"] = c.bench_iters;
    return j.dump(2) + "\n";
}

ExperimentConfig config_from_json(const std::string& text) {
    const json j = json::parse(text);
    if (!j.is_object())
        throw std::invalid_argument("config must be a JSON object");
    static const char* known[] = {
        "out_dir", "seed", "delta", "variant", "n", "d", "m", "l", "k",
        "steps", "eta", "m_grid", "n_grid", "seed_count", "mc_samples",
        "eps_samples", "mode", "min_angle_deg", "teacher_width", "jl_eps",
        "tau", "radius", "dataset_path", "bench_iters"};
    for (const auto& item : j.items()) {
        bool ok = false;
        for (const char* k : known) ok = ok || item.key() == k;
        if (!ok) throw std::invalid_argument("unknown config key: " + item.key());
    }
    ExperimentConfig c;
    auto get = [&](const char* key, auto& field) {
        auto it = j.find(key);
        if (it != j.end()) field = it->get<std::decay_t<decltype(field)>>();
    };
    get("out_dir", c.out_dir);
    get("seed", c.seed);
    get("delta", c.delta);
    get("variant", c.variant);
    get("n", c.n);
    get("d", c.d);
    get("m", c.m);
    get("l", c.l);
    get("k", c.k);
    get("steps", c.steps);
    get("eta", c.eta);
    get("m_grid", c.m_grid);
    get("n_grid", c.n_grid);
    get("seed_count", c.seed_count);
    get("mc_samples", c.mc_samples);
    get("eps_samples", c.eps_samples);
    get("mode", c.mode);
    get("min_angle_deg", c.min_angle_deg);
    get("teacher_width", c.teacher_width);
    get("jl_eps", c.jl_eps);
    get("tau", c.tau);
    get("radius", c.radius);
    get("dataset_path", c.dataset_path);
    get("bench_iters", c.bench_iters);
    return c;
}

TrainingInstance run_training_instance(const ExperimentConfig& cfg, Index m,
                                       std::uint64_t seed, long steps,
                                       bool want_final_kernel) {
    const Variant variant = variant_from_name(cfg.variant);
    TrainingInstance inst;
    inst.data = cfg.dataset_path.empty()
                    ? gen_data(cfg.n, cfg.d, gen_mode_from_name(cfg.mode), seed,
                               cfg.min_angle_deg, cfg.teacher_width)
                    : read_dataset_csv(cfg.dataset_path);
    Dims dims;
    dims.m = m;
    dims.d = inst.data.d();
    dims.l = cfg.l;
    dims.k = cfg.k;
    inst.net0 = init_network(variant, dims, seed);
    inst.h0 = h_empirical(inst.net0, inst.data.X);
    inst.eta = cfg.eta > 0.0 ? cfg.eta : auto_eta(inst.h0);
    inst.r0 = inst.data.y - forward(inst.net0, inst.data.X);
    if (steps == 0) {
        inst.net_t = inst.net0;
        StepRecord rec;
        rec.t = 0;
        rec.loss = inst.r0.squaredNorm();
        rec.max_row_drift = 0.0;
        rec.b_fro_drift = 0.0;
        rec.total_flips = 0;
        rec.wall_nanos = 0;
        inst.trace.steps = {rec};
        inst.trace.flip_counts = {std::vector<long>(inst.data.n(), 0)};
    } else {
        TrainConfig tc;
        tc.eta = inst.eta;
        tc.steps = steps;
        tc.loss_floor = 0.0;  // fixed horizon: grids compare equal-length runs
        std::tie(inst.net_t, inst.trace) = train(inst.net0, inst.data, tc);
    }
    // abc has no closed form; the empirical H(0) stands in as the kernel
    // reference, so lambda0 and the drift quadform are read from it.
    inst.hinf = variant == Variant::abc
                    ? inst.h0
                    : hinf_closed_form(inst.data.X,
                                       variant == Variant::bc ? &inst.net0.C : nullptr);
    inst.ht = want_final_kernel
                  ? h_empirical(inst.net_t, inst.data.X, inst.trace.steps.back().t)
                  : inst.h0;
    return inst;
}

namespace {

// H(0) vs Hinf max-entry deviation over an m grid; the headline number is
// the log-log slope of the per-m median, encoded as distance from -1/2.
BoundReport run_concentration(const ExperimentConfig& cfg, std::string& extras) {
    const Variant variant = variant_from_name(cfg.variant);
    const std::vector<long> grid = grid_or(cfg.m_grid, {256, 1024, 4096, 16384});
    const Dataset data =
        cfg.dataset_path.empty()
            ? gen_data(cfg.n, cfg.d, gen_mode_from_name(cfg.mode), cfg.seed,
                       cfg.min_angle_deg, cfg.teacher_width)
            : read_dataset_csv(cfg.dataset_path);

    std::FILE* f = open_csv(cfg.out_dir + "/concentration.csv");
    std::fprintf(f, "m,seed,max_entry,frobenius,spectral,sum_abs\n");
    std::map<long, std::vector<double>> devs;
    for (long m : grid) {
        for (long s = 0; s < cfg.seed_count; ++s) {
            const std::uint64_t seed = cfg.seed + std::uint64_t(s);
            Dims dims;
            dims.m = m;
            dims.d = data.d();
            dims.l = cfg.l;
            dims.k = cfg.k;
            const Network net = init_network(variant, dims, seed);
            const KernelMatrix h0 = h_empirical(net, data.X);
            const KernelMatrix hinf =
                variant == Variant::abc
                    ? hinf_monte_carlo(data.X, &net.C, &net, cfg.mc_samples, seed)
                    : hinf_closed_form(data.X,
                                       variant == Variant::bc ? &net.C : nullptr);
            const KernelDeviation dev = kernel_deviation(h0, hinf);
            std::fprintf(f, "%ld,%llu,%.17g,%.17g,%.17g,%.17g\n", m,
                         (unsigned long long)seed, dev.max_entry, dev.frobenius,
                         dev.spectral, dev.sum_abs);
            devs[m].push_back(dev.max_entry);
        }
    }
    std::fclose(f);

    std::vector<double> ms, medians;
    std::FILE* fit = open_csv(cfg.out_dir + "/concentration_fit.csv");
    std::fprintf(fit, "m,median_max_entry\n");
    for (long m : grid) {
        ms.push_back(double(m));
        medians.push_back(median_of(devs[m]));
        std::fprintf(fit, "%ld,%.17g\n", m, medians.back());
    }
    std::fclose(fit);

    const double slope = loglog_slope(ms, medians);
    appendf(extras, "loglog_slope=%.17g\n", slope);
    BoundReport report;
    report.entries.push_back(gate_entry("slope-gap", 0.15, std::abs(slope + 0.5)));
    return report;
}

// Flip fraction and end-of-run kernel deviation over an m grid at a fixed
// step horizon.
BoundReport run_stability(const ExperimentConfig& cfg, std::string& extras) {
    const std::vector<long> grid = grid_or(cfg.m_grid, {1024, 4096, 16384});
    std::FILE* f = open_csv(cfg.out_dir + "/stability.csv");
    std::fprintf(f,
                 "m,seed,flip_fraction,max_entry,frobenius,spectral,sum_abs,"
                 "lambda0\n");
    std::map<long, std::vector<double>> flips;
    long total_runs = 0, stable_violations = 0;
    for (long m : grid) {
        for (long s = 0; s < cfg.seed_count; ++s) {
            const std::uint64_t seed = cfg.seed + std::uint64_t(s);
            const TrainingInstance inst =
                run_training_instance(cfg, m, seed, cfg.steps, true);
            const double frac = double(inst.trace.steps.back().total_flips) /
                                (double(m) * double(inst.data.n()));
            const KernelDeviation dev = kernel_deviation(inst.ht, inst.h0);
            const double lambda0 = std::max(inst.hinf.lambda_min(), 1e-8);
            if (dev.spectral > lambda0 / 4.0) ++stable_violations;
            ++total_runs;
            std::fprintf(f, "%ld,%llu,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n", m,
                         (unsigned long long)seed, frac, dev.max_entry,
                         dev.frobenius, dev.spectral, dev.sum_abs, lambda0);
            flips[m].push_back(frac);
        }
    }
    std::fclose(f);

    std::vector<double> ms, medians;
    std::FILE* fit = open_csv(cfg.out_dir + "/stability_fit.csv");
    std::fprintf(fit, "m,median_flip_fraction\n");
    for (long m : grid) {
        ms.push_back(double(m));
        medians.push_back(median_of(flips[m]));
        std::fprintf(fit, "%ld,%.17g\n", m, medians.back());
    }
    std::fclose(fit);

    const double rho = spearman_rho(ms, medians);
    appendf(extras, "flip_spearman_rho=%.17g\n", rho);
    BoundReport report;
    report.entries.push_back(gate_entry("flip-trend", 0.1, rho + 1.0));
    report.entries.push_back(gate_entry(
        "stability-violations", 0.05, double(stable_violations) / double(total_runs)));
    return report;
}

void write_instance_artifacts(const ExperimentConfig& cfg,
                              const TrainingInstance& inst) {
    write_dataset_csv(inst.data, cfg.out_dir + "/dataset.csv");
    write_trace_csv(inst.trace, cfg.out_dir + "/trace.csv");
    save_checkpoint(inst.net_t, cfg.out_dir + "/checkpoint.txt");
    write_kernel_csv(inst.h0, cfg.out_dir + "/kernel_h0.csv",
                     cfg.out_dir + "/kernel_h0_meta.csv");
    write_kernel_csv(inst.hinf, cfg.out_dir + "/kernel_hinf.csv",
                     cfg.out_dir + "/kernel_hinf_meta.csv");
    write_kernel_csv(inst.ht, cfg.out_dir + "/kernel_ht.csv",
                     cfg.out_dir + "/kernel_ht_meta.csv");
}

// One full run against the geometric envelope plus the complete report.
BoundReport run_convergence(const ExperimentConfig& cfg, std::string& extras) {
    const TrainingInstance inst =
        run_training_instance(cfg, cfg.m, cfg.seed, cfg.steps, true);
    write_instance_artifacts(cfg, inst);

    const double decay = 1.0 - inst.eta * std::max(inst.h0.lambda_min(), 1e-8) / 2.0;
    std::FILE* f = open_csv(cfg.out_dir + "/curve.csv");
    std::fprintf(f, "t,loss,envelope\n");
    double envelope = inst.trace.loss0();
    for (const auto& r : inst.trace.steps) {
        std::fprintf(f, "%ld,%.17g,%.17g\n", r.t, r.loss, envelope);
        envelope *= decay;
    }
    std::fclose(f);

    appendf(extras, "eta=%.17g\nenvelope_decay=%.17g\n", inst.eta, decay);
    return bound_report(inst.trace, inst.hinf, inst.h0, inst.ht, inst.r0, inst.eta,
                        cfg.m, cfg.delta);
}

// One full run against the H(0)-eigenbasis loss prediction.
BoundReport run_eigen_predict(const ExperimentConfig& cfg, std::string& extras) {
    const TrainingInstance inst =
        run_training_instance(cfg, cfg.m, cfg.seed, cfg.steps, true);
    write_instance_artifacts(cfg, inst);

    const LossPrediction pred = predicted_loss_curve(
        inst.h0, inst.r0, inst.eta, (long)inst.trace.steps.size() - 1);
    std::FILE* f = open_csv(cfg.out_dir + "/predict.csv");
    std::fprintf(f, "t,actual_norm,predicted_norm,rel_err\n");
    for (std::size_t t = 0; t < inst.trace.steps.size(); ++t) {
        const double actual = std::sqrt(inst.trace.steps[t].loss);
        const double rel =
            actual > 0.0 ? std::abs(pred.values[t] - actual) / actual
                         : std::abs(pred.values[t]);
        std::fprintf(f, "%ld,%.17g,%.17g,%.17g\n", inst.trace.steps[t].t, actual,
                     pred.values[t], rel);
    }
    std::fclose(f);

    appendf(extras, "eta=%.17g\nenvelope_valid=%d\n", inst.eta,
            pred.envelope_valid ? 1 : 0);
    return bound_report(inst.trace, inst.hinf, inst.h0, inst.ht, inst.r0, inst.eta,
                        cfg.m, cfg.delta);
}

// Row and Frobenius drift against their bounds over an m grid. The
// Frobenius check gates at the grid point nearest cfg.m; the trend check
// requires the per-m median ratio to be non-increasing.
BoundReport run_drift(const ExperimentConfig& cfg, std::string& extras) {
    const std::vector<long> grid = grid_or(cfg.m_grid, {2048, 8192, 32768});
    std::FILE* f = open_csv(cfg.out_dir + "/drift.csv");
    std::fprintf(f, "m,seed,max_row_drift,row_bound,b_fro_drift,fro_bound\n");
    std::map<long, std::vector<double>> fro_ratios;
    long total_runs = 0, row_violations = 0;
    for (long m : grid) {
        for (long s = 0; s < cfg.seed_count; ++s) {
            const std::uint64_t seed = cfg.seed + std::uint64_t(s);
            const TrainingInstance inst =
                run_training_instance(cfg, m, seed, cfg.steps, false);
            const StepRecord& last = inst.trace.steps.back();
            const double lambda0 = std::max(inst.hinf.lambda_min(), 1e-8);
            const double row_bound = 4.0 * std::sqrt(double(inst.data.n())) *
                                     inst.r0.norm() /
                                     (std::sqrt(double(m)) * lambda0);
            const double fro_bound = b_drift_bound(inst.hinf, inst.r0);
            if (last.max_row_drift > 2.0 * row_bound + 1e-12) ++row_violations;
            ++total_runs;
            std::fprintf(f, "%ld,%llu,%.17g,%.17g,%.17g,%.17g\n", m,
                         (unsigned long long)seed, last.max_row_drift, row_bound,
                         last.b_fro_drift, fro_bound);
            fro_ratios[m].push_back(last.b_fro_drift / fro_bound);
        }
    }
    std::fclose(f);

    long target_m = grid.front();
    for (long m : grid)
        if (std::llabs(m - cfg.m) < std::llabs(target_m - cfg.m)) target_m = m;
    std::vector<double> medians;
    std::FILE* fit = open_csv(cfg.out_dir + "/drift_fit.csv");
    std::fprintf(fit, "m,median_fro_ratio\n");
    for (long m : grid) {
        medians.push_back(median_of(fro_ratios[m]));
        std::fprintf(fit, "%ld,%.17g\n", m, medians.back());
        appendf(extras, "fro_ratio_median_m%ld=%.17g\n", m, medians.back());
    }
    std::fclose(fit);

    double worst_increase = 0.0;
    for (std::size_t i = 0; i + 1 < medians.size(); ++i)
        worst_increase = std::max(worst_increase, medians[i + 1] - medians[i]);
    const double target_median =
        medians[std::size_t(std::find(grid.begin(), grid.end(), target_m) -
                            grid.begin())];

    BoundReport report;
    report.entries.push_back(gate_entry("row-drift-violations", 0.05,
                                        double(row_violations) / double(total_runs)));
    report.entries.push_back(gate_entry("fro-drift-ratio", 2.0, target_median));
    report.entries.push_back(
        gate_entry("fro-trend-increase", 0.0, std::max(0.0, worst_increase)));
    return report;
}

// Empirical Rademacher complexity never above the formula bound, per seed.
BoundReport run_rademacher(const ExperimentConfig& cfg, std::string& extras) {
    const Variant variant = variant_from_name(cfg.variant);
    const Dataset data =
        cfg.dataset_path.empty()
            ? gen_data(cfg.n, cfg.d, gen_mode_from_name(cfg.mode), cfg.seed,
                       cfg.min_angle_deg, cfg.teacher_width)
            : read_dataset_csv(cfg.dataset_path);
    std::FILE* f = open_csv(cfg.out_dir + "/rademacher.csv");
    std::fprintf(f, "seed,empirical,standard_error,linear_term,flip_term,bound,d_eff\n");
    double worst_excess = 0.0;
    for (long s = 0; s < cfg.seed_count; ++s) {
        const std::uint64_t seed = cfg.seed + std::uint64_t(s);
        Dims dims;
        dims.m = cfg.m;
        dims.d = data.d();
        dims.l = cfg.l;
        dims.k = cfg.k;
        const Network net = init_network(variant, dims, seed);
        const KernelMatrix h0 = h_empirical(net, data.X);
        const double d_eff = 1.0 / h0.H.diagonal().maxCoeff();
        const FeatureMatrix z0 = feature_matrix(net, data.X);
        const Matrix events = conditional_events(net, data.X, cfg.radius);
        const RademacherEstimate est = rademacher_empirical(
            z0, cfg.tau, events, cfg.radius, cfg.eps_samples, seed);
        const double bnd =
            rademacher_bound(cfg.radius, cfg.tau, data.n(), d_eff, cfg.m, cfg.delta);
        worst_excess = std::max(worst_excess, est.value - bnd);
        std::fprintf(f, "%llu,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n",
                     (unsigned long long)seed, est.value, est.standard_error,
                     est.linear_term, est.flip_term, bnd, d_eff);
    }
    std::fclose(f);

    appendf(extras, "worst_excess=%.17g\n", worst_excess);
    BoundReport report;
    report.entries.push_back(
        gate_entry("rademacher-excess", 0.0, std::max(0.0, worst_excess)));
    return report;
}

// Teacher-task L1 gap trend over an n grid; train and heldout rows come
// from one 2n-row draw so both halves share the seeded teacher.
BoundReport run_generalization(const ExperimentConfig& cfg, std::string& extras) {
    const Variant variant = variant_from_name(cfg.variant);
    const std::vector<long> grid = grid_or(cfg.n_grid, {8, 16, 32});
    std::FILE* f = open_csv(cfg.out_dir + "/generalization.csv");
    std::fprintf(f, "n,seed,train_l1,heldout_l1,gap\n");
    std::map<long, std::vector<double>> gaps;
    for (long nn : grid) {
        for (long s = 0; s < cfg.seed_count; ++s) {
            const std::uint64_t seed = cfg.seed + std::uint64_t(s);
            const Dataset both = gen_data(2 * nn, cfg.d, GenMode::teacher, seed,
                                          cfg.min_angle_deg, cfg.teacher_width);
            const Dataset train_set = slice_rows(both, 0, nn);
            const Dataset heldout = slice_rows(both, nn, nn);
            Dims dims;
            dims.m = cfg.m;
            dims.d = cfg.d;
            dims.l = cfg.l;
            dims.k = cfg.k;
            const Network net0 = init_network(variant, dims, seed);
            Network net_t = net0;
            if (cfg.steps > 0) {
                TrainConfig tc;
                tc.eta = cfg.eta > 0.0 ? cfg.eta
                                       : auto_eta(h_empirical(net0, train_set.X));
                tc.steps = cfg.steps;
                tc.loss_floor = 0.0;
                tc.track_flips = false;
                tc.track_drift = false;
                net_t = train(net0, train_set, tc).first;
            }
            const GapReport gap = generalization_gap(net_t, train_set, heldout);
            std::fprintf(f, "%ld,%llu,%.17g,%.17g,%.17g\n", nn,
                         (unsigned long long)seed, gap.train_l1, gap.heldout_l1,
                         gap.gap);
            gaps[nn].push_back(gap.gap);
        }
    }
    std::fclose(f);

    std::vector<double> ns, medians;
    std::FILE* fit = open_csv(cfg.out_dir + "/generalization_fit.csv");
    std::fprintf(fit, "n,median_gap\n");
    for (long nn : grid) {
        ns.push_back(double(nn));
        medians.push_back(median_of(gaps[nn]));
        std::fprintf(fit, "%ld,%.17g\n", nn, medians.back());
    }
    std::fclose(fit);

    const double rho = spearman_rho(ns, medians);
    appendf(extras, "gap_spearman_rho=%.17g\n", rho);
    BoundReport report;
    report.entries.push_back(gate_entry("gap-trend", 0.2, rho + 1.0));
    return report;
}

// Pairwise inner-product distortion at the formula target dimension, both
// operator kinds, many seeds.
BoundReport run_jl(const ExperimentConfig& cfg, std::string& extras) {
    const double eps = cfg.jl_eps;
    if (!(eps > 0.0 && eps < 1.0))
        throw std::invalid_argument("jl-distortion: jl_eps must be in (0, 1)");
    const Index l_target = Index(
        std::ceil(8.0 * std::log(double(cfg.n) * double(cfg.n) / cfg.delta) /
                  (eps * eps)));
    const Dataset data = gen_data(cfg.n, cfg.d, GenMode::sphere_uniform, cfg.seed);

    std::FILE* f = open_csv(cfg.out_dir + "/jl.csv");
    std::fprintf(f, "kind,seed,l,max_ip_error,mean_ip_error\n");
    long gauss_fail = 0, hada_fail = 0;
    for (long s = 0; s < cfg.seed_count; ++s) {
        const std::uint64_t seed = cfg.seed + 1 + std::uint64_t(s);
        const JLOperator gauss = make_gaussian(l_target, cfg.d, seed);
        const DistortionStats gs = distortion_stats(data.X, gauss);
        if (gs.max_ip_error > eps) ++gauss_fail;
        std::fprintf(f, "gaussian,%llu,%ld,%.17g,%.17g\n",
                     (unsigned long long)seed, (long)l_target, gs.max_ip_error,
                     gs.mean_ip_error);
        const JLOperator hada = make_fast_hadamard(l_target, cfg.d, seed);
        const DistortionStats hs = distortion_stats(data.X, hada);
        if (hs.max_ip_error > eps) ++hada_fail;
        std::fprintf(f, "fast-hadamard,%llu,%ld,%.17g,%.17g\n",
                     (unsigned long long)seed, (long)l_target, hs.max_ip_error,
                     hs.mean_ip_error);
    }
    std::fclose(f);

    appendf(extras, "l_target=%ld\n", (long)l_target);
    BoundReport report;
    report.entries.push_back(gate_entry("gaussian-jl-failures", 0.01,
                                        double(gauss_fail) / double(cfg.seed_count)));
    report.entries.push_back(gate_entry("hadamard-jl-failures", 0.01,
                                        double(hada_fail) / double(cfg.seed_count)));
    return report;
}

// Per-iteration cost of the three variants at one shape. The flop share
// gates; wall-clock numbers are reported in the summary and bench.csv only,
// keeping bounds.csv byte-reproducible.
BoundReport run_bench(const ExperimentConfig& cfg, std::string& extras) {
    BenchDims dims;
    dims.n = cfg.n;
    dims.d = cfg.d;
    dims.m = cfg.m;
    dims.l = cfg.l;
    dims.k = cfg.k;
    std::vector<BenchResult> results;
    for (Variant v : {Variant::dense, Variant::bc, Variant::abc})
        results.push_back(time_per_iter(v, dims, cfg.bench_iters, cfg.seed));
    write_bench_csv(results, cfg.out_dir + "/bench.csv");

    const double flop_share =
        double(results[2].flops_per_iter) / double(results[0].flops_per_iter);
    const double wall_share =
        double(results[2].median_ns) / double(results[0].median_ns);
    for (const auto& r : results)
        appendf(extras, "median_ns_%s=%lld\n", variant_name(r.variant),
                (long long)r.median_ns);
    appendf(extras, "wall_share_abc_dense=%.17g (informative)\n", wall_share);

    BoundReport report;
    report.entries.push_back(gate_entry("abc-flop-share", 0.5, flop_share));
    return report;
}

}  // namespace

const std::vector<std::string>& experiment_names() {
    static const std::vector<std::string> names = {
        "kernel-concentration", "kernel-stability", "convergence",
        "eigen-predict",        "drift",            "rademacher",
        "generalization",       "jl-distortion",    "bench"};
    return names;
}

BoundReport run_experiment(const std::string& name, const ExperimentConfig& cfg) {
    const auto& names = experiment_names();
    if (std::find(names.begin(), names.end(), name) == names.end()) {
        std::string msg = "unknown experiment '" + name + "'; expected one of:";
        for (const auto& n : names) msg += " " + n;
        throw std::invalid_argument(msg);
    }
    io::ensure_dir(cfg.out_dir);
    io::DirLock lock(cfg.out_dir);
    io::write_text(cfg.out_dir + "/config.echo", config_to_json(cfg));

    std::string extras;
    BoundReport report;
    if (name == "kernel-concentration") report = run_concentration(cfg, extras);
    else if (name == "kernel-stability") report = run_stability(cfg, extras);
    else if (name == "convergence") report = run_convergence(cfg, extras);
    else if (name == "eigen-predict") report = run_eigen_predict(cfg, extras);
    else if (name == "drift") report = run_drift(cfg, extras);
    else if (name == "rademacher") report = run_rademacher(cfg, extras);
    else if (name == "generalization") report = run_generalization(cfg, extras);
    else if (name == "jl-distortion") report = run_jl(cfg, extras);
    else report = run_bench(cfg, extras);

    write_bound_report_csv(report, cfg.out_dir + "/bounds.csv");
    std::string summary = bound_report_summary(report);
    if (!extras.empty()) summary += "\n" + extras;
    io::write_text(cfg.out_dir + "/summary.txt", summary);
    io::write_meta(cfg.out_dir, {{"experiment", name}});
    return report;
}

}  // namespace fnet
