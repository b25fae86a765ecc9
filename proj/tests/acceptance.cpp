// Acceptance suite: every verified conclusion checked at the exact shapes
// and tolerances it is claimed for, one line per check. argv[1] names the
// CLI binary, used by the byte-reproducibility check. Exits nonzero when
// any line fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "fnet/analysis.hpp"
#include "fnet/bench.hpp"
#include "fnet/dataset.hpp"
#include "fnet/errors.hpp"
#include "fnet/experiments.hpp"
#include "fnet/flops.hpp"
#include "fnet/io.hpp"
#include "fnet/jl.hpp"
#include "fnet/network.hpp"
#include "fnet/ntk.hpp"
#include "fnet/rng.hpp"
#include "fnet/trainer.hpp"

using namespace fnet;
namespace fs = std::filesystem;

namespace {

bool g_all_pass = true;

struct Timer {
    std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
    double s() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
            .count();
    }
};

std::string fmt(const char* f, ...) {
    char buf[768];
    va_list args;
    va_start(args, f);
    std::vsnprintf(buf, sizeof buf, f, args);
    va_end(args);
    return buf;
}

void report(bool pass, const char* id, const std::string& detail, double secs) {
    std::printf("[%s] %-24s %s (%.1fs)\n", pass ? "PASS" : "FAIL", id,
                detail.c_str(), secs);
    std::fflush(stdout);
    if (!pass) g_all_pass = false;
}

double median_of(std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const std::size_t h = v.size() / 2;
    return v.size() % 2 ? v[h] : 0.5 * (v[h - 1] + v[h]);
}

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
    return sxy / sxx;
}

double spec_norm(const KernelMatrix& K) {
    const SpectralData& s = K.spectral();
    return std::max(std::abs(s.eigenvalues(0)),
                    std::abs(s.eigenvalues(s.eigenvalues.size() - 1)));
}

// Final-state drift of the effective weight rows, computed directly from
// the two parameter states (training runs keep per-step instrumentation
// off for speed).
double max_row_drift_final(const Network& net_t, const Network& net_0) {
    const Matrix dB = net_t.B - net_0.B;
    Matrix dW;
    switch (net_t.variant) {
        case Variant::dense: dW = dB; break;
        case Variant::bc: dW = dB * net_t.C; break;
        case Variant::abc: dW = (net_t.A * dB) * net_t.C; break;
    }
    return dW.rowwise().norm().maxCoeff();
}

Dims make_dims(Index m, Index d, Index l, Index k) {
    Dims dims;
    dims.m = m;
    dims.d = d;
    dims.l = l;
    dims.k = k;
    return dims;
}

BenchDims make_bdims(Index n, Index d, Index m, Index l, Index k) {
    BenchDims dims;
    dims.n = n;
    dims.d = d;
    dims.m = m;
    dims.l = l;
    dims.k = k;
    return dims;
}

// CSV with every *_ns / *_nanos column zeroed; wall-clock readings are the
// one sanctioned source of nondeterminism in data files.
std::string normalized_csv(const std::string& path) {
    const std::string text = io::read_text(path);
    const std::size_t eol = text.find('\n');
    if (eol == std::string::npos) return text;
    std::vector<bool> zero;
    {
        std::size_t start = 0;
        const std::string header = text.substr(0, eol);
        while (start <= header.size()) {
            std::size_t comma = header.find(',', start);
            if (comma == std::string::npos) comma = header.size();
            const std::string cell = header.substr(start, comma - start);
            const bool ns = cell.size() >= 3 &&
                            (cell.rfind("_ns") == cell.size() - 3 ||
                             (cell.size() >= 6 &&
                              cell.rfind("_nanos") == cell.size() - 6));
            zero.push_back(ns);
            if (comma == header.size()) break;
            start = comma + 1;
        }
    }
    if (std::none_of(zero.begin(), zero.end(), [](bool b) { return b; }))
        return text;
    std::string out = text.substr(0, eol + 1);
    std::size_t pos = eol + 1;
    while (pos < text.size()) {
        std::size_t line_end = text.find('\n', pos);
        if (line_end == std::string::npos) line_end = text.size();
        std::size_t start = pos, col = 0;
        while (start <= line_end) {
            std::size_t comma = text.find(',', start);
            if (comma == std::string::npos || comma > line_end) comma = line_end;
            if (col < zero.size() && zero[col]) out += "0";
            else out.append(text, start, comma - start);
            if (comma == line_end) break;
            out += ',';
            start = comma + 1;
            ++col;
        }
        out += '\n';
        pos = line_end + 1;
    }
    return out;
}

}  // namespace

int main(int argc, char** argv) {
    const std::string cli = argc > 1 ? argv[1] : "";

    // 1. Analytic gradients against central differences, all variants.
    {
        Timer t;
        try {
            const double h = 1e-6;
            double worst = 0.0;
            int instances = 0;
            for (Variant variant : {Variant::dense, Variant::bc, Variant::abc}) {
                for (int s = 1; s <= 50; ++s) {
                    Rng pick(7000 + 100 * int(variant) + s);
                    const Index n = 2 + Index(pick.next_index(7));    // [2, 8]
                    const Index d = 2 + Index(pick.next_index(15));   // [2, 16]
                    const Index m = 4 + Index(pick.next_index(61));   // [4, 64]
                    const Index l = 1 + Index(pick.next_index(8));    // [1, 8]
                    const Index k = 1 + Index(pick.next_index(16));   // [1, 16]
                    const Dataset data =
                        gen_data(n, d, GenMode::sphere_uniform, 300 + s);
                    Network net =
                        init_network(variant, make_dims(m, d, l, k), 500 + s);
                    const Matrix g = grad_B(net, data);
                    double emax = 0.0, scale = 0.0;
                    for (int c = 0; c < 6; ++c) {
                        const Index r = Index(pick.next_index(net.B.rows()));
                        const Index q = Index(pick.next_index(net.B.cols()));
                        const double saved = net.B(r, q);
                        net.B(r, q) = saved + h;
                        const double hi =
                            (data.y - forward(net, data.X)).squaredNorm();
                        net.B(r, q) = saved - h;
                        const double lo =
                            (data.y - forward(net, data.X)).squaredNorm();
                        net.B(r, q) = saved;
                        const double fd = (hi - lo) / (4.0 * h);
                        emax = std::max(emax, std::abs(fd - g(r, q)));
                        scale = std::max(
                            {scale, std::abs(fd), std::abs(g(r, q))});
                    }
                    worst = std::max(worst, emax / std::max(scale, 1e-12));
                    ++instances;
                }
            }
            const bool pass = worst <= 1e-6 && t.s() < 30.0;
            report(pass, "1 gradient-fd",
                   fmt("max rel err %.3g over %d instances", worst, instances),
                   t.s());
        } catch (const std::exception& e) {
            report(false, "1 gradient-fd", fmt("exception: %s", e.what()), t.s());
        }
    }

    // 2. ||H(0) - Hinf||_max concentrates at the Hoeffding rate in m.
    {
        Timer t;
        try {
            const Index n = 16, d = 32, l = 16;
            const Dataset data = gen_data(n, d, GenMode::sphere_uniform, 1);
            const std::vector<long> grid = {256, 1024, 4096, 16384};
            std::vector<double> ms, medians;
            for (long m : grid) {
                std::vector<double> devs;
                for (int s = 0; s < 20; ++s) {
                    const Network net =
                        init_network(Variant::bc, make_dims(m, d, l, 0), 1 + s);
                    const KernelMatrix h0 = h_empirical(net, data.X);
                    const KernelMatrix hinf = hinf_closed_form(data.X, &net.C);
                    devs.push_back((h0.H - hinf.H).cwiseAbs().maxCoeff());
                }
                ms.push_back(double(m));
                medians.push_back(median_of(devs));
            }
            const double slope = loglog_slope(ms, medians);
            const bool pass = slope >= -0.65 && slope <= -0.35 && t.s() < 120.0;
            report(pass, "2 kernel-concentration",
                   fmt("median-dev slope %.3f (want [-0.65, -0.35])", slope),
                   t.s());
        } catch (const std::exception& e) {
            report(false, "2 kernel-concentration", fmt("exception: %s", e.what()),
                   t.s());
        }
    }

    // 3. Closed-form kernel at canonical angles, against Monte Carlo.
    {
        Timer t;
        try {
            Matrix X(4, 2);
            X << 1.0, 0.0, std::cos(M_PI / 3.0), std::sin(M_PI / 3.0), 0.0, 1.0,
                -1.0, 0.0;
            const KernelMatrix closed = hinf_closed_form(X);
            const double expect[4] = {0.5, 1.0 / 6.0, 0.0, 0.0};
            double closed_err = 0.0;
            for (int j = 0; j < 4; ++j)
                closed_err =
                    std::max(closed_err, std::abs(closed.H(0, j) - expect[j]));
            const KernelMatrix mc =
                hinf_monte_carlo(X, nullptr, nullptr, 1000000, 11);
            bool mc_ok = true;
            double mc_err = 0.0;
            for (int j = 0; j < 4; ++j) {
                const double dev = std::abs(mc.H(0, j) - closed.H(0, j));
                const double se = (*mc.standard_error)(0, j);
                mc_ok = mc_ok && dev <= 3.0 * se + 1e-15 && dev <= 2e-3;
                mc_err = std::max(mc_err, dev);
            }
            const bool pass = closed_err <= 1e-12 && mc_ok && t.s() < 60.0;
            report(pass, "3 kernel-closed-form",
                   fmt("analytic err %.2g, MC dev %.2g at 1e6 samples", closed_err,
                       mc_err),
                   t.s());
        } catch (const std::exception& e) {
            report(false, "3 kernel-closed-form", fmt("exception: %s", e.what()),
                   t.s());
        }
    }

    // 4/5/6. Shared 20-seed training suite at m = 8192: geometric envelope,
    // spectral loss prediction, drift bounds. Plus the 6b width grid.
    int env_ok = 0, strict_ok = 0, pred_ok = 0, row_ok = 0;
    int total_runs = 0, bc_runs = 0;
    double pred_worst_passing = 0.0;
    bool suite_ran = false;
    double suite_secs = 0.0;
    {
        Timer t;
        try {
            const Index n = 16, d = 32, l = 16, k = 512, m = 8192;
            const long steps = 2000;
            for (Variant variant : {Variant::bc, Variant::abc}) {
                for (int s = 1; s <= 20; ++s) {
                    const Dataset data =
                        gen_data(n, d, GenMode::sphere_separated, 1000 + s, 30.0);
                    const Network net0 =
                        init_network(variant, make_dims(m, d, l, k), 1000 + s);
                    const KernelMatrix h0 = h_empirical(net0, data.X);
                    const double eta = 1.0 / (2.0 * spec_norm(h0));
                    const Vector r0 = data.y - forward(net0, data.X);
                    TrainConfig tc;
                    tc.eta = eta;
                    tc.steps = steps;
                    tc.loss_floor = 0.0;
                    tc.track_flips = false;
                    tc.track_drift = false;
                    const auto [net_t, trace] = train(net0, data, tc);
                    ++total_runs;

                    // Strict decrease is required until the loss first falls
                    // below the trainer's convergence floor; past that the
                    // residual sits at the double-precision noise level
                    // (~1e-28 here) where bitwise monotonicity is vacuous.
                    const double conv_floor = 1e-10;
                    const double rate = 1.0 - eta * h0.lambda_min() / 2.0;
                    bool env = h0.lambda_min() > 0.0, strict = true;
                    double envelope = trace.loss0();
                    for (std::size_t i = 1; i < trace.steps.size(); ++i) {
                        envelope *= rate;
                        env = env &&
                              trace.steps[i].loss <= envelope * (1.0 + 1e-12);
                        if (trace.steps[i - 1].loss >= conv_floor)
                            strict = strict &&
                                     trace.steps[i].loss < trace.steps[i - 1].loss;
                    }
                    env_ok += env;
                    strict_ok += strict;

                    double lambda0 = h0.lambda_min();  // abc reference
                    if (variant == Variant::bc) {
                        ++bc_runs;
                        const KernelMatrix hinf =
                            hinf_closed_form(data.X, &net0.C);
                        lambda0 = hinf.lambda_min();
                        const LossPrediction pred =
                            predicted_loss_curve(h0, r0, eta, steps);
                        double worst = 0.0;
                        for (std::size_t i = 0; i < trace.steps.size(); ++i) {
                            const double loss = trace.steps[i].loss;
                            if (loss < 1e-3) continue;
                            worst = std::max(
                                worst, std::abs(pred.values[i] - std::sqrt(loss)) /
                                           std::sqrt(loss));
                        }
                        if (worst <= 0.15) {
                            ++pred_ok;
                            pred_worst_passing =
                                std::max(pred_worst_passing, worst);
                        }
                    }
                    const double r_prime = 4.0 * std::sqrt(double(n)) * r0.norm() /
                                           (std::sqrt(double(m)) *
                                            std::max(lambda0, 1e-8));
                    row_ok += max_row_drift_final(net_t, net0) <= 2.0 * r_prime;
                }
            }
            suite_ran = true;
            suite_secs = t.s();
            const bool pass = env_ok >= 38 && strict_ok == total_runs &&
                              total_runs == 40 && t.s() < 600.0;
            report(pass, "4 convergence-envelope",
                   fmt("envelope %d/%d, strict decrease %d/%d", env_ok, total_runs,
                       strict_ok, total_runs),
                   t.s());
        } catch (const std::exception& e) {
            report(false, "4 convergence-envelope", fmt("exception: %s", e.what()),
                   t.s());
        }
    }
    {
        Timer t;
        try {
            if (!suite_ran) throw std::runtime_error("training suite unavailable");
            const bool pass = pred_ok >= 16 && bc_runs == 20;
            report(pass, "5 eigen-prediction",
                   fmt("within 15%% for %d/%d seeds (worst passing %.3f)", pred_ok,
                       bc_runs, pred_worst_passing),
                   suite_secs);
        } catch (const std::exception& e) {
            report(false, "5 eigen-prediction", fmt("exception: %s", e.what()),
                   t.s());
        }
    }
    {
        Timer t;
        try {
            if (!suite_ran) throw std::runtime_error("training suite unavailable");
            // The Frobenius ratio saturates at ~1.001-1.002 for m >= 8192
            // here: the adjacent-width median gap (~7e-4) sits below the
            // resolution of a 10-seed median (se ~8e-4), so the trend is
            // gated on 30-seed medians; 10-seed medians are reported
            // alongside and the <= 2 check stays at 10 seeds.
            const Index n = 16, d = 32, l = 16;
            const long steps = 2000;
            std::map<long, double> med30, med10;
            for (long m : {2048L, 8192L, 32768L}) {
                std::vector<double> ratios;
                for (int s = 0; s < 30; ++s) {
                    const Dataset data =
                        gen_data(n, d, GenMode::sphere_separated, s, 30.0);
                    const Network net0 =
                        init_network(Variant::bc, make_dims(m, d, l, 0), s);
                    const KernelMatrix h0 = h_empirical(net0, data.X);
                    const Vector r0 = data.y - forward(net0, data.X);
                    TrainConfig tc;
                    tc.eta = 1.0 / (2.0 * spec_norm(h0));
                    tc.steps = steps;
                    tc.loss_floor = 0.0;
                    tc.track_flips = false;
                    tc.track_drift = false;
                    const Network net_t = train(net0, data, tc).first;
                    const KernelMatrix hinf = hinf_closed_form(data.X, &net0.C);
                    ratios.push_back((net_t.B - net0.B).norm() /
                                     b_drift_bound(hinf, r0));
                }
                med10[m] = median_of({ratios.begin(), ratios.begin() + 10});
                med30[m] = median_of(ratios);
            }
            const bool pass = row_ok >= 38 && med10[8192] <= 2.0 &&
                              med30[2048] >= med30[8192] &&
                              med30[8192] >= med30[32768];
            report(pass, "6 drift-bounds",
                   fmt("row %d/%d within 2x, fro med30 %.4f/%.4f/%.4f (med10 "
                       "%.4f/%.4f/%.4f)",
                       row_ok, total_runs, med30[2048], med30[8192],
                       med30[32768], med10[2048], med10[8192], med10[32768]),
                   t.s());
        } catch (const std::exception& e) {
            report(false, "6 drift-bounds", fmt("exception: %s", e.what()), t.s());
        }
    }

    // 7. Activation-flip fraction at a fixed horizon decreases in width.
    {
        Timer t;
        try {
            const Index n = 16, d = 32, l = 16;
            const std::vector<long> grid = {1024, 4096, 16384};
            std::vector<double> ms, medians;
            for (long m : grid) {
                std::vector<double> fracs;
                for (int s = 1; s <= 10; ++s) {
                    const Dataset data =
                        gen_data(n, d, GenMode::sphere_separated, 1000 + s, 30.0);
                    const Network net0 =
                        init_network(Variant::bc, make_dims(m, d, l, 0), 1000 + s);
                    const KernelMatrix h0 = h_empirical(net0, data.X);
                    TrainConfig tc;
                    tc.eta = 1.0 / (2.0 * spec_norm(h0));
                    tc.steps = 1000;
                    tc.loss_floor = 0.0;
                    tc.track_flips = true;
                    tc.track_drift = false;
                    const TrainTrace trace = train(net0, data, tc).second;
                    fracs.push_back(double(trace.steps.back().total_flips) /
                                    (double(m) * double(n)));
                }
                ms.push_back(double(m));
                medians.push_back(median_of(fracs));
            }
            const double rho = spearman_rho(ms, medians);
            const bool pass = rho <= -0.9;
            report(pass, "7 flip-scaling",
                   fmt("median flip fractions %.2g/%.2g/%.2g, rho %.2f", medians[0],
                       medians[1], medians[2], rho),
                   t.s());
        } catch (const std::exception& e) {
            report(false, "7 flip-scaling", fmt("exception: %s", e.what()), t.s());
        }
    }

    // 8. JL distortion at the formula dimension, both operator kinds.
    {
        Timer t;
        try {
            const Index n = 256, d = 4096;
            const double eps = 0.2, delta = 0.05;
            const Index l = Index(std::ceil(
                8.0 * std::log(double(n) * double(n) / delta) / (eps * eps)));
            const Matrix X = gen_data(n, d, GenMode::sphere_uniform, 3).X;
            int gauss_fail = 0, hada_fail = 0;
            for (int s = 1; s <= 100; ++s) {
                if (distortion_stats(X, make_gaussian(l, d, 4000 + s))
                        .max_ip_error > eps)
                    ++gauss_fail;
                if (distortion_stats(X, make_fast_hadamard(l, d, 4000 + s))
                        .max_ip_error > eps)
                    ++hada_fail;
            }
            const bool pass = l == 2818 && gauss_fail <= 1 && hada_fail <= 1 &&
                              t.s() < 60.0;
            report(pass, "8 jl-distortion",
                   fmt("l=%ld, failures gaussian %d/100, fast-hadamard %d/100",
                       long(l), gauss_fail, hada_fail),
                   t.s());
        } catch (const std::exception& e) {
            report(false, "8 jl-distortion", fmt("exception: %s", e.what()), t.s());
        }
    }

    // 9. Fast transform: exact agreement with its materialized matrix, and
    // the counted flops beat a dense projection threefold. Wall time is
    // reported, not gated.
    {
        Timer t;
        try {
            const JLOperator small = make_fast_hadamard(24, 48, 9);
            const Matrix M = materialize(small);
            const Matrix Xs = gaussian_matrix(10, 48, 1.0, 21);
            const double equiv_err =
                (apply(small, Xs) - Xs * M.transpose()).cwiseAbs().maxCoeff();

            const Index d = 4096, l = 64, rows = 64;
            const Matrix Xb = gaussian_matrix(rows, d, 1.0, 22);
            const JLOperator fast = make_fast_hadamard(l, d, 23);
            const JLOperator dense_op = make_gaussian(l, d, 23);
            flops::reset();
            apply(dense_op, Xb);
            const std::uint64_t dense_fl = flops::read();
            flops::reset();
            apply(fast, Xb);
            const std::uint64_t fast_fl = flops::read();

            auto wall_ns = [&](const JLOperator& op) {
                std::vector<double> samples;
                for (int rep = 0; rep < 5; ++rep) {
                    Timer w;
                    apply(op, Xb);
                    samples.push_back(w.s() * 1e9);
                }
                return median_of(samples);
            };
            const double wall_ratio = wall_ns(fast) / wall_ns(dense_op);
            const bool pass = equiv_err <= 1e-12 && 3 * fast_fl <= dense_fl;
            report(pass, "9 jl-fast-transform",
                   fmt("materialized err %.2g, flop share %.3f, wall share %.2f "
                       "(informative)",
                       equiv_err, double(fast_fl) / double(dense_fl), wall_ratio),
                   t.s());
        } catch (const std::exception& e) {
            report(false, "9 jl-fast-transform", fmt("exception: %s", e.what()),
                   t.s());
        }
    }

    // 10. Cost model: closed-form dense/abc ratio above 2 at production
    // shape, and the instrumented counter reproduces the model exactly.
    {
        Timer t;
        try {
            const BenchDims big = make_bdims(64, 1024, 16384, 64, 256);
            const double ratio =
                double(flop_count(Variant::dense, big).flops_total_per_iter) /
                double(flop_count(Variant::abc, big).flops_total_per_iter);

            bool counters_ok = true;
            const BenchDims toy = make_bdims(3, 5, 8, 4, 6);
            const Dataset toy_data = gen_data(3, 5, GenMode::sphere_uniform, 41);
            for (Variant variant : {Variant::dense, Variant::bc, Variant::abc}) {
                const Network net = init_network(
                    variant, make_dims(toy.m, toy.d, toy.l, toy.k), 42);
                flops::reset();
                gd_step(net, toy_data, 1e-3);
                counters_ok =
                    counters_ok &&
                    flops::read() ==
                        flop_count(variant, toy).flops_total_per_iter;
            }

            const BenchResult dense_t = time_per_iter(Variant::dense, big, 9, 7);
            const BenchResult abc_t = time_per_iter(Variant::abc, big, 9, 7);
            const double wall_ratio =
                double(abc_t.median_ns) / double(dense_t.median_ns);
            const bool pass = ratio > 2.0 && counters_ok;
            report(pass, "10 cost-model",
                   fmt("dense/abc flop ratio %.2f, counters %s, wall share %.2f "
                       "(informative)",
                       ratio, counters_ok ? "exact" : "MISMATCH", wall_ratio),
                   t.s());
        } catch (const std::exception& e) {
            report(false, "10 cost-model", fmt("exception: %s", e.what()), t.s());
        }
    }

    // 11. Rademacher estimate: MC within 3 standard errors of the exhaustive
    // 2^n enumeration, and never above the formula bound.
    {
        Timer t;
        try {
            const Index n = 12, d = 16, m = 512, l = 16, k = 16;
            const double tau = 2.0, R = 0.01, delta = 0.1;
            const Dataset data = gen_data(n, d, GenMode::sphere_uniform, 17);
            Matrix E(n, 1 << n);
            for (Index c = 0; c < E.cols(); ++c)
                for (Index b = 0; b < n; ++b)
                    E(b, c) = (c >> b) & 1 ? 1.0 : -1.0;
            bool within = true, below = true;
            double worst_gap = 0.0;
            for (Variant variant : {Variant::dense, Variant::bc, Variant::abc}) {
                for (int s = 1; s <= 3; ++s) {
                    const Network net =
                        init_network(variant, make_dims(m, d, l, k), 600 + s);
                    const KernelMatrix h0 = h_empirical(net, data.X);
                    const FeatureMatrix z0 = feature_matrix(net, data.X);
                    const Matrix events = conditional_events(net, data.X, R);
                    const RademacherEstimate est = rademacher_empirical(
                        z0, tau, events, R, 2000, 900 + s);
                    const double exact_mean =
                        (z0.Z * E).colwise().norm().mean();
                    const double exact =
                        tau / double(n) * exact_mean + est.flip_term;
                    const double gap = std::abs(est.value - exact);
                    within = within && gap <= 3.0 * est.standard_error + 1e-12;
                    worst_gap = std::max(worst_gap, gap);
                    const double bound = rademacher_bound(
                        R, tau, n, 1.0 / h0.H.diagonal().maxCoeff(), m, delta);
                    below = below && est.value <= bound && exact <= bound;
                }
            }
            const bool pass = within && below;
            report(pass, "11 rademacher",
                   fmt("MC vs exhaustive gap %.2g (3SE %s), bound %s", worst_gap,
                       within ? "ok" : "EXCEEDED", below ? "respected" : "BROKEN"),
                   t.s());
        } catch (const std::exception& e) {
            report(false, "11 rademacher", fmt("exception: %s", e.what()), t.s());
        }
    }

    // 12. Re-running every experiment with the same config and seed gives
    // byte-identical data CSVs (wall-clock columns excepted by design).
    {
        Timer t;
        try {
            if (cli.empty())
                throw std::runtime_error("CLI binary path missing (argv[1])");
            const std::vector<std::pair<std::string, std::string>> runs = {
                {"kernel-concentration",
                 "--n 6 --d 8 --l 4 --m-grid 64 256 --seeds 3"},
                {"kernel-stability",
                 "--n 6 --d 8 --l 4 --m-grid 64 128 --seeds 2 --steps 50"},
                {"convergence", "--n 6 --d 8 --m 128 --l 4 --steps 40"},
                {"eigen-predict", "--n 6 --d 8 --m 128 --l 4 --steps 40"},
                {"drift",
                 "--n 6 --d 8 --l 4 --m-grid 64 128 --seeds 2 --steps 40"},
                {"rademacher",
                 "--n 6 --d 8 --m 64 --l 4 --seeds 2 --eps-samples 64"},
                {"generalization",
                 "--n-grid 4 6 --d 8 --m 64 --l 4 --seeds 2 --steps 20"},
                {"jl-distortion",
                 "--n 8 --d 512 --jl-eps 0.5 --delta 0.5 --seeds 2"},
                {"bench", "--n 2 --d 3 --m 8 --l 4 --k 6 --bench-iters 5"}};
            int stable = 0;
            std::string first_diff;
            for (const auto& [name, args] : runs) {
                const std::string base = "acc12/" + name;
                bool same = true;
                for (const char* suffix : {"_a", "_b"}) {
                    const std::string dir = base + suffix;
                    fs::remove_all(dir);
                    const std::string cmd = "'" + cli + "' experiment " + name +
                                            " --no-gate --seed 77 --out " + dir +
                                            " " + args + " > /dev/null 2>&1";
                    if (std::system(cmd.c_str()) != 0)
                        throw std::runtime_error(name + ": CLI run failed");
                }
                auto ends_with = [](const std::string& s, const char* suf) {
                    const std::size_t len = std::string(suf).size();
                    return s.size() >= len &&
                           s.compare(s.size() - len, len, suf) == 0;
                };
                auto data_files = [&](const std::string& dir) {
                    std::vector<std::string> files;
                    for (const auto& entry : fs::directory_iterator(dir)) {
                        const std::string f = entry.path().filename().string();
                        if (ends_with(f, ".csv") || ends_with(f, ".cache"))
                            files.push_back(f);
                    }
                    std::sort(files.begin(), files.end());
                    return files;
                };
                const std::vector<std::string> files = data_files(base + "_a");
                if (data_files(base + "_b") != files) {
                    same = false;
                    if (first_diff.empty()) first_diff = name + "/<file set>";
                }
                for (const std::string& f : files) {
                    const std::string a = base + "_a/" + f, b = base + "_b/" + f;
                    if (!fs::exists(b)) { same = false; break; }
                    const bool is_cache = f.rfind(".cache") != std::string::npos;
                    const std::string ba =
                        is_cache ? io::read_text(a) : normalized_csv(a);
                    const std::string bb =
                        is_cache ? io::read_text(b) : normalized_csv(b);
                    if (ba != bb) {
                        same = false;
                        if (first_diff.empty()) first_diff = name + "/" + f;
                        break;
                    }
                }
                stable += same;
            }
            const bool pass = stable == int(runs.size());
            report(pass, "12 reproducibility",
                   pass ? fmt("%d/%d experiments byte-stable", stable,
                              int(runs.size()))
                        : fmt("%d/%d stable; first diff %s", stable,
                              int(runs.size()), first_diff.c_str()),
                   t.s());
        } catch (const std::exception& e) {
            report(false, "12 reproducibility", fmt("exception: %s", e.what()),
                   t.s());
        }
    }

    std::printf("\nacceptance: %s\n", g_all_pass ? "ALL PASS" : "FAILURES");
    return g_all_pass ? 0 : 1;
}
