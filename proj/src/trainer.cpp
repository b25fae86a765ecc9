#include "fnet/trainer.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>

#include "fnet/errors.hpp"
#include "fnet/flops.hpp"

namespace fnet {

namespace {

using clock_type = std::chrono::steady_clock;

// One forward + gradient evaluation. grad_B, gd_step and the train loop all
// pass through here so their arithmetic is bit-identical.
struct StepEval {
    Matrix P;     // m x n preactivations
    Matrix mask;  // m x n, 0/1
    Vector u;     // n
    Vector res;   // n, y - u
    double loss;  // ||u - y||^2
};

void eval_forward(const Network& net, const Matrix& Xt, const Vector& y,
                  StepEval& ev) {
    ev.P = preactivations_from(net, Xt);
    ev.mask = relu_mask(ev.P);
    ev.u = forward_from_preacts(net, ev.P);
    ev.res = y - ev.u;
    ev.loss = ev.res.squaredNorm();
}

Matrix eval_grad(const Network& net, const Matrix& Xt, const StepEval& ev) {
    const Index n = Xt.rows();
    const double neg_inv_sqrt_m = -1.0 / std::sqrt(double(net.dims.m));
    // Zhat(r, j) = res_j * v_r * 1{P(r,j) >= 0}
    Matrix Zhat = (net.v * ev.res.transpose()).cwiseProduct(ev.mask);
    Matrix G;
    switch (net.variant) {
        case Variant::dense:
            flops::add(2ull * n * net.dims.m * net.dims.d);
            G.noalias() = neg_inv_sqrt_m * (Zhat * Xt);
            break;
        case Variant::bc:
            flops::add(2ull * n * net.dims.m * net.dims.l);
            G.noalias() = neg_inv_sqrt_m * (Zhat * Xt);
            break;
        case Variant::abc: {
            flops::add(2ull * n * net.dims.m * net.dims.k);
            Matrix R = net.A.transpose() * Zhat;  // k x n
            flops::add(2ull * n * net.dims.k * net.dims.l);
            G.noalias() = neg_inv_sqrt_m * (R * Xt);
            break;
        }
    }
    return G;
}

// Squared norms of the effective-weight-row drifts, without materializing
// the m x d row differences for the factorized variants.
void drift_stats(const Network& net, const Matrix& B0, const Matrix& gram_c,
                 double& max_row, double& b_fro) {
    Matrix dB = net.B - B0;
    b_fro = dB.norm();
    switch (net.variant) {
        case Variant::dense: {
            max_row = std::sqrt(dB.rowwise().squaredNorm().maxCoeff());
            break;
        }
        case Variant::bc: {
            Matrix t = dB * gram_c;
            max_row = std::sqrt(t.cwiseProduct(dB).rowwise().sum().maxCoeff());
            break;
        }
        case Variant::abc: {
            Matrix U = net.A * dB;  // m x l
            Matrix t = U * gram_c;
            max_row = std::sqrt(t.cwiseProduct(U).rowwise().sum().maxCoeff());
            break;
        }
    }
}

}  // namespace

Matrix grad_B(const Network& net, const Dataset& data) {
    if (data.X.cols() != net.dims.d)
        throw std::invalid_argument("grad_B: dataset dimension mismatch");
    Matrix Xt = projected_inputs(net, data.X);
    StepEval ev;
    eval_forward(net, Xt, data.y, ev);
    return eval_grad(net, Xt, ev);
}

Network gd_step(const Network& net, const Dataset& data, double eta) {
    if (!(eta >= 0.0)) throw std::invalid_argument("gd_step: eta must be >= 0");
    Network out = net;
    Matrix G = grad_B(net, data);
    flops::add(std::uint64_t(out.B.size()));
    out.B -= eta * G;
    return out;
}

std::pair<Network, TrainTrace> train(const Network& net, const Dataset& data,
                                     const TrainConfig& cfg) {
    if (!(cfg.eta > 0.0)) throw std::invalid_argument("train: eta must be > 0");
    if (cfg.steps < 1) throw std::invalid_argument("train: steps must be >= 1");
    if (data.X.cols() != net.dims.d)
        throw std::invalid_argument("train: dataset dimension mismatch");

    Network cur = net;
    TrainTrace trace;
    trace.steps.reserve(cfg.steps + 1);

    const Matrix Xt = projected_inputs(cur, data.X);  // C frozen, cached
    const Matrix B0 = cur.B;
    Matrix gram_c;
    if (cur.variant != Variant::dense && cfg.track_drift)
        gram_c = cur.C * cur.C.transpose();  // l x l

    Matrix mask0;
    StepEval ev;
    double last_finite = 0.0;
    const Index n = data.X.rows();

    for (long t = 0; t <= cfg.steps; ++t) {
        auto tic = clock_type::now();
        eval_forward(cur, Xt, data.y, ev);
        if (!std::isfinite(ev.loss))
            throw diverged_error("train: loss non-finite at step " +
                                     std::to_string(t),
                                 t, last_finite);
        last_finite = ev.loss;
        if (t == 0) mask0 = ev.mask;

        StepRecord rec{};
        rec.t = t;
        rec.loss = ev.loss;
        if (cfg.track_drift && t > 0)
            drift_stats(cur, B0, gram_c, rec.max_row_drift, rec.b_fro_drift);
        std::vector<long> flips_i(n, 0);
        if (cfg.track_flips && t > 0) {
            for (Index i = 0; i < n; ++i) {
                long c = 0;
                for (Index r = 0; r < cur.dims.m; ++r)
                    c += ev.mask(r, i) != mask0(r, i);
                flips_i[i] = c;
                rec.total_flips += c;
            }
        }

        bool last = (t == cfg.steps) || (ev.loss <= cfg.loss_floor);
        if (!last) {
            Matrix G = eval_grad(cur, Xt, ev);
            flops::add(std::uint64_t(cur.B.size()));
            cur.B -= cfg.eta * G;
        }
        rec.wall_nanos = std::chrono::duration_cast<std::chrono::nanoseconds>(
                             clock_type::now() - tic)
                             .count();
        trace.steps.push_back(rec);
        trace.flip_counts.push_back(std::move(flips_i));
        if (last) break;
    }
    return {std::move(cur), std::move(trace)};
}

double default_eta(double lambda0, Index n, double delta, Variant variant) {
    if (!(lambda0 > 0.0))
        throw std::invalid_argument("default_eta: lambda0 must be > 0");
    const double n2 = double(n) * double(n);
    if (variant == Variant::abc) {
        if (!(delta > 0.0 && delta < 1.0))
            throw std::invalid_argument("default_eta: delta must be in (0,1)");
        return lambda0 * delta * delta * delta * delta / n2;
    }
    return lambda0 / n2;
}

void write_trace_csv(const TrainTrace& trace, const std::string& path) {
    std::FILE* f = std::fopen(path.c_str(), "w");
    if (!f) throw std::runtime_error("write_trace_csv: cannot open " + path);
    std::fprintf(f, "t,loss,max_row_drift,b_fro_drift,total_flips,wall_nanos\n");
    for (const auto& r : trace.steps)
        std::fprintf(f, "%ld,%.17g,%.17g,%.17g,%llu,%lld\n", r.t, r.loss,
                     r.max_row_drift, r.b_fro_drift,
                     (unsigned long long)r.total_flips, (long long)r.wall_nanos);
    std::fclose(f);
}

}  // namespace fnet
