#include "fnet/bench.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>
#include <string>

#include "fnet/rng.hpp"
#include "fnet/trainer.hpp"

namespace fnet {

namespace {

void check_dims(Variant variant, const BenchDims& dims) {
    bool ok = dims.n >= 1 && dims.m >= 1 && dims.d >= 1;
    if (variant != Variant::dense) ok = ok && dims.l >= 1;
    if (variant == Variant::abc) ok = ok && dims.k >= 1;
    if (!ok)
        throw std::invalid_argument(std::string("flop_count: incomplete dims for ") +
                                    variant_name(variant));
}

std::int64_t nearest_rank(const std::vector<std::int64_t>& sorted, double q) {
    double pos = q * double(sorted.size() - 1);
    return sorted[(size_t)std::llround(pos)];
}

}  // namespace

CostModel flop_count(Variant variant, const BenchDims& dims) {
    check_dims(variant, dims);
    const std::uint64_t n = dims.n, d = dims.d, m = dims.m, l = dims.l,
                        k = dims.k;
    CostModel out;
    out.variant = variant;
    out.dims = dims;
    std::uint64_t update = 0;
    switch (variant) {
        case Variant::dense:
            out.flops_forward = 2 * n * m * d;
            out.flops_grad = 2 * n * m * d;
            update = m * d;
            break;
        case Variant::bc:
            out.flops_forward = 2 * n * l * d + 2 * n * m * l;
            out.flops_grad = 2 * n * m * l;
            update = m * l;
            break;
        case Variant::abc:
            out.flops_forward = 2 * n * l * d + 2 * n * k * l + 2 * n * m * k;
            out.flops_grad = 2 * n * m * k + 2 * n * k * l;
            update = k * l;
            break;
    }
    out.flops_total_per_iter = out.flops_forward + out.flops_grad + update;
    return out;
}

BenchResult time_per_iter(Variant variant, const BenchDims& dims, long iters,
                          std::uint64_t seed, std::uint64_t mem_cap_bytes) {
    CostModel model = flop_count(variant, dims);
    if (iters < 5)
        throw std::invalid_argument("time_per_iter: need iters >= 5");
    const std::uint64_t widest =
        std::max<std::uint64_t>(dims.d, std::max<std::uint64_t>(dims.l, dims.k));
    const std::uint64_t required = std::uint64_t(dims.m) * widest * 8;
    if (required > mem_cap_bytes)
        throw std::invalid_argument(
            "time_per_iter: instance needs " + std::to_string(required) +
            " bytes, cap is " + std::to_string(mem_cap_bytes));

    Dims net_dims;
    net_dims.m = dims.m;
    net_dims.d = dims.d;
    net_dims.l = dims.l;
    net_dims.k = dims.k;
    Network net = init_network(variant, net_dims, seed);
    Dataset data;
    data.X = gaussian_matrix(dims.n, dims.d, 1.0, seed + 10);
    for (Index i = 0; i < dims.n; ++i) data.X.row(i).normalize();
    data.y = Vector::Zero(dims.n);
    Rng rng(seed + 11);
    for (Index i = 0; i < dims.n; ++i) data.y(i) = rng.next_real(-1.0, 1.0);

    // The trace rows t = 0 .. steps-1 each time forward + grad + update with
    // Xt cached; the final row times a forward only and is discarded, as are
    // the two warmup rows.
    TrainConfig cfg;
    cfg.eta = 1e-6;  // rate is irrelevant to timing; keep the iterate near init
    cfg.steps = iters + 3;
    cfg.loss_floor = 0.0;
    cfg.track_flips = false;
    cfg.track_drift = false;
    auto [trained, trace] = train(net, data, cfg);

    std::vector<std::int64_t> samples;
    samples.reserve(iters);
    for (long t = 2; t < 2 + iters; ++t)
        samples.push_back(trace.steps[t].wall_nanos);
    std::sort(samples.begin(), samples.end());

    BenchResult out;
    out.variant = variant;
    out.dims = dims;
    out.iters = iters;
    out.median_ns = nearest_rank(samples, 0.5);
    out.p10_ns = nearest_rank(samples, 0.1);
    out.p90_ns = nearest_rank(samples, 0.9);
    out.flops_per_iter = model.flops_total_per_iter;
    out.achieved_flops_per_sec =
        out.median_ns > 0
            ? double(out.flops_per_iter) * 1e9 / double(out.median_ns)
            : 0.0;
    out.threads = 1;
    return out;
}

void write_bench_csv(const std::vector<BenchResult>& results,
                     const std::string& path) {
    std::FILE* f = std::fopen(path.c_str(), "w");
    if (!f) throw std::runtime_error("write_bench_csv: cannot open " + path);
    std::fprintf(f,
                 "variant,n,d,m,l,k,flops_per_iter,median_ns,p10_ns,p90_ns,"
                 "threads\n");
    for (const auto& r : results)
        std::fprintf(f, "%s,%lld,%lld,%lld,%lld,%lld,%llu,%lld,%lld,%lld,%d\n",
                     variant_name(r.variant), (long long)r.dims.n,
                     (long long)r.dims.d, (long long)r.dims.m,
                     (long long)r.dims.l, (long long)r.dims.k,
                     (unsigned long long)r.flops_per_iter,
                     (long long)r.median_ns, (long long)r.p10_ns,
                     (long long)r.p90_ns, r.threads);
    std::fclose(f);
}

}  // namespace fnet
