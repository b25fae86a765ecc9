#ifndef FNET_BENCH_HPP
#define FNET_BENCH_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "fnet/network.hpp"

namespace fnet {

struct BenchDims {
    Index n = 0;
    Index d = 0;
    Index m = 0;
    Index l = 0;  // bc, abc
    Index k = 0;  // abc
};

// Exact per-iteration flop counts (multiply-add = 2). The forward term of
// the factorized variants includes the one-time projection Xt = X C^T
// (2 n l d); training caches Xt after the first iteration, so these are
// first-iteration counts, matching what one gd_step call records.
//   dense: forward 2nmd                     grad 2nmd            update md
//   bc:    forward 2nld + 2nml              grad 2nml            update ml
//   abc:   forward 2nld + 2nkl + 2nmk       grad 2nmk + 2nkl     update kl
struct CostModel {
    Variant variant;
    BenchDims dims;
    std::uint64_t flops_forward;
    std::uint64_t flops_grad;
    std::uint64_t flops_total_per_iter;  // forward + grad + update
};

CostModel flop_count(Variant variant, const BenchDims& dims);

struct BenchResult {
    Variant variant;
    BenchDims dims;
    long iters;  // measured samples, after 2 warmup iterations
    std::int64_t median_ns;
    std::int64_t p10_ns;
    std::int64_t p90_ns;
    std::uint64_t flops_per_iter;
    double achieved_flops_per_sec;
    int threads;  // always 1: sampling is single-threaded
};

// Times gd_step iterations of a throwaway training instance seeded from
// `seed` (random unit inputs, random labels). Two warmup iterations, then
// `iters` >= 5 measured samples; percentiles are nearest-rank. Instance
// memory is guarded by m * max(d, l, k) * 8 <= mem_cap_bytes. Timing
// excludes dataset generation, kernel construction and instrumentation.
BenchResult time_per_iter(Variant variant, const BenchDims& dims, long iters,
                          std::uint64_t seed,
                          std::uint64_t mem_cap_bytes = 2ull << 30);

// CSV: variant,n,d,m,l,k,flops_per_iter,median_ns,p10_ns,p90_ns,threads
void write_bench_csv(const std::vector<BenchResult>& results,
                     const std::string& path);

}  // namespace fnet

#endif
