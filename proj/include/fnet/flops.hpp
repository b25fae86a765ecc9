#ifndef FNET_FLOPS_HPP
#define FNET_FLOPS_HPP

#include <cstdint>

namespace fnet::flops {

// Global floating-point-operation counter, threaded through the hot paths
// (trainer GEMMs and updates, JL applies). Callers add the exact flop cost
// of each block they execute: multiply-adds count as 2, plain per-entry
// updates as 1, matching the closed-form cost models in bench. Elementwise
// O(n*m) epilogues (ReLU masks, output accumulation, residuals) are outside
// the cost model and are not counted.
//
// Single counter, no atomics: the artifact's hot paths are single-threaded.

inline std::uint64_t& counter() {
    static std::uint64_t c = 0;
    return c;
}

inline void add(std::uint64_t n) { counter() += n; }
inline void reset() { counter() = 0; }
inline std::uint64_t read() { return counter(); }

}  // namespace fnet::flops

#endif
