#ifndef FNET_NTK_HPP
#define FNET_NTK_HPP

#include <cstdint>
#include <optional>
#include <string>

#include "fnet/network.hpp"

namespace fnet {

enum class KernelProvenance { analytic, monte_carlo, empirical };

// n x n symmetric Gram matrix of per-parameter output gradients, with
// provenance and lazily computed spectral data. Symmetric to 1e-10 by
// construction (asymmetric sums, e.g. the flip-restricted kernel, are
// symmetrized as (H + H^T)/2 before storage).
struct KernelMatrix {
    Matrix H;
    KernelProvenance provenance = KernelProvenance::analytic;
    std::uint64_t mc_samples = 0;          // monte-carlo only
    long empirical_step = 0;               // empirical only
    std::optional<Matrix> standard_error;  // monte-carlo only

    const SpectralData& spectral() const;
    double lambda_min() const { return spectral().lambda0; }

  private:
    mutable std::optional<SpectralData> spectral_;
};

const char* provenance_name(KernelProvenance p);

// Closed-form infinite-width kernel for the dense and bc parameterizations:
//   H_ij = (xt_i . xt_j) * (pi - theta_ij) / (2 pi),
// theta_ij the angle between xt_i and xt_j (cosine clamped to [-1, 1]),
// where xt = X C^T when C is given and xt = X otherwise. The closed form is
// validated against the Monte-Carlo estimator in the test suite rather than
// trusted. Rejects zero-norm projected rows (degenerate_input).
KernelMatrix hinf_closed_form(const Matrix& X, const Matrix* C = nullptr);

// Monte-Carlo infinite-width kernel, averaging the defining integrand over
// `samples` fresh weight draws:
//   without A: (xt_i . xt_j) 1{w.xt_i >= 0} 1{w.xt_j >= 0}, w std normal;
//   with A, v (abc): (1/m) (xt_i . xt_j) (Z_i A A^T Z_j^T) over B draws with
//   std-1 entries, conditioned on the given A and v.
// Draws are consumed in fixed chunks of 128; chunk c uses seed+c, and chunks
// are reduced in order, so results do not depend on batching. A per-entry
// standard-error matrix is recorded.
KernelMatrix hinf_monte_carlo(const Matrix& X, const Matrix* C,
                              const Network* abc_net, std::uint64_t samples,
                              std::uint64_t seed);

// Empirical kernel at the network's current parameters:
//   dense/bc: (1/m) (xt_i . xt_j) sum_r 1_{r,i} 1_{r,j}
//   abc:      (1/m) (xt_i . xt_j) (Z_i A A^T Z_j^T)
KernelMatrix h_empirical(const Network& net, const Matrix& X, long step = 0);

// Kernel restricted to flipped rows: S_i = {r : activation(r, i) changed
// between net_0 and net_t}. Entry (i, j) sums time-t indicator products over
// r in S_i only (A-weighted for abc), then the matrix is symmetrized. Zero
// when net_t = net_0; equals h_empirical(net_t) when every row flipped.
KernelMatrix h_perp(const Network& net_t, const Network& net_0, const Matrix& X);

struct KernelDeviation {
    double max_entry;
    double frobenius;
    double spectral;
    double sum_abs;  // sum of |H1 - H2| entries
};

KernelDeviation kernel_deviation(const KernelMatrix& H1, const KernelMatrix& H2);

// Kernel dump: full matrix CSV plus a one-line sidecar summary
// `n,provenance,lambda_min,trace,spectral_norm`.
void write_kernel_csv(const KernelMatrix& K, const std::string& path,
                      const std::string& sidecar_path);

}  // namespace fnet

#endif
