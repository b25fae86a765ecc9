#ifndef FNET_JL_HPP
#define FNET_JL_HPP

#include <cstdint>
#include <vector>

#include "fnet/linalg.hpp"

namespace fnet {

enum class JLKind { gaussian, fast_hadamard };

// Random projection R^in_dim -> R^out_dim.
//
// gaussian: dense out_dim x in_dim matrix of i.i.d. N(0, 1/out_dim) entries
// (standard deviation 1/sqrt(out_dim)), the scaling that makes
// E||Sx||^2 = ||x||^2.
//
// fast_hadamard: subsampled randomized Hadamard transform. The input is
// zero-padded to pad = next power of two >= in_dim, multiplied by a random
// sign diagonal D, run through the in-place Walsh-Hadamard butterfly
// (unnormalized, cost pad*log2(pad)), then out_dim rows are sampled
// uniformly without replacement and scaled by
// sqrt(pad/out_dim)/sqrt(pad) = 1/sqrt(out_dim), which again gives
// E||Sx||^2 = ||x||^2.
//
// Operators are immutable after construction; apply is pure.
struct JLOperator {
    JLKind kind;
    Index out_dim;
    Index in_dim;
    std::uint64_t seed;
    // gaussian payload
    Matrix dense;  // out_dim x in_dim
    // fast-hadamard payload
    Index pad = 0;
    std::vector<double> signs;        // length pad, entries +-1
    std::vector<Index> sample_rows;   // length out_dim, indices into [0,pad)
    double scale = 0.0;               // 1/sqrt(out_dim)
};

JLOperator make_gaussian(Index out_dim, Index in_dim, std::uint64_t seed);

// Requires out_dim <= pad(in_dim) so the row sample can be drawn without
// replacement.
JLOperator make_fast_hadamard(Index out_dim, Index in_dim, std::uint64_t seed);

// Projects each row of X: row i of the result is op(X_i).
Matrix apply(const JLOperator& op, const Matrix& X);

// The fast-hadamard operator as an explicit out_dim x in_dim matrix
// (columns = op(e_j)). Intended for oracle checks at small pad.
Matrix materialize(const JLOperator& op);

// In-place unnormalized Walsh-Hadamard butterfly; len must be a power of two.
void fwht(double* data, Index len);

struct DistortionStats {
    double max_ip_error;
    double mean_ip_error;
};

// Inner-product errors |x_i.x_j - (Sx_i).(Sx_j)| over all pairs i <= j,
// including i = j (norm preservation). Rows of X must be unit norm.
DistortionStats distortion_stats(const Matrix& X, const JLOperator& op);

// Max over `trials` of ||op(s)|| / ||s|| for random sign vectors s with
// exactly `sparsity` nonzeros in {-1,+1}.
double sparse_sign_preservation(const JLOperator& op, Index sparsity,
                                Index trials, std::uint64_t seed);

}  // namespace fnet

#endif
