#ifndef FNET_NETWORK_HPP
#define FNET_NETWORK_HPP

#include <cstdint>
#include <string>

#include "fnet/linalg.hpp"

namespace fnet {

// n unit-norm input rows and their responses. |y_i| <= 1, n >= 2.
struct Dataset {
    Matrix X;  // n x d
    Vector y;  // n
    Index n() const { return X.rows(); }
    Index d() const { return X.cols(); }
};

// Throws invalid_argument when a Dataset invariant is broken.
void validate(const Dataset& data);

enum class Variant { dense, bc, abc };

const char* variant_name(Variant v);
Variant variant_from_name(const std::string& name);

struct Dims {
    Index m = 0;  // width
    Index d = 0;  // input dimension
    Index l = 0;  // latent dimension of C (bc, abc)
    Index k = 0;  // latent dimension of A (abc)
};

// Width-m two-layer ReLU network u(x) = (1/sqrt(m)) sum_r v_r relu(W_r x)
// under one of three weight parameterizations:
//   dense: W (m x d), trainable
//   bc:    W = B C, B (m x l) trainable, C (l x d) frozen
//   abc:   W = A B C, A (m x k) frozen, B (k x l) trainable, C frozen
// v in {-1,+1}^m is frozen. Only B (or W) ever changes after init; A, C, v
// stay bit-identical across the life of a training run.
struct Network {
    Variant variant;
    Dims dims;
    std::uint64_t seed = 0;
    Vector v;  // m, entries +-1
    Matrix A;  // abc: m x k, frozen
    Matrix B;  // dense: W (m x d); bc: m x l; abc: k x l
    Matrix C;  // bc/abc: l x d, frozen

    Index m() const { return dims.m; }
    // Trainable parameter count (vec(B) length).
    Index param_count() const { return B.size(); }
};

// Sign-indicator table; entry (i, r) = v_r * 1{preactivation(r, x_i) >= 0}.
struct ActivationPattern {
    Matrix Z;  // n x m, entries in {-1, 0, +1}
};

// Initialization scales: B(0) entries std 1, C std 1/sqrt(l), A std
// 1/sqrt(k), v uniform +-1, dense W std 1. Sub-streams are fixed offsets of
// `seed`: A seed+1, C seed+2, v seed+3, B (or W) seed+4.
Network init_network(Variant variant, Dims dims, std::uint64_t seed);

// X projected into the network's input feature space: X C^T for bc/abc
// (n x l), X itself for dense.
Matrix projected_inputs(const Network& net, const Matrix& X);

// Pre-activation matrix, column i = W x_i (m x n). The factorized variants
// never materialize W: bc computes B (X C^T)^T, abc computes A (X C^T B^T)^T.
// The overload taking Xt reuses a cached projection (C is frozen, so X C^T
// never changes within a run).
Matrix preactivations(const Network& net, const Matrix& X);
Matrix preactivations_from(const Network& net, const Matrix& Xt);

// 0/1 mask of preact >= 0, same shape as P. The >= 0 convention (and
// sigma'(0) := 1) is used everywhere in the artifact.
Matrix relu_mask(const Matrix& P);

// u_i = (1/sqrt(m)) sum_r v_r relu(preact(r, i)), accumulated in fixed row
// order.
Vector forward(const Network& net, const Matrix& X);
Vector forward_from_preacts(const Network& net, const Matrix& P);

ActivationPattern activation_pattern(const Network& net, const Matrix& X);

// Effective weight row W_r: the stored row (dense), B_r C (bc), A_r B C (abc).
Vector effective_weight_row(const Network& net, Index r);

// Text checkpoint holding variant, dims, seed and the trainable entries; the
// frozen parts are reconstructed from the seed on load. Round-trips
// bit-identically (17-significant-digit decimal is exact for doubles).
void save_checkpoint(const Network& net, const std::string& path);
Network load_checkpoint(const std::string& path);

}  // namespace fnet

#endif
