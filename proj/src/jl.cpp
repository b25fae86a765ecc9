#include "fnet/jl.hpp"

#include <cmath>
#include <stdexcept>

#include "fnet/flops.hpp"
#include "fnet/rng.hpp"

namespace fnet {

namespace {

Index next_pow2(Index n) {
    Index p = 1;
    while (p < n) p <<= 1;
    return p;
}

Index log2_exact(Index p) {
    Index l = 0;
    while ((Index(1) << l) < p) ++l;
    return l;
}

}  // namespace

JLOperator make_gaussian(Index out_dim, Index in_dim, std::uint64_t seed) {
    if (out_dim < 1) throw std::invalid_argument("make_gaussian: out_dim must be >= 1");
    if (in_dim < 1) throw std::invalid_argument("make_gaussian: in_dim must be >= 1");
    JLOperator op;
    op.kind = JLKind::gaussian;
    op.out_dim = out_dim;
    op.in_dim = in_dim;
    op.seed = seed;
    op.dense = gaussian_matrix(out_dim, in_dim, 1.0 / std::sqrt(double(out_dim)), seed);
    return op;
}

JLOperator make_fast_hadamard(Index out_dim, Index in_dim, std::uint64_t seed) {
    if (out_dim < 1) throw std::invalid_argument("make_fast_hadamard: out_dim must be >= 1");
    if (in_dim < 1) throw std::invalid_argument("make_fast_hadamard: in_dim must be >= 1");
    JLOperator op;
    op.kind = JLKind::fast_hadamard;
    op.out_dim = out_dim;
    op.in_dim = in_dim;
    op.seed = seed;
    op.pad = next_pow2(in_dim);
    if (out_dim > op.pad)
        throw std::invalid_argument(
            "make_fast_hadamard: out_dim exceeds padded length, cannot sample "
            "rows without replacement");
    Rng rng(seed);
    op.signs.resize(op.pad);
    for (Index i = 0; i < op.pad; ++i) op.signs[i] = rng.next_sign();
    auto rows = rng.sample_without_replacement(op.pad, out_dim);
    op.sample_rows.assign(rows.begin(), rows.end());
    op.scale = 1.0 / std::sqrt(double(out_dim));
    return op;
}

void fwht(double* data, Index len) {
    for (Index h = 1; h < len; h <<= 1) {
        for (Index i = 0; i < len; i += h << 1) {
            for (Index j = i; j < i + h; ++j) {
                double x = data[j];
                double y = data[j + h];
                data[j] = x + y;
                data[j + h] = x - y;
            }
        }
    }
}

Matrix apply(const JLOperator& op, const Matrix& X) {
    if (X.cols() != op.in_dim)
        throw std::invalid_argument("apply: X.cols() != op.in_dim");
    const Index n = X.rows();
    if (op.kind == JLKind::gaussian) {
        flops::add(2ull * n * op.out_dim * op.in_dim);
        return X * op.dense.transpose();
    }
    Matrix Y(n, op.out_dim);
    std::vector<double> buf(op.pad);
    const Index lg = log2_exact(op.pad);
    for (Index i = 0; i < n; ++i) {
        for (Index j = 0; j < op.in_dim; ++j) buf[j] = op.signs[j] * X(i, j);
        for (Index j = op.in_dim; j < op.pad; ++j) buf[j] = 0.0;
        fwht(buf.data(), op.pad);
        for (Index j = 0; j < op.out_dim; ++j)
            Y(i, j) = op.scale * buf[op.sample_rows[j]];
    }
    // sign multiplies + butterfly add/subs + output scaling, per row
    flops::add(std::uint64_t(n) * (op.pad + op.pad * lg + op.out_dim));
    return Y;
}

Matrix materialize(const JLOperator& op) {
    if (op.kind == JLKind::gaussian) return op.dense;
    Matrix M(op.out_dim, op.in_dim);
    Matrix basis = Matrix::Identity(op.in_dim, op.in_dim);
    Matrix cols = apply(op, basis);  // row j = op(e_j)
    return Matrix(cols.transpose());
}

DistortionStats distortion_stats(const Matrix& X, const JLOperator& op) {
    Matrix Y = apply(op, X);
    Matrix G0 = X * X.transpose();
    Matrix G1 = Y * Y.transpose();
    double maxerr = 0.0, sum = 0.0;
    Index count = 0;
    for (Index i = 0; i < X.rows(); ++i) {
        for (Index j = i; j < X.rows(); ++j) {
            double e = std::abs(G0(i, j) - G1(i, j));
            maxerr = std::max(maxerr, e);
            sum += e;
            ++count;
        }
    }
    return {maxerr, count ? sum / count : 0.0};
}

double sparse_sign_preservation(const JLOperator& op, Index sparsity,
                                Index trials, std::uint64_t seed) {
    if (sparsity < 1 || sparsity > op.in_dim)
        throw std::invalid_argument("sparse_sign_preservation: bad sparsity");
    Rng rng(seed);
    double worst = 0.0;
    Matrix s(1, op.in_dim);
    for (Index t = 0; t < trials; ++t) {
        s.setZero();
        auto idx = rng.sample_without_replacement(op.in_dim, sparsity);
        for (auto j : idx) s(0, Index(j)) = rng.next_sign();
        double ratio = apply(op, s).norm() / std::sqrt(double(sparsity));
        worst = std::max(worst, ratio);
    }
    return worst;
}

}  // namespace fnet
