#include "fnet/network.hpp"

#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "fnet/flops.hpp"
#include "fnet/rng.hpp"

namespace fnet {

void validate(const Dataset& data) {
    if (data.X.rows() < 2) throw std::invalid_argument("Dataset: n must be >= 2");
    if (data.y.size() != data.X.rows())
        throw std::invalid_argument("Dataset: y length != n");
    for (Index i = 0; i < data.X.rows(); ++i) {
        if (std::abs(data.X.row(i).norm() - 1.0) > 1e-9)
            throw std::invalid_argument("Dataset: row " + std::to_string(i) +
                                        " is not unit norm");
        if (std::abs(data.y(i)) > 1.0)
            throw std::invalid_argument("Dataset: |y| must be <= 1");
    }
}

const char* variant_name(Variant v) {
    switch (v) {
        case Variant::dense: return "dense";
        case Variant::bc: return "bc";
        case Variant::abc: return "abc";
    }
    return "?";
}

Variant variant_from_name(const std::string& name) {
    if (name == "dense") return Variant::dense;
    if (name == "bc") return Variant::bc;
    if (name == "abc") return Variant::abc;
    throw std::invalid_argument("unknown variant '" + name + "'");
}

Network init_network(Variant variant, Dims dims, std::uint64_t seed) {
    if (dims.m < 1 || dims.d < 1)
        throw std::invalid_argument("init_network: m and d must be >= 1");
    if (variant != Variant::dense && dims.l < 1)
        throw std::invalid_argument("init_network: l must be >= 1");
    if (variant == Variant::abc && dims.k < 1)
        throw std::invalid_argument("init_network: k must be >= 1");
    Network net;
    net.variant = variant;
    net.dims = dims;
    if (variant == Variant::dense) {
        net.dims.l = 0;
        net.dims.k = 0;
    } else if (variant == Variant::bc) {
        net.dims.k = 0;
    }
    net.seed = seed;
    Rng vr(seed + 3);
    net.v.resize(dims.m);
    for (Index r = 0; r < dims.m; ++r) net.v(r) = vr.next_sign();
    switch (variant) {
        case Variant::dense:
            net.B = gaussian_matrix(dims.m, dims.d, 1.0, seed + 4);
            break;
        case Variant::bc:
            net.C = gaussian_matrix(dims.l, dims.d, 1.0 / std::sqrt(double(dims.l)), seed + 2);
            net.B = gaussian_matrix(dims.m, dims.l, 1.0, seed + 4);
            break;
        case Variant::abc:
            net.A = gaussian_matrix(dims.m, dims.k, 1.0 / std::sqrt(double(dims.k)), seed + 1);
            net.C = gaussian_matrix(dims.l, dims.d, 1.0 / std::sqrt(double(dims.l)), seed + 2);
            net.B = gaussian_matrix(dims.k, dims.l, 1.0, seed + 4);
            break;
    }
    return net;
}

Matrix projected_inputs(const Network& net, const Matrix& X) {
    if (X.cols() != net.dims.d)
        throw std::invalid_argument("projected_inputs: X.cols() != d");
    if (net.variant == Variant::dense) return X;
    flops::add(2ull * X.rows() * net.dims.l * net.dims.d);
    return X * net.C.transpose();
}

Matrix preactivations_from(const Network& net, const Matrix& Xt) {
    const Index n = Xt.rows();
    Matrix P(net.dims.m, n);
    switch (net.variant) {
        case Variant::dense:
            flops::add(2ull * n * net.dims.m * net.dims.d);
            P.noalias() = net.B * Xt.transpose();
            break;
        case Variant::bc:
            flops::add(2ull * n * net.dims.m * net.dims.l);
            P.noalias() = net.B * Xt.transpose();
            break;
        case Variant::abc: {
            flops::add(2ull * n * net.dims.k * net.dims.l);
            Matrix T1 = Xt * net.B.transpose();  // n x k
            flops::add(2ull * n * net.dims.m * net.dims.k);
            P.noalias() = net.A * T1.transpose();
            break;
        }
    }
    return P;
}

Matrix preactivations(const Network& net, const Matrix& X) {
    return preactivations_from(net, projected_inputs(net, X));
}

Matrix relu_mask(const Matrix& P) {
    return (P.array() >= 0.0).cast<double>();
}

Vector forward_from_preacts(const Network& net, const Matrix& P) {
    const Index n = P.cols();
    const double inv_sqrt_m = 1.0 / std::sqrt(double(net.dims.m));
    Vector u(n);
    for (Index i = 0; i < n; ++i)
        u(i) = inv_sqrt_m * (net.v.array() * P.col(i).array().max(0.0)).sum();
    return u;
}

Vector forward(const Network& net, const Matrix& X) {
    return forward_from_preacts(net, preactivations(net, X));
}

ActivationPattern activation_pattern(const Network& net, const Matrix& X) {
    Matrix P = preactivations(net, X);
    ActivationPattern pat;
    pat.Z.resize(P.cols(), P.rows());
    for (Index i = 0; i < P.cols(); ++i)
        for (Index r = 0; r < P.rows(); ++r)
            pat.Z(i, r) = P(r, i) >= 0.0 ? net.v(r) : 0.0;
    return pat;
}

Vector effective_weight_row(const Network& net, Index r) {
    if (r < 0 || r >= net.dims.m)
        throw std::invalid_argument("effective_weight_row: r out of range");
    switch (net.variant) {
        case Variant::dense:
            return net.B.row(r).transpose();
        case Variant::bc:
            return (net.B.row(r) * net.C).transpose();
        case Variant::abc:
            return (net.A.row(r) * net.B * net.C).transpose();
    }
    throw std::logic_error("unreachable");
}

void save_checkpoint(const Network& net, const std::string& path) {
    std::FILE* f = std::fopen(path.c_str(), "w");
    if (!f) throw std::runtime_error("save_checkpoint: cannot open " + path);
    std::fprintf(f, "fnet-checkpoint 1\n%s\n%lld %lld %lld %lld\n%" PRIu64 "\n",
                 variant_name(net.variant), (long long)net.dims.m,
                 (long long)net.dims.d, (long long)net.dims.l,
                 (long long)net.dims.k, net.seed);
    std::fprintf(f, "%lld %lld\n", (long long)net.B.rows(), (long long)net.B.cols());
    for (Index r = 0; r < net.B.rows(); ++r) {
        for (Index c = 0; c < net.B.cols(); ++c)
            std::fprintf(f, c ? " %.17g" : "%.17g", net.B(r, c));
        std::fprintf(f, "\n");
    }
    std::fclose(f);
}

Network load_checkpoint(const std::string& path) {
    std::FILE* f = std::fopen(path.c_str(), "r");
    if (!f) throw std::runtime_error("load_checkpoint: cannot open " + path);
    char magic[32];
    int version = 0;
    char vname[16];
    long long m, d, l, k, rows, cols;
    std::uint64_t seed;
    if (std::fscanf(f, "%31s %d %15s %lld %lld %lld %lld %" SCNu64 " %lld %lld",
                    magic, &version, vname, &m, &d, &l, &k, &seed, &rows,
                    &cols) != 10 ||
        std::string(magic) != "fnet-checkpoint" || version != 1) {
        std::fclose(f);
        throw std::runtime_error("load_checkpoint: bad header in " + path);
    }
    Network net = init_network(variant_from_name(vname),
                               Dims{m, d, l ? l : 1, k ? k : 1}, seed);
    // init_network zeroes unused dims; restore the stored tag values
    net.dims.l = l;
    net.dims.k = k;
    if (net.B.rows() != rows || net.B.cols() != cols) {
        std::fclose(f);
        throw std::runtime_error("load_checkpoint: shape mismatch in " + path);
    }
    for (Index r = 0; r < rows; ++r)
        for (Index c = 0; c < cols; ++c)
            if (std::fscanf(f, "%lg", &net.B(r, c)) != 1) {
                std::fclose(f);
                throw std::runtime_error("load_checkpoint: truncated " + path);
            }
    std::fclose(f);
    return net;
}

}  // namespace fnet
