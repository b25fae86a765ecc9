#include "fnet/ntk.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <stdexcept>

#include "fnet/errors.hpp"
#include "fnet/rng.hpp"

namespace fnet {

namespace {

constexpr std::uint64_t kChunk = 128;  // MC draws consumed per sub-seeded chunk

Matrix signed_pattern(const Network& net, const Matrix& P) {
    // n x m, entry (i, r) = v_r * 1{P(r, i) >= 0}
    const Index m = P.rows(), n = P.cols();
    Matrix Z(n, m);
    for (Index i = 0; i < n; ++i)
        for (Index r = 0; r < m; ++r)
            Z(i, r) = P(r, i) >= 0.0 ? net.v(r) : 0.0;
    return Z;
}

bool same_entries(const Matrix& a, const Matrix& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) return false;
    return a.size() == 0 || (a.array() == b.array()).all();
}

void check_same_frozen(const Network& a, const Network& b) {
    bool ok = a.variant == b.variant && a.seed == b.seed &&
              a.dims.m == b.dims.m && a.dims.d == b.dims.d &&
              a.dims.l == b.dims.l && a.dims.k == b.dims.k &&
              (a.v.array() == b.v.array()).all() && same_entries(a.C, b.C) &&
              same_entries(a.A, b.A);
    if (!ok) throw std::invalid_argument("h_perp: networks do not share frozen parts");
}

}  // namespace

const SpectralData& KernelMatrix::spectral() const {
    if (!spectral_) spectral_ = sym_eig(H);
    return *spectral_;
}

const char* provenance_name(KernelProvenance p) {
    switch (p) {
        case KernelProvenance::analytic: return "analytic";
        case KernelProvenance::monte_carlo: return "monte-carlo";
        case KernelProvenance::empirical: return "empirical";
    }
    return "?";
}

KernelMatrix hinf_closed_form(const Matrix& X, const Matrix* C) {
    Matrix Xt = C ? Matrix(X * C->transpose()) : X;
    const Index n = Xt.rows();
    Vector norms_row = Xt.rowwise().norm();
    for (Index i = 0; i < n; ++i)
        if (norms_row(i) <= 1e-300)
            throw degenerate_input("hinf_closed_form: projected row " +
                                   std::to_string(i) + " has zero norm");
    Matrix G = Xt * Xt.transpose();
    KernelMatrix K;
    K.provenance = KernelProvenance::analytic;
    K.H.resize(n, n);
    const double two_pi = 2.0 * std::numbers::pi;
    for (Index i = 0; i < n; ++i) {
        for (Index j = i; j < n; ++j) {
            double c = G(i, j) / (norms_row(i) * norms_row(j));
            c = std::clamp(c, -1.0, 1.0);
            double theta = std::acos(c);
            double h = G(i, j) * (std::numbers::pi - theta) / two_pi;
            K.H(i, j) = h;
            K.H(j, i) = h;
        }
    }
    return K;
}

KernelMatrix hinf_monte_carlo(const Matrix& X, const Matrix* C,
                              const Network* abc_net, std::uint64_t samples,
                              std::uint64_t seed) {
    if (samples < 1)
        throw std::invalid_argument("hinf_monte_carlo: samples must be >= 1");
    Matrix Xt;
    if (abc_net)
        Xt = X * abc_net->C.transpose();
    else
        Xt = C ? Matrix(X * C->transpose()) : X;
    const Index n = Xt.rows();
    const Index dim = Xt.cols();
    Matrix G = Xt * Xt.transpose();
    Matrix sum = Matrix::Zero(n, n), sumsq = Matrix::Zero(n, n);

    std::uint64_t done = 0, chunk_index = 0;
    Vector w(dim);
    while (done < samples) {
        const std::uint64_t take = std::min(kChunk, samples - done);
        Rng rng(seed + chunk_index);
        for (std::uint64_t s = 0; s < take; ++s) {
            Matrix sample(n, n);
            if (!abc_net) {
                for (Index j = 0; j < dim; ++j) w(j) = rng.next_gaussian();
                Vector act = (Xt * w).unaryExpr(
                    [](double p) { return p >= 0.0 ? 1.0 : 0.0; });
                sample = G.cwiseProduct(act * act.transpose());
            } else {
                const Network& net = *abc_net;
                Matrix B(net.dims.k, net.dims.l);
                double* p = B.data();
                for (Index e = 0; e < B.size(); ++e) p[e] = rng.next_gaussian();
                Matrix T1 = Xt * B.transpose();           // n x k
                Matrix P = net.A * T1.transpose();        // m x n
                Matrix Z = signed_pattern(net, P);        // n x m
                Matrix Y = Z * net.A;                     // n x k
                sample = G.cwiseProduct(Y * Y.transpose()) / double(net.dims.m);
            }
            sum += sample;
            sumsq += sample.cwiseProduct(sample);
        }
        done += take;
        ++chunk_index;
    }

    KernelMatrix K;
    K.provenance = KernelProvenance::monte_carlo;
    K.mc_samples = samples;
    K.H = sum / double(samples);
    K.H = 0.5 * (K.H + Matrix(K.H.transpose()));
    if (samples > 1) {
        Matrix var =
            (sumsq - sum.cwiseProduct(sum) / double(samples)) / double(samples - 1);
        K.standard_error =
            (var / double(samples)).cwiseMax(0.0).cwiseSqrt();
    } else {
        K.standard_error = Matrix::Zero(n, n);
    }
    return K;
}

KernelMatrix h_empirical(const Network& net, const Matrix& X, long step) {
    Matrix Xt = projected_inputs(net, X);
    Matrix P = preactivations_from(net, Xt);
    Matrix G = Xt * Xt.transpose();
    KernelMatrix K;
    K.provenance = KernelProvenance::empirical;
    K.empirical_step = step;
    if (net.variant == Variant::abc) {
        Matrix Z = signed_pattern(net, P);
        Matrix Y = Z * net.A;  // n x k
        K.H = G.cwiseProduct(Y * Y.transpose()) / double(net.dims.m);
    } else {
        Matrix mask = relu_mask(P);  // m x n
        K.H = G.cwiseProduct(mask.transpose() * mask) / double(net.dims.m);
    }
    K.H = 0.5 * (K.H + Matrix(K.H.transpose()));
    return K;
}

KernelMatrix h_perp(const Network& net_t, const Network& net_0, const Matrix& X) {
    check_same_frozen(net_t, net_0);
    Matrix Xt = projected_inputs(net_t, X);
    Matrix Pt = preactivations_from(net_t, Xt);
    Matrix P0 = preactivations_from(net_0, Xt);
    Matrix mask_t = relu_mask(Pt);
    Matrix mask_0 = relu_mask(P0);
    // flipped(r, i) = 1 iff the activation state of row r on input i changed
    Matrix flipped =
        (mask_t.array() != mask_0.array()).cast<double>();
    Matrix G = Xt * Xt.transpose();
    const Index n = X.rows();
    Matrix R(n, n);
    if (net_t.variant == Variant::abc) {
        Matrix Zt = signed_pattern(net_t, Pt);             // n x m
        Matrix Zf = Zt.cwiseProduct(flipped.transpose());  // restricted rows
        R = (Zf * net_t.A) * (Zt * net_t.A).transpose();
    } else {
        Matrix restricted = flipped.cwiseProduct(mask_t);  // m x n
        R = restricted.transpose() * mask_t;
    }
    KernelMatrix K;
    K.provenance = KernelProvenance::empirical;
    K.H = G.cwiseProduct(R) / double(net_t.dims.m);
    K.H = 0.5 * (K.H + Matrix(K.H.transpose()));
    return K;
}

KernelDeviation kernel_deviation(const KernelMatrix& H1, const KernelMatrix& H2) {
    if (H1.H.rows() != H2.H.rows() || H1.H.cols() != H2.H.cols())
        throw std::invalid_argument("kernel_deviation: shape mismatch");
    Matrix D = H1.H - H2.H;
    KernelDeviation dev;
    dev.max_entry = D.size() ? D.cwiseAbs().maxCoeff() : 0.0;
    dev.frobenius = D.norm();
    dev.spectral = norms(D).spectral;
    dev.sum_abs = D.cwiseAbs().sum();
    return dev;
}

void write_kernel_csv(const KernelMatrix& K, const std::string& path,
                      const std::string& sidecar_path) {
    std::FILE* f = std::fopen(path.c_str(), "w");
    if (!f) throw std::runtime_error("write_kernel_csv: cannot open " + path);
    for (Index i = 0; i < K.H.rows(); ++i) {
        for (Index j = 0; j < K.H.cols(); ++j)
            std::fprintf(f, j ? ",%.17g" : "%.17g", K.H(i, j));
        std::fprintf(f, "\n");
    }
    std::fclose(f);
    std::FILE* s = std::fopen(sidecar_path.c_str(), "w");
    if (!s)
        throw std::runtime_error("write_kernel_csv: cannot open " + sidecar_path);
    std::fprintf(s, "n,provenance,lambda_min,trace,spectral_norm\n");
    std::fprintf(s, "%lld,%s,%.17g,%.17g,%.17g\n", (long long)K.H.rows(),
                 provenance_name(K.provenance), K.lambda_min(), K.H.trace(),
                 norms(K.H).spectral);
    std::fclose(s);
}

}  // namespace fnet
