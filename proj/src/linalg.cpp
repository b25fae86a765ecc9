#include "fnet/linalg.hpp"

#include <cmath>
#include <string>

#include "fnet/errors.hpp"
#include "fnet/rng.hpp"

namespace fnet {

Matrix gaussian_matrix(Index rows, Index cols, double std, std::uint64_t seed) {
    if (rows < 1 || cols < 1)
        throw std::invalid_argument("gaussian_matrix: dimensions must be >= 1");
    if (!(std > 0.0))
        throw std::invalid_argument("gaussian_matrix: std must be > 0");
    Matrix M(rows, cols);
    Rng rng(seed);
    double* p = M.data();  // row-major scan order
    const Index total = rows * cols;
    for (Index i = 0; i < total; ++i) p[i] = std * rng.next_gaussian();
    return M;
}

SpectralData sym_eig(const Matrix& H) {
    if (H.rows() != H.cols())
        throw std::invalid_argument("sym_eig: matrix must be square");
    const double scale = H.cwiseAbs().maxCoeff();
    const double asym = (H - H.transpose()).cwiseAbs().maxCoeff();
    if (scale > 0.0 && asym > 1e-9 * scale)
        throw std::invalid_argument("sym_eig: input asymmetry " +
                                    std::to_string(asym) + " exceeds tolerance");
    Eigen::MatrixXd S = 0.5 * (H + H.transpose());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(S);
    if (es.info() != Eigen::Success)
        throw numeric_failure("sym_eig: eigensolver did not converge");
    SpectralData out;
    out.eigenvalues = es.eigenvalues();  // ascending
    out.eigenvectors = es.eigenvectors();
    out.lambda0 = out.eigenvalues(0);
    return out;
}

double psd_quadform_inv(const Matrix& H, const Vector& r) {
    if (H.rows() != H.cols() || H.rows() != r.size())
        throw std::invalid_argument("psd_quadform_inv: shape mismatch");
    const double eps = 1e-10 * H.trace() / static_cast<double>(H.rows());
    SpectralData sd = sym_eig(H);
    if (sd.lambda0 < -eps)
        throw not_psd_error("psd_quadform_inv: smallest eigenvalue " +
                                std::to_string(sd.lambda0) + " below tolerance",
                            sd.lambda0);
    Vector proj = sd.eigenvectors.transpose() * r;
    double q = 0.0;
    for (Index i = 0; i < proj.size(); ++i) {
        const double denom = sd.eigenvalues(i) + eps;
        q += proj(i) * proj(i) / denom;
    }
    return q < 0.0 ? 0.0 : q;
}

Norms norms(const Matrix& M) {
    Norms out;
    out.frobenius = M.norm();
    out.max_entry = M.size() == 0 ? 0.0 : M.cwiseAbs().maxCoeff();
    if (out.frobenius == 0.0) {
        out.spectral = 0.0;
        return out;
    }
    // Power iteration on M^T M. The start vector comes from a fixed stream so
    // it is deterministic yet almost surely not orthogonal to the top
    // singular vector.
    Vector v = gaussian_matrix(M.cols(), 1, 1.0, 0x5eedULL).col(0);
    v.normalize();
    double sigma = 0.0;
    const int cap = 10000;
    for (int it = 0; it < cap; ++it) {
        Vector mv = M * v;
        double s = mv.norm();
        if (s == 0.0) {
            // v landed in the null space; restart from a shifted stream.
            v = gaussian_matrix(M.cols(), 1, 1.0, 0x5eedULL + 1 + it).col(0);
            v.normalize();
            continue;
        }
        Vector w = M.transpose() * mv;
        v = w / w.norm();
        if (std::abs(s - sigma) <= 1e-9 * s) {
            out.spectral = s;
            return out;
        }
        sigma = s;
    }
    // Cap reached: report the residual rather than silently returning.
    throw numeric_failure("norms: power iteration hit cap 10000, last sigma " +
                          std::to_string(sigma));
}

}  // namespace fnet
