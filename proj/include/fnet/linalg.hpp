#ifndef FNET_LINALG_HPP
#define FNET_LINALG_HPP

#include <Eigen/Dense>
#include <cstdint>

namespace fnet {

// Dense 64-bit matrix, row-major storage. All public numerics in the
// artifact are double precision; no mixed precision anywhere.
using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

// Eigendecomposition of a symmetric matrix.
// Invariants: eigenvalues ascending; Q columns orthonormal to 1e-10;
// ||Q diag(l) Q^T - H||_max <= 1e-8 * max|H|.
struct SpectralData {
    Vector eigenvalues;   // ascending
    Matrix eigenvectors;  // orthonormal columns, same order
    double lambda0 = 0.0; // smallest eigenvalue
};

// rows x cols of i.i.d. N(0, std^2), filled in row-major scan order from the
// SplitMix64 stream at `seed`. Identical arguments give identical bytes.
Matrix gaussian_matrix(Index rows, Index cols, double std, std::uint64_t seed);

// Symmetric eigendecomposition. Input is symmetrized as (H + H^T)/2 first;
// asymmetry beyond 1e-9 * max|H| is rejected.
SpectralData sym_eig(const Matrix& H);

// r^T (H + eps I)^{-1} r with jitter eps = 1e-10 * tr(H)/n added exactly
// once, evaluated through the eigendecomposition. Rejects H whose smallest
// eigenvalue is below -eps (not_psd_error carrying lambda_min).
double psd_quadform_inv(const Matrix& H, const Vector& r);

struct Norms {
    double frobenius;
    double max_entry;  // max absolute entry
    double spectral;   // largest singular value
};

// Frobenius, max-abs-entry and spectral norms. Spectral is computed by power
// iteration on M^T M, relative tolerance 1e-9, iteration cap 10000.
Norms norms(const Matrix& M);

}  // namespace fnet

#endif
