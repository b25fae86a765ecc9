#ifndef FNET_ANALYSIS_HPP
#define FNET_ANALYSIS_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "fnet/ntk.hpp"
#include "fnet/trainer.hpp"

namespace fnet {

// Per-parameter gradient features at one network state: column i is
// vec(du_i/dB), laid out row-major to match B. The defining identity is
// Z^T Z = h_empirical at the same state (max entry error 1e-10); entry
// conventions with other normalizations do not satisfy it.
struct FeatureMatrix {
    Matrix Z;  // p x n, p = trainable parameter count
    Variant variant = Variant::dense;
    Index m = 0;  // network width, used by the flip correction term
};

FeatureMatrix feature_matrix(const Network& net, const Matrix& X);

// Loss trajectory predicted from one kernel eigen-decomposition:
//   values[t] = sqrt(sum_i (1 - eta lambda_i)^{2t} (q_i . r0)^2),
// the norm ||u(t) - y|| (not its square). r0 is normally the initial
// residual y - u(0); passing y instead gives the zero-init variant.
// envelope_valid is false when eta * lambda_max > 1 (the per-mode factors
// are no longer contractions and the curve is not an upper envelope).
struct LossPrediction {
    std::vector<double> values;  // length steps + 1
    bool envelope_valid = true;
};

LossPrediction predicted_loss_curve(const KernelMatrix& K, const Vector& residual0,
                                    double eta, long steps);

// Leading term of the B-drift bound: sqrt(r0^T Hinf^{-1} r0). The m^{-1/4}
// correction has unstated constants and is reported as slack, not computed.
double b_drift_bound(const KernelMatrix& hinf, const Vector& residual0);

// Rademacher complexity bound, evaluated verbatim:
//   tau/sqrt(n d_eff) (1 + (4 log(2/delta)/m)^{1/4})
//   + 2 R^2 sqrt(m/pi) + R sqrt(log(2/delta)).
// d_eff is a caller choice; 1/max_i H(0)_ii makes the first term dominate
// the exact linear-class value below.
double rademacher_bound(double R, double tau, Index n, double d_eff, Index m,
                        double delta);

// Flip-event table A(r, i) = 1{|preact(r, i)| <= R ||xt_i||}: rows close
// enough to their activation boundary to flip within a drift radius R.
Matrix conditional_events(const Network& net, const Matrix& X, double R);

// Exact linear-class supremum plus flip correction:
//   (tau/n) E_eps ||Z0 eps|| + (2R/(n sqrt(m))) sum of flip_table.
// The expectation is over Rademacher eps, estimated with epsilon_samples
// draws (chunks of 128, chunk c seeded seed+c, fixed reduction order).
// standard_error covers the sampled linear term only.
struct RademacherEstimate {
    double value;
    double standard_error;
    double linear_term;
    double flip_term;
};

RademacherEstimate rademacher_empirical(const FeatureMatrix& Z0, double tau,
                                        const Matrix& flip_table, double R,
                                        std::uint64_t epsilon_samples,
                                        std::uint64_t seed);

struct GapReport {
    double train_l1;
    double heldout_l1;
    double gap;  // heldout - train
};

GapReport generalization_gap(const Network& net, const Dataset& train,
                             const Dataset& heldout);

// One row per checkable conclusion. ratio = measured/bound when bound > 0;
// 0 when both vanish; +inf when only the bound does. pass applies the
// entry's slack factor (2x for the drift bounds, whose corrections decay
// like m^{-1/4} with unstated constants; exact for the rest).
struct BoundEntry {
    std::string name;
    double bound;
    double measured;
    double ratio;
    bool pass;
};

struct BoundReport {
    std::vector<BoundEntry> entries;
    bool all_pass() const;
};

// Entries, in order:
//   row-drift        max_r ||W_r(T) - W_r(0)|| vs 4 sqrt(n) ||r0|| / (sqrt(m) lambda0)
//   b-fro-drift      ||B(T) - B(0)||_F vs sqrt(r0^T Hinf^{-1} r0)
//   kernel-stability ||H(T) - H(0)||_spec vs lambda0 / 4
//   loss-prediction  max relative error of the predicted ||u(t) - y|| over
//                    steps with loss >= 1e-3, vs 0.15
//   flip-count       total flips at T vs m n R_measured / delta
//   loss-envelope    max_t loss(t) / (loss(0) (1 - eta lambda_min(H0)/2)^t) vs 1
// lambda0 is lambda_min of h_inf floored at 1e-8. Prediction and envelope
// use h0. Throws incomplete_report when an artifact is missing or shaped
// inconsistently.
BoundReport bound_report(const TrainTrace& trace, const KernelMatrix& h_inf,
                         const KernelMatrix& h0, const KernelMatrix& ht,
                         const Vector& residual0, double eta, Index m,
                         double delta);

// CSV rows `name,bound,measured,ratio,pass` (floats at 17 significant
// digits, pass as 0/1), plus a lossless reader and a human-readable block.
void write_bound_report_csv(const BoundReport& report, const std::string& path);
BoundReport read_bound_report_csv(const std::string& path);
std::string bound_report_summary(const BoundReport& report);

}  // namespace fnet

#endif
