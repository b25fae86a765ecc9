#include "fnet/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>
#include <sstream>

#include "fnet/errors.hpp"
#include "fnet/rng.hpp"

namespace fnet {

namespace {

constexpr std::uint64_t kChunk = 128;

double ratio_of(double measured, double bound) {
    if (bound > 0.0) return measured / bound;
    if (measured == 0.0) return 0.0;
    return std::numeric_limits<double>::infinity();
}

}  // namespace

FeatureMatrix feature_matrix(const Network& net, const Matrix& X) {
    Matrix Xt = projected_inputs(net, X);
    Matrix P = preactivations_from(net, Xt);
    Matrix mask = relu_mask(P);
    const Index n = X.rows();
    const Index cols = Xt.cols();  // d (dense) or l
    const double inv_sqrt_m = 1.0 / std::sqrt(double(net.dims.m));

    FeatureMatrix out;
    out.variant = net.variant;
    out.m = net.dims.m;
    if (net.variant == Variant::abc) {
        out.Z.resize(net.dims.k * cols, n);
        for (Index i = 0; i < n; ++i) {
            Vector zhat = net.v.cwiseProduct(mask.col(i));
            Vector w = net.A.transpose() * zhat;  // k
            for (Index r = 0; r < net.dims.k; ++r)
                for (Index c = 0; c < cols; ++c)
                    out.Z(r * cols + c, i) = inv_sqrt_m * w(r) * Xt(i, c);
        }
    } else {
        out.Z.resize(net.dims.m * cols, n);
        for (Index i = 0; i < n; ++i)
            for (Index r = 0; r < net.dims.m; ++r) {
                double s = inv_sqrt_m * net.v(r) * mask(r, i);
                for (Index c = 0; c < cols; ++c)
                    out.Z(r * cols + c, i) = s * Xt(i, c);
            }
    }
    return out;
}

LossPrediction predicted_loss_curve(const KernelMatrix& K, const Vector& residual0,
                                    double eta, long steps) {
    if (K.H.rows() != residual0.size())
        throw std::invalid_argument("predicted_loss_curve: size mismatch");
    if (!(eta > 0.0) || steps < 0)
        throw std::invalid_argument("predicted_loss_curve: bad eta or steps");
    const SpectralData& s = K.spectral();
    const Index n = residual0.size();
    Vector proj = s.eigenvectors.transpose() * residual0;
    Vector weight = proj.cwiseProduct(proj);         // (q_i . r0)^2
    Vector factor(n);                                // (1 - eta lambda_i)^2
    for (Index i = 0; i < n; ++i) {
        double f = 1.0 - eta * s.eigenvalues(i);
        factor(i) = f * f;
    }
    LossPrediction out;
    out.envelope_valid = eta * s.eigenvalues(n - 1) <= 1.0;
    out.values.reserve(steps + 1);
    for (long t = 0; t <= steps; ++t) {
        out.values.push_back(std::sqrt(std::max(weight.sum(), 0.0)));
        weight = weight.cwiseProduct(factor);
    }
    return out;
}

double b_drift_bound(const KernelMatrix& hinf, const Vector& residual0) {
    return std::sqrt(psd_quadform_inv(hinf.H, residual0));
}

double rademacher_bound(double R, double tau, Index n, double d_eff, Index m,
                        double delta) {
    if (R < 0.0 || tau < 0.0 || n < 1 || !(d_eff > 0.0) || m < 1)
        throw std::invalid_argument("rademacher_bound: bad argument");
    if (!(delta > 0.0 && delta < 1.0))
        throw std::invalid_argument("rademacher_bound: delta must be in (0,1)");
    const double log_term = std::log(2.0 / delta);
    double first = tau / std::sqrt(double(n) * d_eff) *
                   (1.0 + std::pow(4.0 * log_term / double(m), 0.25));
    double second = 2.0 * R * R * std::sqrt(double(m) / std::numbers::pi);
    double third = R * std::sqrt(log_term);
    return first + second + third;
}

Matrix conditional_events(const Network& net, const Matrix& X, double R) {
    if (R < 0.0) throw std::invalid_argument("conditional_events: R < 0");
    Matrix Xt = projected_inputs(net, X);
    Matrix P = preactivations_from(net, Xt);
    Vector row_norm = Xt.rowwise().norm();
    Matrix A(P.rows(), P.cols());
    for (Index r = 0; r < P.rows(); ++r)
        for (Index i = 0; i < P.cols(); ++i)
            A(r, i) = std::abs(P(r, i)) <= R * row_norm(i) ? 1.0 : 0.0;
    return A;
}

RademacherEstimate rademacher_empirical(const FeatureMatrix& Z0, double tau,
                                        const Matrix& flip_table, double R,
                                        std::uint64_t epsilon_samples,
                                        std::uint64_t seed) {
    if (epsilon_samples < 1)
        throw std::invalid_argument("rademacher_empirical: need >= 1 sample");
    if (tau < 0.0 || R < 0.0)
        throw std::invalid_argument("rademacher_empirical: negative radius");
    const Index n = Z0.Z.cols();
    if (flip_table.size() > 0 &&
        (flip_table.rows() != Z0.m || flip_table.cols() != n))
        throw std::invalid_argument("rademacher_empirical: flip table shape");

    double sum = 0.0, sumsq = 0.0;
    std::uint64_t done = 0, chunk_index = 0;
    Vector eps(n);
    while (done < epsilon_samples) {
        const std::uint64_t take = std::min(kChunk, epsilon_samples - done);
        Rng rng(seed + chunk_index);
        for (std::uint64_t s = 0; s < take; ++s) {
            for (Index i = 0; i < n; ++i) eps(i) = rng.next_sign();
            double norm = (Z0.Z * eps).norm();
            sum += norm;
            sumsq += norm * norm;
        }
        done += take;
        ++chunk_index;
    }
    const double samples = double(epsilon_samples);
    const double mean = sum / samples;
    double se = 0.0;
    if (epsilon_samples > 1) {
        double var = std::max(0.0, (sumsq - sum * sum / samples) / (samples - 1.0));
        se = std::sqrt(var / samples);
    }

    RademacherEstimate out;
    out.linear_term = tau / double(n) * mean;
    out.standard_error = tau / double(n) * se;
    double flips = flip_table.size() > 0 ? flip_table.sum() : 0.0;
    out.flip_term = 2.0 * R * flips / (double(n) * std::sqrt(double(Z0.m)));
    out.value = out.linear_term + out.flip_term;
    return out;
}

GapReport generalization_gap(const Network& net, const Dataset& train,
                             const Dataset& heldout) {
    auto l1 = [&](const Dataset& data) {
        Matrix Xt = projected_inputs(net, data.X);
        Vector u = forward_from_preacts(net, preactivations_from(net, Xt));
        return (u - data.y).cwiseAbs().mean();
    };
    GapReport out;
    out.train_l1 = l1(train);
    out.heldout_l1 = l1(heldout);
    out.gap = out.heldout_l1 - out.train_l1;
    return out;
}

bool BoundReport::all_pass() const {
    for (const auto& e : entries)
        if (!e.pass) return false;
    return true;
}

BoundReport bound_report(const TrainTrace& trace, const KernelMatrix& h_inf,
                         const KernelMatrix& h0, const KernelMatrix& ht,
                         const Vector& residual0, double eta, Index m,
                         double delta) {
    if (trace.steps.empty()) throw incomplete_report("bound_report: empty trace");
    const Index n = residual0.size();
    if (h_inf.H.rows() != n) throw incomplete_report("bound_report: h_inf shape");
    if (h0.H.rows() != n) throw incomplete_report("bound_report: h0 shape");
    if (ht.H.rows() != n) throw incomplete_report("bound_report: ht shape");
    if (!(eta > 0.0) || m < 1 || !(delta > 0.0 && delta < 1.0))
        throw std::invalid_argument("bound_report: bad eta, m or delta");

    const StepRecord& last = trace.steps.back();
    const double lambda0 = std::max(h_inf.lambda_min(), 1e-8);
    BoundReport report;
    auto push = [&](const std::string& name, double bound, double measured,
                    double slack) {
        BoundEntry e;
        e.name = name;
        e.bound = bound;
        e.measured = measured;
        e.ratio = ratio_of(measured, bound);
        e.pass = measured <= slack * bound + 1e-12;
        report.entries.push_back(e);
    };

    double r_prime =
        4.0 * std::sqrt(double(n)) * residual0.norm() / (std::sqrt(double(m)) * lambda0);
    push("row-drift", r_prime, last.max_row_drift, 2.0);
    push("b-fro-drift", b_drift_bound(h_inf, residual0), last.b_fro_drift, 2.0);
    push("kernel-stability", lambda0 / 4.0, kernel_deviation(ht, h0).spectral, 1.0);

    LossPrediction pred =
        predicted_loss_curve(h0, residual0, eta, (long)trace.steps.size() - 1);
    double worst = 0.0;
    for (size_t t = 0; t < trace.steps.size(); ++t) {
        double actual = trace.steps[t].loss;
        if (actual < 1e-3) continue;
        double actual_norm = std::sqrt(actual);
        worst = std::max(worst, std::abs(pred.values[t] - actual_norm) / actual_norm);
    }
    push("loss-prediction", 0.15, worst, 1.0);

    push("flip-count", double(m) * double(n) * last.max_row_drift / delta,
         double(last.total_flips), 1.0);

    const double lambda0_emp = std::max(h0.lambda_min(), 1e-8);
    const double decay = 1.0 - eta * lambda0_emp / 2.0;
    double envelope_worst = 0.0;
    double envelope = trace.loss0();
    for (size_t t = 1; t < trace.steps.size(); ++t) {
        envelope *= decay;
        if (envelope <= 0.0) {
            envelope_worst = std::numeric_limits<double>::infinity();
            break;
        }
        envelope_worst = std::max(envelope_worst, trace.steps[t].loss / envelope);
    }
    push("loss-envelope", 1.0, envelope_worst, 1.0);
    return report;
}

void write_bound_report_csv(const BoundReport& report, const std::string& path) {
    std::FILE* f = std::fopen(path.c_str(), "w");
    if (!f)
        throw std::runtime_error("write_bound_report_csv: cannot open " + path);
    std::fprintf(f, "name,bound,measured,ratio,pass\n");
    for (const auto& e : report.entries)
        std::fprintf(f, "%s,%.17g,%.17g,%.17g,%d\n", e.name.c_str(), e.bound,
                     e.measured, e.ratio, e.pass ? 1 : 0);
    std::fclose(f);
}

BoundReport read_bound_report_csv(const std::string& path) {
    std::FILE* f = std::fopen(path.c_str(), "r");
    if (!f) throw std::runtime_error("read_bound_report_csv: cannot open " + path);
    BoundReport report;
    char header[128];
    if (std::fscanf(f, "%127s\n", header) != 1 ||
        std::string(header) != "name,bound,measured,ratio,pass") {
        std::fclose(f);
        throw std::runtime_error("read_bound_report_csv: bad header in " + path);
    }
    char name[128];
    BoundEntry e;
    int pass = 0;
    while (std::fscanf(f, "%127[^,],%lf,%lf,%lf,%d\n", name, &e.bound,
                       &e.measured, &e.ratio, &pass) == 5) {
        e.name = name;
        e.pass = pass != 0;
        report.entries.push_back(e);
    }
    std::fclose(f);
    return report;
}

std::string bound_report_summary(const BoundReport& report) {
    std::ostringstream out;
    out << "bound report (" << report.entries.size() << " checks, "
        << (report.all_pass() ? "all pass" : "FAILURES") << ")\n";
    for (const auto& e : report.entries) {
        char line[256];
        std::snprintf(line, sizeof line, "  %-16s bound %-12.5g measured %-12.5g ratio %-10.4g %s\n",
                      e.name.c_str(), e.bound, e.measured, e.ratio,
                      e.pass ? "pass" : "FAIL");
        out << line;
    }
    return out.str();
}

}  // namespace fnet
