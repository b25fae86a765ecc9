#ifndef FNET_ERRORS_HPP
#define FNET_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace fnet {

// Numerical routine failed to meet its own tolerance (iteration cap hit,
// solver did not converge). Message carries the residual report.
struct numeric_failure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Matrix failed the PSD gate of a solve; carries the offending eigenvalue.
struct not_psd_error : std::runtime_error {
    double lambda_min;
    not_psd_error(const std::string& what, double lmin)
        : std::runtime_error(what), lambda_min(lmin) {}
};

// Training loss became non-finite. Carries the step index at which it
// happened and the last finite loss seen.
struct diverged_error : std::runtime_error {
    long step;
    double last_finite_loss;
    diverged_error(const std::string& what, long s, double l)
        : std::runtime_error(what), step(s), last_finite_loss(l) {}
};

// Rejection sampling for a separated point set exhausted its attempt cap.
struct infeasible_separation : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A projected input row has zero norm; kernel angles are undefined.
struct degenerate_input : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A bound report was requested from a run missing one of its artifacts.
struct incomplete_report : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace fnet

#endif
