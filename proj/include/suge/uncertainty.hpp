#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "suge/exec.hpp"
#include "suge/geometry.hpp"

namespace suge {

/// Pairwise angular disagreement (degrees) among ground truth y, pseudo
/// label y_p and neighboring label y_n.
struct TripletDistances {
    double d_pg = 0.0;  ///< pseudo vs ground truth
    double d_pn = 0.0;  ///< pseudo vs neighboring
    double d_ng = 0.0;  ///< neighboring vs ground truth

    friend bool operator==(const TripletDistances&, const TripletDistances&) = default;
};

struct UncertaintyConfig {
    double epsilon = 1.0;

    void validate() const;
};

TripletDistances triplet_distances(const GazeLabel& y, const GazeLabel& y_p, const GazeLabel& y_n);

/// Label-uncertainty metric: min(d_pg, d_ng) / (d_pn + epsilon).
double tuple_md(const TripletDistances& d, double epsilon);

/// Image-uncertainty metric: min(d_pg, d_pn, d_ng).
double triple_md(const TripletDistances& d) noexcept;

struct GmmOptions {
    int max_iterations = 200;
    double tolerance = 1e-6;       ///< on mean per-sample log-likelihood gain
    double variance_floor = 1e-6;
};

/// Two-component 1-D Gaussian mixture.
struct GmmFit {
    std::array<double, 2> means{};
    std::array<double, 2> variances{};
    std::array<double, 2> mixing{};
    std::size_t reliable_component = 0;  ///< component with the smaller mean
    bool converged = false;
    int iterations = 0;
    /// False when the means nearly coincide relative to the data range; the
    /// metric then carries no usable split.
    bool separated = true;
    /// Total log-likelihood after initialization and after every EM step.
    std::vector<double> log_likelihood_trace;
};

/// EM fit. Initialization is deterministic (means at the 10th/90th
/// percentiles, shared overall variance, equal mixing), and the input is
/// sorted first so the result does not depend on value order.
/// Throws DegenerateFitError for fewer than two distinct finite values.
GmmFit fit_gmm_1d(std::span<const double> values, const GmmOptions& options = {});

/// Posterior probability of each component at `value`; sums to 1.
std::array<double, 2> gmm_posteriors(const GmmFit& fit, double value) noexcept;

/// Posterior of the reliable (smaller-mean) component.
double posterior_reliable(const GmmFit& fit, double value) noexcept;

struct ConfidencePair {
    double label_confidence = 1.0;
    double image_confidence = 1.0;

    friend bool operator==(const ConfidencePair&, const ConfidencePair&) = default;
};

/// Per-sample confidences from one mixture fitted per metric over the whole
/// set. A metric whose fit is degenerate or unseparated leaves its fit empty
/// and its confidences at 1.
struct ConfidenceEstimate {
    std::vector<ConfidencePair> pairs;
    std::optional<GmmFit> label_fit;
    std::optional<GmmFit> image_fit;
    bool label_degenerate = false;
    bool image_degenerate = false;
};

ConfidenceEstimate estimate_confidences(std::span<const double> tuple_metrics, std::span<const double> triple_metrics,
                                        const GmmOptions& options = {}, ExecPolicy exec = {});

}  // namespace suge
