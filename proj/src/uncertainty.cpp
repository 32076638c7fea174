#include "suge/uncertainty.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "suge/error.hpp"

namespace suge {

void UncertaintyConfig::validate() const {
    if (!(epsilon > 0.0) || !std::isfinite(epsilon)) throw ConfigError("epsilon", "must be positive and finite");
}

TripletDistances triplet_distances(const GazeLabel& y, const GazeLabel& y_p, const GazeLabel& y_n) {
    return {angular_distance_deg(y_p, y), angular_distance_deg(y_p, y_n), angular_distance_deg(y_n, y)};
}

double tuple_md(const TripletDistances& d, double epsilon) {
    if (!(epsilon > 0.0)) throw InvalidInputError("tuple_md: epsilon must be positive");
    return std::min(d.d_pg, d.d_ng) / (d.d_pn + epsilon);
}

double triple_md(const TripletDistances& d) noexcept { return std::min({d.d_pg, d.d_pn, d.d_ng}); }

namespace {

constexpr double kLogSqrt2Pi = 0.91893853320467274178;  // log(sqrt(2 pi))

double log_normal(double x, double mean, double var) noexcept {
    const double z = x - mean;
    return -0.5 * z * z / var - 0.5 * std::log(var) - kLogSqrt2Pi;
}

double percentile(const std::vector<double>& sorted, double q) {
    const double pos = q * static_cast<double>(sorted.size() - 1);
    const auto lo = static_cast<std::size_t>(std::floor(pos));
    const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
    const double t = pos - static_cast<double>(lo);
    return sorted[lo] + t * (sorted[hi] - sorted[lo]);
}

/// Log densities weighted by mixing, per component.
std::array<double, 2> weighted_log_densities(const GmmFit& fit, double x) noexcept {
    return {std::log(fit.mixing[0]) + log_normal(x, fit.means[0], fit.variances[0]),
            std::log(fit.mixing[1]) + log_normal(x, fit.means[1], fit.variances[1])};
}

double log_sum_exp(const std::array<double, 2>& l) noexcept {
    const double m = std::max(l[0], l[1]);
    return m + std::log(std::exp(l[0] - m) + std::exp(l[1] - m));
}

}  // namespace

GmmFit fit_gmm_1d(std::span<const double> values, const GmmOptions& options) {
    std::vector<double> x(values.begin(), values.end());
    for (double v : x) {
        if (!std::isfinite(v)) throw InvalidInputError("fit_gmm_1d: non-finite value");
    }
    std::sort(x.begin(), x.end());
    if (x.size() < 2 || x.front() == x.back()) {
        throw DegenerateFitError("fit_gmm_1d: need at least two distinct values");
    }
    const auto n = static_cast<double>(x.size());

    double mean = 0.0;
    for (double v : x) mean += v;
    mean /= n;
    double var = 0.0;
    for (double v : x) var += (v - mean) * (v - mean);
    var = std::max(var / n, options.variance_floor);

    GmmFit fit;
    fit.means = {percentile(x, 0.10), percentile(x, 0.90)};
    fit.variances = {var, var};
    fit.mixing = {0.5, 0.5};

    std::vector<double> resp(x.size());  // responsibility of component 1
    auto e_step = [&]() {
        double ll = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i) {
            const auto l = weighted_log_densities(fit, x[i]);
            const double total = log_sum_exp(l);
            ll += total;
            resp[i] = std::exp(l[1] - total);
        }
        return ll;
    };

    double ll = e_step();
    fit.log_likelihood_trace.push_back(ll);
    for (int it = 0; it < options.max_iterations; ++it) {
        std::array<double, 2> weight{}, sum{};
        for (std::size_t i = 0; i < x.size(); ++i) {
            weight[1] += resp[i];
            weight[0] += 1.0 - resp[i];
            sum[1] += resp[i] * x[i];
            sum[0] += (1.0 - resp[i]) * x[i];
        }
        for (std::size_t c = 0; c < 2; ++c) {
            // A component that lost all mass keeps its previous parameters.
            if (!(weight[c] > 0.0)) continue;
            fit.means[c] = sum[c] / weight[c];
        }
        std::array<double, 2> sq{};
        for (std::size_t i = 0; i < x.size(); ++i) {
            const double r1 = resp[i];
            sq[1] += r1 * (x[i] - fit.means[1]) * (x[i] - fit.means[1]);
            sq[0] += (1.0 - r1) * (x[i] - fit.means[0]) * (x[i] - fit.means[0]);
        }
        for (std::size_t c = 0; c < 2; ++c) {
            if (!(weight[c] > 0.0)) continue;
            fit.variances[c] = std::max(sq[c] / weight[c], options.variance_floor);
        }
        // Keep mixing strictly inside (0, 1).
        const double w1 = std::clamp(weight[1] / n, 1e-12, 1.0 - 1e-12);
        fit.mixing = {1.0 - w1, w1};

        const double next = e_step();
        fit.log_likelihood_trace.push_back(next);
        fit.iterations = it + 1;
        const double gain = (next - ll) / n;
        ll = next;
        if (gain < options.tolerance) {
            fit.converged = true;
            break;
        }
    }

    fit.reliable_component = fit.means[0] <= fit.means[1] ? 0 : 1;
    const double range = x.back() - x.front();
    fit.separated = std::abs(fit.means[0] - fit.means[1]) >= 1e-3 * range;
    return fit;
}

std::array<double, 2> gmm_posteriors(const GmmFit& fit, double value) noexcept {
    const auto l = weighted_log_densities(fit, value);
    // Logistic form keeps both posteriors accurate far into either tail.
    const double p0 = 1.0 / (1.0 + std::exp(l[1] - l[0]));
    const double p1 = 1.0 / (1.0 + std::exp(l[0] - l[1]));
    return {p0, p1};
}

double posterior_reliable(const GmmFit& fit, double value) noexcept {
    return gmm_posteriors(fit, value)[fit.reliable_component];
}

ConfidenceEstimate estimate_confidences(std::span<const double> tuple_metrics, std::span<const double> triple_metrics,
                                        const GmmOptions& options, ExecPolicy exec) {
    if (tuple_metrics.size() != triple_metrics.size()) {
        throw InvalidInputError("estimate_confidences: metric lists differ in length");
    }
    ConfidenceEstimate est;
    est.pairs.resize(tuple_metrics.size());

    auto try_fit = [&](std::span<const double> metric, bool& degenerate) -> std::optional<GmmFit> {
        try {
            GmmFit fit = fit_gmm_1d(metric, options);
            if (fit.separated) return fit;
        } catch (const DegenerateFitError&) {
        }
        degenerate = true;
        return std::nullopt;
    };
    est.label_fit = try_fit(tuple_metrics, est.label_degenerate);
    est.image_fit = try_fit(triple_metrics, est.image_degenerate);

    parallel_for(est.pairs.size(), exec, [&](std::size_t i) {
        ConfidencePair& p = est.pairs[i];
        if (est.label_fit) p.label_confidence = posterior_reliable(*est.label_fit, tuple_metrics[i]);
        if (est.image_fit) p.image_confidence = posterior_reliable(*est.image_fit, triple_metrics[i]);
    });
    return est;
}

}  // namespace suge
