#include "suge/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "suge/error.hpp"

namespace suge {

double roc_auc(std::span<const double> scores, const std::vector<bool>& positives) {
    if (scores.size() != positives.size()) throw InvalidInputError("roc_auc: length mismatch");
    const std::size_t n = scores.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });

    // Sum of midranks of the positives.
    double rank_sum = 0.0;
    std::size_t n_pos = 0;
    for (std::size_t i = 0; i < n;) {
        std::size_t j = i;
        while (j < n && scores[order[j]] == scores[order[i]]) ++j;
        const double midrank = 0.5 * static_cast<double>(i + 1 + j);
        for (std::size_t t = i; t < j; ++t) {
            if (positives[order[t]]) {
                rank_sum += midrank;
                ++n_pos;
            }
        }
        i = j;
    }
    const std::size_t n_neg = n - n_pos;
    if (n_pos == 0 || n_neg == 0) return std::numeric_limits<double>::quiet_NaN();
    const double p = static_cast<double>(n_pos);
    return (rank_sum - p * (p + 1.0) / 2.0) / (p * static_cast<double>(n_neg));
}

BinaryDetection detection_stats(const std::vector<bool>& flagged, const std::vector<bool>& positives) {
    if (flagged.size() != positives.size()) throw InvalidInputError("detection_stats: length mismatch");
    std::size_t tp = 0, fp = 0, fn = 0;
    for (std::size_t i = 0; i < flagged.size(); ++i) {
        if (flagged[i] && positives[i]) ++tp;
        else if (flagged[i]) ++fp;
        else if (positives[i]) ++fn;
    }
    constexpr double nan = std::numeric_limits<double>::quiet_NaN();
    BinaryDetection d;
    d.flagged = tp + fp;
    d.precision = tp + fp > 0 ? static_cast<double>(tp) / static_cast<double>(tp + fp) : nan;
    d.recall = tp + fn > 0 ? static_cast<double>(tp) / static_cast<double>(tp + fn) : nan;
    return d;
}

double mean_angular_error(std::span<const GazeLabel> predictions, std::span<const GazeLabel> targets) {
    if (predictions.size() != targets.size() || predictions.empty()) {
        throw InvalidInputError("mean_angular_error: empty or mismatched inputs");
    }
    double total = 0.0;
    for (std::size_t i = 0; i < predictions.size(); ++i) total += angular_distance_deg(predictions[i], targets[i]);
    return total / static_cast<double>(predictions.size());
}

EvalResult evaluate(std::span<const Regressor* const> models, const Dataset& test, ExecPolicy exec) {
    if (models.empty()) throw InvalidInputError("evaluate: no models");
    const std::size_t n = test.size();
    std::vector<std::vector<GazeLabel>> preds(models.size(), std::vector<GazeLabel>(n));
    std::vector<GazeLabel> ensemble(n);
    parallel_for(n, exec, [&](std::size_t i) {
        GazeLabel sum{};
        for (std::size_t m = 0; m < models.size(); ++m) {
            preds[m][i] = models[m]->predict(test.samples[i].input);
            sum = sum + preds[m][i];
        }
        ensemble[i] = (1.0 / static_cast<double>(models.size())) * sum;
    });
    // Test targets are the clean labels when the oracle is present.
    std::vector<GazeLabel> targets(n);
    for (std::size_t i = 0; i < n; ++i) {
        const Sample& s = test.samples[i];
        targets[i] = s.clean_label.value_or(s.label);
    }
    EvalResult r;
    for (const auto& p : preds) r.per_model.push_back(mean_angular_error(p, targets));
    r.ensemble = mean_angular_error(ensemble, targets);
    return r;
}

}  // namespace suge
