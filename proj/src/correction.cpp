#include "suge/correction.hpp"

#include <cmath>

#include "suge/error.hpp"

namespace suge {

void CorrectionConfig::validate() const {
    if (!(tau_label >= 0.0 && tau_label <= 1.0)) throw ConfigError("tau_label", "must be in [0, 1]");
    if (!(tau_image >= 0.0 && tau_image <= 1.0)) throw ConfigError("tau_image", "must be in [0, 1]");
}

std::vector<PseudoLabelFamily> pseudo_label_families(std::span<const GazeLabel> pseudo,
                                                     std::span<const GazeLabel> pseudo_aug,
                                                     std::span<const NeighborSet> sets, ExecPolicy exec) {
    if (pseudo.size() != pseudo_aug.size() || pseudo.size() != sets.size()) {
        throw InvalidInputError("pseudo_label_families: inputs differ in length");
    }
    const auto np = weighted_label_sum(sets, pseudo, pseudo, exec);
    const auto npa = weighted_label_sum(sets, pseudo_aug, pseudo_aug, exec);
    std::vector<PseudoLabelFamily> out(pseudo.size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = {pseudo[i], pseudo_aug[i], np[i], npa[i]};
    return out;
}

void predict_with_flip(const Dataset& ds, const Regressor& model, std::vector<GazeLabel>& pseudo,
                       std::vector<GazeLabel>& pseudo_aug, ExecPolicy exec) {
    pseudo.resize(ds.size());
    pseudo_aug.resize(ds.size());
    parallel_for(ds.size(), exec, [&](std::size_t i) {
        const Sample& s = ds.samples[i];
        pseudo[i] = model.predict(s.input);
        pseudo_aug[i] = flip_label(model.predict(flip_input(ds, s)));
    });
}

GazeLabel corrected_label(const GazeLabel& y, const PseudoLabelFamily& f, const GazeLabel& neighboring, double gamma,
                          LabelComposition composition) {
    const GazeLabel mix = composition == LabelComposition::full
                              ? 0.2 * (neighboring + f.pseudo + f.pseudo_aug + f.pseudo_neighbor + f.pseudo_neighbor_aug)
                              : 0.5 * (neighboring + f.pseudo);
    return gamma * y + (1.0 - gamma) * mix;
}

CorrectedBatch build_corrected_batch(std::span<const GazeLabel> labels, std::span<const ConfidencePair> confidences,
                                     std::span<const PseudoLabelFamily> families,
                                     std::span<const GazeLabel> neighboring, const CorrectionConfig& cfg,
                                     const CorrectionOptions& options, ExecPolicy exec) {
    cfg.validate();
    const std::size_t n = labels.size();
    if (confidences.size() != n || families.size() != n || neighboring.size() != n) {
        throw InvalidInputError("build_corrected_batch: inputs differ in length");
    }
    CorrectedBatch out;
    out.corrected_labels.resize(n);
    out.sample_weights.resize(n);
    out.truncated_label_conf.resize(n);
    out.truncated_image_conf.resize(n);
    parallel_for(n, exec, [&](std::size_t i) {
        const double gamma_label = truncate_confidence(confidences[i].label_confidence, cfg.tau_label);
        const double gamma_image = truncate_confidence(confidences[i].image_confidence, cfg.tau_image);
        out.truncated_label_conf[i] = gamma_label;
        out.truncated_image_conf[i] = gamma_image;
        out.corrected_labels[i] = options.label_correction
                                      ? corrected_label(labels[i], families[i], neighboring[i], gamma_label,
                                                        options.composition)
                                      : labels[i];
        out.sample_weights[i] = options.sample_weighting ? gamma_image : 1.0;
    });
    return out;
}

}  // namespace suge
