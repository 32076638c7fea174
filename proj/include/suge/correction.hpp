#pragma once

#include <span>
#include <vector>

#include "suge/dataset.hpp"
#include "suge/exec.hpp"
#include "suge/geometry.hpp"
#include "suge/model.hpp"
#include "suge/neighbors.hpp"
#include "suge/uncertainty.hpp"

namespace suge {

struct CorrectionConfig {
    double tau_label = 0.5;
    double tau_image = 0.5;

    void validate() const;
};

/// conf if conf > tau, else 0. The boundary conf == tau maps to 0.
constexpr double truncate_confidence(double conf, double tau) noexcept { return conf > tau ? conf : 0.0; }

/// Model-derived labels for one sample.
struct PseudoLabelFamily {
    GazeLabel pseudo;                ///< prediction on the input
    GazeLabel pseudo_aug;            ///< prediction on the flipped input, yaw negated back
    GazeLabel pseudo_neighbor;       ///< neighbor-weighted sum of neighbors' pseudo
    GazeLabel pseudo_neighbor_aug;   ///< neighbor-weighted sum of neighbors' pseudo_aug

    friend bool operator==(const PseudoLabelFamily&, const PseudoLabelFamily&) = default;
};

/// Combines per-sample predictions with neighbor weights. Samples without
/// neighbors fall back to their own pseudo / pseudo_aug.
std::vector<PseudoLabelFamily> pseudo_label_families(std::span<const GazeLabel> pseudo,
                                                     std::span<const GazeLabel> pseudo_aug,
                                                     std::span<const NeighborSet> sets, ExecPolicy exec = {});

/// Predictions on each input and on its flipped input (yaw negated back).
void predict_with_flip(const Dataset& ds, const Regressor& model, std::vector<GazeLabel>& pseudo,
                       std::vector<GazeLabel>& pseudo_aug, ExecPolicy exec = {});

enum class LabelComposition {
    full,    ///< mean of neighboring, pseudo, pseudo_aug, pseudo_neighbor, pseudo_neighbor_aug
    subset,  ///< mean of neighboring and pseudo
};

/// gamma * y + (1 - gamma) * mean(composition), componentwise in angle space.
GazeLabel corrected_label(const GazeLabel& y, const PseudoLabelFamily& family, const GazeLabel& neighboring,
                          double gamma, LabelComposition composition = LabelComposition::full);

struct CorrectionOptions {
    LabelComposition composition = LabelComposition::full;
    bool label_correction = true;   ///< false keeps y unchanged
    bool sample_weighting = true;   ///< false sets every weight to 1
};

struct CorrectedBatch {
    std::vector<GazeLabel> corrected_labels;
    std::vector<double> sample_weights;
    std::vector<double> truncated_label_conf;
    std::vector<double> truncated_image_conf;
};

CorrectedBatch build_corrected_batch(std::span<const GazeLabel> labels, std::span<const ConfidencePair> confidences,
                                     std::span<const PseudoLabelFamily> families,
                                     std::span<const GazeLabel> neighboring, const CorrectionConfig& cfg,
                                     const CorrectionOptions& options = {}, ExecPolicy exec = {});

}  // namespace suge
