#pragma once

#include <span>
#include <vector>

#include "suge/dataset.hpp"
#include "suge/exec.hpp"
#include "suge/model.hpp"

namespace suge {

/// Area under the ROC curve of `scores` for the positive class, with ties
/// counted as half (Mann-Whitney). Returns NaN when either class is empty.
double roc_auc(std::span<const double> scores, const std::vector<bool>& positives);

struct BinaryDetection {
    double precision = 0.0;  ///< NaN when nothing is flagged
    double recall = 0.0;     ///< NaN when there are no positives
    std::size_t flagged = 0;
};

BinaryDetection detection_stats(const std::vector<bool>& flagged, const std::vector<bool>& positives);

/// Mean angular error (degrees) of each model and of the averaged prediction.
struct EvalResult {
    std::vector<double> per_model;
    double ensemble = 0.0;
};

double mean_angular_error(std::span<const GazeLabel> predictions, std::span<const GazeLabel> targets);

EvalResult evaluate(std::span<const Regressor* const> models, const Dataset& test, ExecPolicy exec = {});

}  // namespace suge
