#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "suge/correction.hpp"
#include "suge/dataset.hpp"
#include "suge/exec.hpp"
#include "suge/matrix.hpp"
#include "suge/metrics.hpp"
#include "suge/model.hpp"
#include "suge/neighbors.hpp"
#include "suge/uncertainty.hpp"

namespace suge {

enum class TrainMode {
    baseline,        ///< plain training on raw labels, no uncertainty machinery
    suge_cotrain,    ///< two networks exchanging corrected labels and weights
    suge_selftrain,  ///< two networks, each consuming its own labels and weights
};

std::string to_string(TrainMode mode);
TrainMode parse_train_mode(const std::string& text);  ///< throws ConfigError

struct AblationFlags {
    bool no_neighboring = false;               ///< neighboring label replaced by the pseudo label
    bool no_reconstruction_weighting = false;  ///< uniform 1/K neighbor weights
    bool no_sample_weighting = false;          ///< all sample weights 1
    bool no_label_correction = false;          ///< train on the original labels
    bool subset_label_composition = false;     ///< correction mixes only neighboring and pseudo

    friend bool operator==(const AblationFlags&, const AblationFlags&) = default;
};

struct TrainConfig {
    std::size_t warmup_epochs = 10;
    std::size_t max_epochs = 60;  ///< total epochs, warm-up included
    NeighborConfig neighbors;
    UncertaintyConfig uncertainty;
    CorrectionConfig correction;
    GmmOptions gmm;
    TrainMode mode = TrainMode::suge_cotrain;
    AblationFlags ablation;

    std::vector<std::size_t> hidden_dims{64, 32};
    std::size_t feat_dim = 16;
    double learning_rate = 0.05;
    /// Cosine decay from learning_rate down to learning_rate * lr_final_fraction
    /// over max_epochs; 1 keeps the rate constant.
    double lr_final_fraction = 0.05;
    double momentum = 0.9;
    std::size_t batch_size = 32;

    std::uint64_t seed = 0;
    int threads = 1;

    void validate() const;  ///< throws ConfigError naming the field
    MlpConfig network_config(std::size_t input_dim, std::size_t network) const;
    double learning_rate_at(std::size_t epoch) const;
    ExecPolicy exec() const noexcept { return {threads}; }
};

/// Everything one network computes in one post-warm-up epoch.
struct NetworkEpochState {
    Matrix features;
    std::vector<GazeLabel> pseudo;
    std::vector<GazeLabel> pseudo_aug;
    std::vector<NeighborSet> neighbor_sets;
    std::vector<GazeLabel> neighboring;
    std::vector<PseudoLabelFamily> families;
    std::vector<TripletDistances> distances;
    std::vector<double> tuple_md;
    std::vector<double> triple_md;
    ConfidenceEstimate confidence;
    CorrectedBatch corrected;
};

struct TrainingTargets {
    std::vector<GazeLabel> labels;
    std::vector<double> weights;

    friend bool operator==(const TrainingTargets&, const TrainingTargets&) = default;
};

/// Features plus pseudo labels from the model for every sample.
void compute_features(const Dataset& ds, const Regressor& model, Matrix& features, std::vector<GazeLabel>& pseudo,
                      ExecPolicy exec = {});

/// One shuffled pass over the data with the given targets and weights.
/// Returns the summed weighted loss.
double train_epoch(Regressor& model, const Dataset& ds, const TrainingTargets& targets, std::size_t batch_size,
                   std::mt19937_64& rng);

/// Plain training on the dataset labels with unit weights.
void warm_up(Regressor& model, const Dataset& ds, std::size_t epochs, std::size_t batch_size, std::mt19937_64& rng);

/// Neighbor labeling, uncertainty estimation, label correction and sample
/// weighting for one network.
NetworkEpochState epoch_pass(const Dataset& ds, const Regressor& model, const TrainConfig& cfg);

/// Cross-network averaging of zero-confidence labels followed by the swap:
/// `first` is what network 1 trains on (built from network 2's output) and
/// `second` what network 2 trains on.
std::pair<TrainingTargets, TrainingTargets> cotrain_exchange(const NetworkEpochState& net1,
                                                             const NetworkEpochState& net2);

/// Each network's own corrected labels and weights, no averaging.
TrainingTargets self_targets(const NetworkEpochState& state);

struct OracleSummary {
    double label_auc = 0.0;  ///< AUC of 1 - label confidence vs label corruption
    double image_auc = 0.0;  ///< AUC of 1 - image confidence vs input corruption
    BinaryDetection label_detection;  ///< truncated label confidence == 0
    BinaryDetection image_detection;  ///< truncated image confidence == 0
    double noisy_label_error = 0.0;      ///< mean deg(label, clean) over label-corrupted samples
    double corrected_label_error = 0.0;  ///< mean deg(corrected, clean) over label-corrupted samples
    double tuple_md_label_corrupted = 0.0;
    double tuple_md_clean = 0.0;
    double triple_md_input_corrupted = 0.0;
    double triple_md_clean = 0.0;
};

OracleSummary summarize_against_oracle(const Dataset& ds, const NetworkEpochState& state);

struct NetworkEpochSummary {
    double train_loss = 0.0;
    std::optional<double> test_error;
    // The rest is only present for post-warm-up SUGE epochs.
    std::optional<double> label_zero_fraction;
    std::optional<double> image_zero_fraction;
    bool label_fit_degenerate = false;
    bool image_fit_degenerate = false;
    std::optional<GmmFit> label_fit;
    std::optional<GmmFit> image_fit;
    std::optional<OracleSummary> oracle;
};

struct EpochRecord {
    std::size_t epoch = 0;
    std::string phase;  ///< "warmup", "suge" or "baseline"
    std::vector<NetworkEpochSummary> networks;
    std::optional<double> ensemble_test_error;
};

/// Per-sample audit rows for one network in one epoch.
struct ConfidenceSnapshot {
    std::size_t epoch = 0;
    std::size_t network = 0;
    std::vector<std::int64_t> sample_ids;
    std::vector<double> tuple_md, triple_md, label_confidence, image_confidence, weight;
};

struct RunReport {
    TrainConfig config;
    std::size_t n_train = 0;
    std::size_t n_test = 0;
    bool has_oracle = false;
    std::vector<EpochRecord> epochs;
    std::optional<EvalResult> final_eval;
    std::vector<ConfidenceSnapshot> history;
};

struct RunResult {
    RunReport report;
    std::vector<Mlp> networks;
};

struct RunHooks {
    std::function<void(const std::string&)> log;
    /// Called after each network's epoch_pass, before the exchange.
    std::function<void(std::size_t epoch, std::size_t network, const NetworkEpochState&)> on_epoch_state;
};

/// Full training run: warm-up, then per-epoch estimation, correction,
/// exchange and training. `test` may be null.
RunResult run(const Dataset& train, const Dataset* test, const TrainConfig& cfg, const RunHooks& hooks = {});

}  // namespace suge
