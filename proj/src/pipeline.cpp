#include "suge/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <array>
#include <limits>
#include <numbers>
#include <numeric>

#include "suge/error.hpp"

namespace suge {

std::string to_string(TrainMode mode) {
    switch (mode) {
        case TrainMode::baseline: return "baseline";
        case TrainMode::suge_cotrain: return "suge_cotrain";
        case TrainMode::suge_selftrain: return "suge_selftrain";
    }
    return "unknown";
}

TrainMode parse_train_mode(const std::string& text) {
    if (text == "baseline") return TrainMode::baseline;
    if (text == "suge_cotrain") return TrainMode::suge_cotrain;
    if (text == "suge_selftrain") return TrainMode::suge_selftrain;
    throw ConfigError("mode", "unknown mode '" + text + "' (baseline, suge_cotrain, suge_selftrain)");
}

void TrainConfig::validate() const {
    if (max_epochs < 1) throw ConfigError("max_epochs", "must be at least 1");
    if (warmup_epochs >= max_epochs) throw ConfigError("warmup_epochs", "must be smaller than max_epochs");
    neighbors.validate();
    uncertainty.validate();
    correction.validate();
    if (gmm.max_iterations < 1) throw ConfigError("gmm_max_iterations", "must be at least 1");
    if (!(gmm.tolerance >= 0.0)) throw ConfigError("gmm_tolerance", "must be >= 0");
    if (!(gmm.variance_floor > 0.0)) throw ConfigError("gmm_variance_floor", "must be positive");
    if (!(lr_final_fraction > 0.0 && lr_final_fraction <= 1.0)) {
        throw ConfigError("lr_final_fraction", "must be in (0, 1]");
    }
    if (threads < 1) throw ConfigError("threads", "must be at least 1");
    MlpConfig probe = network_config(1, 0);
    probe.validate();
}

namespace {

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(a), static_cast<std::uint32_t>(b)};
    std::array<std::uint32_t, 2> out{};
    seq.generate(out.begin(), out.end());
    return (static_cast<std::uint64_t>(out[0]) << 32) | out[1];
}

constexpr std::uint64_t kInitTag = 1;
constexpr std::uint64_t kShuffleTag = 2;

}  // namespace

MlpConfig TrainConfig::network_config(std::size_t input_dim, std::size_t network) const {
    MlpConfig c;
    c.input_dim = input_dim;
    c.hidden_dims = hidden_dims;
    c.feat_dim = feat_dim;
    c.learning_rate = learning_rate;
    c.momentum = momentum;
    c.batch_size = batch_size;
    c.seed = derive_seed(seed, network, kInitTag);
    return c;
}

double TrainConfig::learning_rate_at(std::size_t epoch) const {
    if (max_epochs <= 1) return learning_rate;
    const double t = static_cast<double>(epoch) / static_cast<double>(max_epochs - 1);
    const double floor = learning_rate * lr_final_fraction;
    return floor + 0.5 * (learning_rate - floor) * (1.0 + std::cos(std::numbers::pi * t));
}

void compute_features(const Dataset& ds, const Regressor& model, Matrix& features, std::vector<GazeLabel>& pseudo,
                      ExecPolicy exec) {
    features = Matrix(ds.size(), model.feat_dim());
    pseudo.resize(ds.size());
    parallel_for(ds.size(), exec, [&](std::size_t i) {
        Forward f = model.forward(ds.samples[i].input);
        std::copy(f.feature.begin(), f.feature.end(), features.row(i).begin());
        pseudo[i] = f.prediction;
    });
}

double train_epoch(Regressor& model, const Dataset& ds, const TrainingTargets& targets, std::size_t batch_size,
                   std::mt19937_64& rng) {
    const std::size_t n = ds.size();
    if (targets.labels.size() != n || targets.weights.size() != n) {
        throw InvalidInputError("train_epoch: targets do not match dataset size");
    }
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::shuffle(order.begin(), order.end(), rng);

    double total = 0.0;
    std::vector<TrainItem> batch;
    batch.reserve(batch_size);
    for (std::size_t start = 0; start < n; start += batch_size) {
        batch.clear();
        for (std::size_t t = start; t < std::min(n, start + batch_size); ++t) {
            const std::size_t i = order[t];
            batch.push_back({ds.samples[i].input, targets.labels[i], targets.weights[i]});
        }
        total += model.train_step(batch);
    }
    return total;
}

namespace {

TrainingTargets raw_targets(const Dataset& ds) { return {ds.labels(), std::vector<double>(ds.size(), 1.0)}; }

}  // namespace

void warm_up(Regressor& model, const Dataset& ds, std::size_t epochs, std::size_t batch_size, std::mt19937_64& rng) {
    const TrainingTargets targets = raw_targets(ds);
    for (std::size_t e = 0; e < epochs; ++e) train_epoch(model, ds, targets, batch_size, rng);
}

NetworkEpochState epoch_pass(const Dataset& ds, const Regressor& model, const TrainConfig& cfg) {
    const ExecPolicy exec = cfg.exec();
    const std::vector<GazeLabel> labels = ds.labels();
    NetworkEpochState st;

    compute_features(ds, model, st.features, st.pseudo, exec);
    std::vector<GazeLabel> unused;
    predict_with_flip(ds, model, unused, st.pseudo_aug, exec);

    if (cfg.ablation.no_neighboring) {
        st.neighbor_sets.resize(ds.size());
        for (std::size_t i = 0; i < ds.size(); ++i) st.neighbor_sets[i].sample = i;
        st.neighboring = st.pseudo;
    } else {
        const auto weighting = cfg.ablation.no_reconstruction_weighting ? NeighborWeighting::uniform
                                                                        : NeighborWeighting::reconstruction;
        st.neighbor_sets = build_neighbor_sets(st.features, ds.person_ids(), cfg.neighbors, weighting, exec);
        // Always from the immutable dataset labels, never from corrected ones.
        st.neighboring = weighted_label_sum(st.neighbor_sets, labels, labels, exec);
    }
    st.families = pseudo_label_families(st.pseudo, st.pseudo_aug, st.neighbor_sets, exec);

    st.distances.resize(ds.size());
    st.tuple_md.resize(ds.size());
    st.triple_md.resize(ds.size());
    parallel_for(ds.size(), exec, [&](std::size_t i) {
        st.distances[i] = triplet_distances(labels[i], st.pseudo[i], st.neighboring[i]);
        st.tuple_md[i] = tuple_md(st.distances[i], cfg.uncertainty.epsilon);
        st.triple_md[i] = triple_md(st.distances[i]);
    });

    st.confidence = estimate_confidences(st.tuple_md, st.triple_md, cfg.gmm, exec);

    CorrectionOptions options;
    options.composition =
        cfg.ablation.subset_label_composition ? LabelComposition::subset : LabelComposition::full;
    options.label_correction = !cfg.ablation.no_label_correction;
    options.sample_weighting = !cfg.ablation.no_sample_weighting;
    st.corrected = build_corrected_batch(labels, st.confidence.pairs, st.families, st.neighboring, cfg.correction,
                                         options, exec);
    return st;
}

std::pair<TrainingTargets, TrainingTargets> cotrain_exchange(const NetworkEpochState& net1,
                                                             const NetworkEpochState& net2) {
    const auto& y1 = net1.corrected.corrected_labels;
    const auto& y2 = net2.corrected.corrected_labels;
    if (y1.size() != y2.size()) throw InvalidInputError("cotrain_exchange: states differ in size");
    // Both averages use the pre-exchange labels.
    std::vector<GazeLabel> a1 = y1, a2 = y2;
    for (std::size_t i = 0; i < y1.size(); ++i) {
        const GazeLabel mean = 0.5 * (y1[i] + y2[i]);
        if (net1.corrected.truncated_label_conf[i] == 0.0) a1[i] = mean;
        if (net2.corrected.truncated_label_conf[i] == 0.0) a2[i] = mean;
    }
    return {TrainingTargets{std::move(a2), net2.corrected.sample_weights},
            TrainingTargets{std::move(a1), net1.corrected.sample_weights}};
}

TrainingTargets self_targets(const NetworkEpochState& state) {
    return {state.corrected.corrected_labels, state.corrected.sample_weights};
}

OracleSummary summarize_against_oracle(const Dataset& ds, const NetworkEpochState& st) {
    if (!ds.has_oracle()) throw InvalidInputError("summarize_against_oracle: dataset has no oracle fields");
    const std::size_t n = ds.size();
    std::vector<bool> label_bad(n), input_bad(n), label_flagged(n), image_flagged(n);
    std::vector<double> label_score(n), image_score(n);
    OracleSummary s;
    double tuple_bad = 0, tuple_clean = 0, triple_bad = 0, triple_clean = 0;
    std::size_t n_label_bad = 0, n_input_bad = 0, n_clean = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const Sample& smp = ds.samples[i];
        label_bad[i] = *smp.label_corrupted;
        input_bad[i] = *smp.input_corrupted;
        label_score[i] = 1.0 - st.confidence.pairs[i].label_confidence;
        image_score[i] = 1.0 - st.confidence.pairs[i].image_confidence;
        label_flagged[i] = st.corrected.truncated_label_conf[i] == 0.0;
        image_flagged[i] = st.corrected.truncated_image_conf[i] == 0.0;
        if (label_bad[i]) {
            ++n_label_bad;
            s.noisy_label_error += angular_distance_deg(smp.label, *smp.clean_label);
            s.corrected_label_error += angular_distance_deg(st.corrected.corrected_labels[i], *smp.clean_label);
            tuple_bad += st.tuple_md[i];
        }
        if (input_bad[i]) {
            ++n_input_bad;
            triple_bad += st.triple_md[i];
        }
        if (!label_bad[i] && !input_bad[i]) {
            ++n_clean;
            tuple_clean += st.tuple_md[i];
            triple_clean += st.triple_md[i];
        }
    }
    constexpr double nan = std::numeric_limits<double>::quiet_NaN();
    auto mean = [&](double sum, std::size_t count) { return count ? sum / static_cast<double>(count) : nan; };
    s.label_auc = roc_auc(label_score, label_bad);
    s.image_auc = roc_auc(image_score, input_bad);
    s.label_detection = detection_stats(label_flagged, label_bad);
    s.image_detection = detection_stats(image_flagged, input_bad);
    s.noisy_label_error = mean(s.noisy_label_error, n_label_bad);
    s.corrected_label_error = mean(s.corrected_label_error, n_label_bad);
    s.tuple_md_label_corrupted = mean(tuple_bad, n_label_bad);
    s.tuple_md_clean = mean(tuple_clean, n_clean);
    s.triple_md_input_corrupted = mean(triple_bad, n_input_bad);
    s.triple_md_clean = mean(triple_clean, n_clean);
    return s;
}

namespace {

double zero_fraction(const std::vector<double>& v) {
    const auto zeros = std::count(v.begin(), v.end(), 0.0);
    return static_cast<double>(zeros) / static_cast<double>(v.size());
}

ConfidenceSnapshot snapshot(const Dataset& ds, std::size_t epoch, std::size_t network, const NetworkEpochState& st) {
    ConfidenceSnapshot s;
    s.epoch = epoch;
    s.network = network;
    for (const Sample& smp : ds.samples) s.sample_ids.push_back(smp.id);
    s.tuple_md = st.tuple_md;
    s.triple_md = st.triple_md;
    for (const ConfidencePair& p : st.confidence.pairs) {
        s.label_confidence.push_back(p.label_confidence);
        s.image_confidence.push_back(p.image_confidence);
    }
    s.weight = st.corrected.sample_weights;
    return s;
}

void check_trainable(const Dataset& train, const TrainConfig& cfg) {
    train.validate();
    if (cfg.mode == TrainMode::baseline) return;
    const auto groups = train.person_group_sizes();
    const bool any_ok = std::any_of(groups.begin(), groups.end(),
                                    [&](const auto& g) { return g.second >= cfg.neighbors.k + 2; });
    if (!any_ok) {
        throw InvalidInputError("dataset too small: no person has at least k_neighbors + 2 = " +
                                std::to_string(cfg.neighbors.k + 2) + " samples");
    }
}

}  // namespace

RunResult run(const Dataset& train, const Dataset* test, const TrainConfig& cfg, const RunHooks& hooks) {
    cfg.validate();
    check_trainable(train, cfg);
    if (test != nullptr) {
        test->validate();
        if (test->input_dim != train.input_dim) throw InvalidInputError("test and train input dimensions differ");
    }
    auto log = [&](const std::string& msg) {
        if (hooks.log) hooks.log(msg);
    };
    const ExecPolicy exec = cfg.exec();
    constexpr std::size_t kNetworks = 2;

    RunResult result;
    RunReport& report = result.report;
    report.config = cfg;
    report.n_train = train.size();
    report.n_test = test ? test->size() : 0;
    report.has_oracle = train.has_oracle();

    std::vector<std::mt19937_64> shuffles;
    for (std::size_t k = 0; k < kNetworks; ++k) {
        result.networks.emplace_back(cfg.network_config(train.input_dim, k));
        shuffles.emplace_back(derive_seed(cfg.seed, k, kShuffleTag));
    }

    auto evaluate_into = [&](EpochRecord& rec) {
        if (test == nullptr) return;
        std::vector<const Regressor*> models;
        for (const Mlp& m : result.networks) models.push_back(&m);
        const EvalResult ev = evaluate(models, *test, exec);
        for (std::size_t k = 0; k < kNetworks; ++k) rec.networks[k].test_error = ev.per_model[k];
        rec.ensemble_test_error = ev.ensemble;
    };

    const TrainingTargets raw = raw_targets(train);
    const double n = static_cast<double>(train.size());
    const bool plain = cfg.mode == TrainMode::baseline;
    const std::size_t plain_epochs = plain ? cfg.max_epochs : cfg.warmup_epochs;

    for (std::size_t e = 0; e < plain_epochs; ++e) {
        EpochRecord rec;
        rec.epoch = e;
        rec.phase = plain ? "baseline" : "warmup";
        rec.networks.resize(kNetworks);
        for (std::size_t k = 0; k < kNetworks; ++k) {
            result.networks[k].set_learning_rate(cfg.learning_rate_at(e));
            rec.networks[k].train_loss =
                train_epoch(result.networks[k], train, raw, cfg.batch_size, shuffles[k]) / n;
        }
        evaluate_into(rec);
        report.epochs.push_back(std::move(rec));
    }

    for (std::size_t e = plain_epochs; e < cfg.max_epochs; ++e) {
        EpochRecord rec;
        rec.epoch = e;
        rec.phase = "suge";
        rec.networks.resize(kNetworks);
        std::vector<NetworkEpochState> states;
        states.reserve(kNetworks);
        for (std::size_t k = 0; k < kNetworks; ++k) {
            states.push_back(epoch_pass(train, result.networks[k], cfg));
            const NetworkEpochState& st = states.back();
            if (hooks.on_epoch_state) hooks.on_epoch_state(e, k, st);

            NetworkEpochSummary& sum = rec.networks[k];
            sum.label_zero_fraction = zero_fraction(st.corrected.truncated_label_conf);
            sum.image_zero_fraction = zero_fraction(st.corrected.truncated_image_conf);
            sum.label_fit_degenerate = st.confidence.label_degenerate;
            sum.image_fit_degenerate = st.confidence.image_degenerate;
            sum.label_fit = st.confidence.label_fit;
            sum.image_fit = st.confidence.image_fit;
            if (st.confidence.label_degenerate) {
                log("epoch " + std::to_string(e) + " net " + std::to_string(k + 1) +
                    ": label-confidence mixture degenerate, all label confidences set to 1");
            }
            if (st.confidence.image_degenerate) {
                log("epoch " + std::to_string(e) + " net " + std::to_string(k + 1) +
                    ": image-confidence mixture degenerate, all image confidences set to 1");
            }
            if (report.has_oracle) sum.oracle = summarize_against_oracle(train, st);
            report.history.push_back(snapshot(train, e, k, st));
        }

        std::array<TrainingTargets, kNetworks> targets;
        if (cfg.mode == TrainMode::suge_cotrain) {
            auto [t1, t2] = cotrain_exchange(states[0], states[1]);
            targets = {std::move(t1), std::move(t2)};
        } else {
            targets = {self_targets(states[0]), self_targets(states[1])};
        }
        for (std::size_t k = 0; k < kNetworks; ++k) {
            result.networks[k].set_learning_rate(cfg.learning_rate_at(e));
            rec.networks[k].train_loss =
                train_epoch(result.networks[k], train, targets[k], cfg.batch_size, shuffles[k]) / n;
        }
        evaluate_into(rec);
        report.epochs.push_back(std::move(rec));
    }

    if (test != nullptr) {
        std::vector<const Regressor*> models;
        for (const Mlp& m : result.networks) models.push_back(&m);
        report.final_eval = evaluate(models, *test, exec);
    }
    return result;
}

}  // namespace suge
