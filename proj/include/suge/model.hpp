#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "suge/geometry.hpp"

namespace suge {

struct TrainItem {
    std::span<const double> input;
    GazeLabel target;
    double weight = 1.0;
};

struct Forward {
    std::vector<double> feature;
    GazeLabel prediction;
};

/// Encoder plus regression head. encode/predict are const and may run
/// concurrently; train_step calls must be serialized by the owner.
class Regressor {
public:
    virtual ~Regressor() = default;

    virtual std::size_t input_dim() const = 0;
    virtual std::size_t feat_dim() const = 0;

    virtual Forward forward(std::span<const double> input) const = 0;
    std::vector<double> encode(std::span<const double> input) const { return forward(input).feature; }
    GazeLabel predict(std::span<const double> input) const { return forward(input).prediction; }

    /// One optimizer step on sum_i w_i * |target_i - pred_i|_1. Returns that sum.
    virtual double train_step(std::span<const TrainItem> batch) = 0;

    /// Reinitializes all parameters from `seed`.
    virtual void reset(std::uint64_t seed) = 0;

    virtual void set_learning_rate(double lr) = 0;

    virtual std::unique_ptr<Regressor> clone() const = 0;
};

struct MlpConfig {
    std::size_t input_dim = 0;
    std::vector<std::size_t> hidden_dims{64, 32};
    std::size_t feat_dim = 16;
    double learning_rate = 0.05;
    double momentum = 0.0;
    std::size_t batch_size = 32;
    std::uint64_t seed = 0;

    void validate() const;  ///< throws ConfigError
    friend bool operator==(const MlpConfig&, const MlpConfig&) = default;
};

/// Fully connected tanh network: input -> hidden_dims... -> feat_dim (the
/// feature) -> linear 2-unit head (yaw, pitch). Trained by SGD on a weighted
/// L1 loss with hand-derived gradients. Parameters live in one flat array,
/// layer by layer, weights (row-major, out x in) followed by biases.
class Mlp final : public Regressor {
public:
    explicit Mlp(MlpConfig config);

    std::size_t input_dim() const override { return config_.input_dim; }
    std::size_t feat_dim() const override { return config_.feat_dim; }
    const MlpConfig& config() const noexcept { return config_; }

    Forward forward(std::span<const double> input) const override;
    double train_step(std::span<const TrainItem> batch) override;
    void reset(std::uint64_t seed) override;
    void set_learning_rate(double lr) override;
    std::unique_ptr<Regressor> clone() const override { return std::make_unique<Mlp>(*this); }

    /// Weighted L1 loss of the batch and its gradient w.r.t. every parameter.
    double loss_and_gradient(std::span<const TrainItem> batch, std::vector<double>& gradient) const;

    std::span<const double> parameters() const noexcept { return params_; }
    void set_parameters(std::span<const double> params);
    std::size_t parameter_count() const noexcept { return params_.size(); }

    std::string to_json() const;
    static Mlp from_json(const std::string& text);
    void save(const std::filesystem::path& path) const;
    static Mlp load(const std::filesystem::path& path);

    friend bool operator==(const Mlp& a, const Mlp& b) {
        return a.config_ == b.config_ && a.params_ == b.params_;
    }

private:
    struct Layer {
        std::size_t in = 0, out = 0;
        std::size_t weight_offset = 0, bias_offset = 0;
    };

    void forward_all(std::span<const double> input, std::vector<std::vector<double>>& activations) const;

    MlpConfig config_;
    std::vector<Layer> layers_;  // last layer is the linear head
    std::vector<double> params_;
    std::vector<double> velocity_;
};

}  // namespace suge
