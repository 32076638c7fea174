#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "suge/geometry.hpp"

namespace suge {

struct Sample {
    std::int64_t id = 0;
    std::int64_t person_id = 0;
    std::vector<double> input;
    GazeLabel label;                         ///< training label, possibly noisy
    std::optional<GazeLabel> clean_label;    ///< simulator oracle
    std::optional<bool> label_corrupted;     ///< simulator oracle
    std::optional<bool> input_corrupted;     ///< simulator oracle

    friend bool operator==(const Sample&, const Sample&) = default;
};

/// Ordered sample collection. The first `flip_odd_dims` input coordinates form
/// the odd block that a horizontal flip negates; the rest are flip-invariant.
struct Dataset {
    std::vector<Sample> samples;
    std::size_t input_dim = 0;
    std::size_t flip_odd_dims = 0;
    std::map<std::string, std::string> metadata;

    std::size_t size() const noexcept { return samples.size(); }
    bool has_oracle() const noexcept { return !samples.empty() && samples.front().clean_label.has_value(); }

    std::vector<GazeLabel> labels() const;
    std::vector<std::int64_t> person_ids() const;
    std::map<std::int64_t, std::size_t> person_group_sizes() const;

    /// Checks every dataset invariant; throws ParseError (line 0) naming the first violation.
    void validate() const;

    friend bool operator==(const Dataset&, const Dataset&) = default;
};

/// Horizontal-flip analogue on input vectors: negates the leading odd block.
std::vector<double> flip_input(std::span<const double> input, std::size_t odd_dims);
std::vector<double> flip_input(const Dataset& ds, const Sample& sample);

/// Reads a JSON-lines dataset (optional header line, then one sample per line).
Dataset load_dataset(const std::filesystem::path& path);
Dataset parse_dataset(const std::string& text);
void save_dataset(const Dataset& ds, const std::filesystem::path& path);
std::string serialize_dataset(const Dataset& ds);

struct NoiseSpec {
    double label_noise_fraction = 0.2;
    double label_noise_min_deg = 15.0;
    double label_noise_max_deg = 40.0;
    double input_corrupt_fraction = 0.05;
    double input_corrupt_scale = 3.0;
    std::uint64_t seed = 0;

    void validate() const;  ///< throws ConfigError
};

struct SyntheticOptions {
    double input_jitter = 0.02;   ///< stddev of Gaussian noise added to clean inputs
    std::uint64_t split = 0;      ///< independent sample stream over the same map (0 train, 1 test)
};

/// Frozen random smooth map from (label, person) to an input vector.
/// Coordinates [0, odd_dims) are sin(yaw) times a positive flip-invariant
/// factor; the remaining coordinates depend on cos(yaw), pitch and the person
/// embedding only. Hence map(flip_label(y), p) == flip_input(map(y, p)).
class SyntheticMap {
public:
    SyntheticMap(std::size_t input_dim, std::size_t n_persons, std::uint64_t seed);

    std::vector<double> operator()(const GazeLabel& label, std::int64_t person) const;

    std::size_t input_dim() const noexcept { return input_dim_; }
    std::size_t odd_dims() const noexcept { return odd_dims_; }
    std::size_t n_persons() const noexcept { return embeddings_.size(); }

private:
    static constexpr std::size_t kEmbedDim = 4;
    static constexpr std::size_t kHidden = 32;
    static constexpr std::size_t kDriveDim = 2 + kEmbedDim;

    std::size_t input_dim_;
    std::size_t odd_dims_;
    std::vector<std::vector<double>> embeddings_;  // per person
    std::vector<double> w1_, b1_;                  // kHidden x kDriveDim
    std::vector<double> w_even_, b_even_;          // even_dims x kHidden
    std::vector<double> w_person_;                 // even_dims x kEmbedDim
    std::vector<double> w_odd_;                    // odd_dims x kHidden
};

/// Simulated gaze dataset with controlled label noise and input corruption.
/// `seed` fixes the map; `options.split` selects an independent draw of
/// samples, and `noise.seed` the corruption draws.
Dataset generate_synthetic(std::size_t n_samples, std::size_t n_persons, std::size_t input_dim,
                           const NoiseSpec& noise, std::uint64_t seed,
                           const SyntheticOptions& options = {});

}  // namespace suge
