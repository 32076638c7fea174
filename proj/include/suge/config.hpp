#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <set>
#include <string>

#include "suge/dataset.hpp"
#include "suge/pipeline.hpp"

namespace suge {

/// Parsed `key = value` configuration. Lines starting with '#' and blank
/// lines are ignored; a repeated key keeps its last value.
using KeyValues = std::map<std::string, std::string>;

KeyValues parse_key_values(const std::string& text);  ///< throws ConfigError("line N", ...)
KeyValues load_key_values(const std::filesystem::path& path);

/// Overrides `base` with every training key present in `kv`.
TrainConfig train_config_from(const KeyValues& kv, TrainConfig base = {});
KeyValues to_key_values(const TrainConfig& cfg);
const std::set<std::string>& train_config_keys();

struct SimulateConfig {
    std::size_t n_train = 4000;
    std::size_t n_test = 1000;
    std::size_t n_persons = 8;
    std::size_t input_dim = 24;
    double input_jitter = 0.02;
    std::uint64_t seed = 0;
    NoiseSpec noise;

    void validate() const;
};

SimulateConfig simulate_config_from(const KeyValues& kv, SimulateConfig base = {});
const std::set<std::string>& simulate_config_keys();

}  // namespace suge
