#include "suge/config.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "suge/error.hpp"

namespace suge {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

double to_double(const std::string& key, const std::string& v) {
    std::size_t used = 0;
    double out = 0.0;
    try {
        out = std::stod(v, &used);
    } catch (const std::exception&) {
        throw ConfigError(key, "expected a number, got '" + v + "'");
    }
    if (used != v.size()) throw ConfigError(key, "expected a number, got '" + v + "'");
    return out;
}

std::uint64_t to_u64(const std::string& key, const std::string& v) {
    std::uint64_t out = 0;
    const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc() || ptr != v.data() + v.size()) {
        throw ConfigError(key, "expected a non-negative integer, got '" + v + "'");
    }
    return out;
}

std::size_t to_size(const std::string& key, const std::string& v) { return static_cast<std::size_t>(to_u64(key, v)); }

bool to_bool(const std::string& key, const std::string& v) {
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    throw ConfigError(key, "expected true/false, got '" + v + "'");
}

std::vector<std::size_t> to_size_list(const std::string& key, const std::string& v) {
    std::vector<std::size_t> out;
    std::stringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(to_size(key, trim(item)));
    if (out.empty()) throw ConfigError(key, "expected a comma-separated list of integers");
    return out;
}

std::string fmt(double v) {
    std::ostringstream o;
    o.precision(17);
    o << v;
    return o.str();
}

}  // namespace

KeyValues parse_key_values(const std::string& text) {
    KeyValues kv;
    std::istringstream in(text);
    std::string raw;
    std::size_t line = 0;
    while (std::getline(in, raw)) {
        ++line;
        const std::string s = trim(raw);
        if (s.empty() || s[0] == '#') continue;
        const auto eq = s.find('=');
        if (eq == std::string::npos) throw ConfigError("line " + std::to_string(line), "expected 'key = value'");
        const std::string key = trim(s.substr(0, eq));
        if (key.empty()) throw ConfigError("line " + std::to_string(line), "empty key");
        kv[key] = trim(s.substr(eq + 1));
    }
    return kv;
}

KeyValues load_key_values(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config", "cannot open " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_key_values(buf.str());
}

const std::set<std::string>& train_config_keys() {
    static const std::set<std::string> keys{
        "warmup_epochs", "max_epochs", "k_neighbors", "ridge_lambda", "epsilon", "tau_label", "tau_image",
        "gmm_max_iterations", "gmm_tolerance", "gmm_variance_floor", "mode", "no_neighboring",
        "no_reconstruction_weighting", "no_sample_weighting", "no_label_correction", "subset_label_composition",
        "hidden_dims", "feat_dim", "learning_rate", "lr_final_fraction", "momentum", "batch_size", "seed", "threads"};
    return keys;
}

TrainConfig train_config_from(const KeyValues& kv, TrainConfig c) {
    for (const auto& [key, v] : kv) {
        if (key == "warmup_epochs") c.warmup_epochs = to_size(key, v);
        else if (key == "max_epochs") c.max_epochs = to_size(key, v);
        else if (key == "k_neighbors") c.neighbors.k = to_size(key, v);
        else if (key == "ridge_lambda") c.neighbors.ridge_lambda = to_double(key, v);
        else if (key == "epsilon") c.uncertainty.epsilon = to_double(key, v);
        else if (key == "tau_label") c.correction.tau_label = to_double(key, v);
        else if (key == "tau_image") c.correction.tau_image = to_double(key, v);
        else if (key == "gmm_max_iterations") c.gmm.max_iterations = static_cast<int>(to_size(key, v));
        else if (key == "gmm_tolerance") c.gmm.tolerance = to_double(key, v);
        else if (key == "gmm_variance_floor") c.gmm.variance_floor = to_double(key, v);
        else if (key == "mode") c.mode = parse_train_mode(v);
        else if (key == "no_neighboring") c.ablation.no_neighboring = to_bool(key, v);
        else if (key == "no_reconstruction_weighting") c.ablation.no_reconstruction_weighting = to_bool(key, v);
        else if (key == "no_sample_weighting") c.ablation.no_sample_weighting = to_bool(key, v);
        else if (key == "no_label_correction") c.ablation.no_label_correction = to_bool(key, v);
        else if (key == "subset_label_composition") c.ablation.subset_label_composition = to_bool(key, v);
        else if (key == "hidden_dims") c.hidden_dims = to_size_list(key, v);
        else if (key == "feat_dim") c.feat_dim = to_size(key, v);
        else if (key == "learning_rate") c.learning_rate = to_double(key, v);
        else if (key == "lr_final_fraction") c.lr_final_fraction = to_double(key, v);
        else if (key == "momentum") c.momentum = to_double(key, v);
        else if (key == "batch_size") c.batch_size = to_size(key, v);
        else if (key == "seed") c.seed = to_u64(key, v);
        else if (key == "threads") c.threads = static_cast<int>(to_size(key, v));
    }
    return c;
}

KeyValues to_key_values(const TrainConfig& c) {
    std::string dims;
    for (std::size_t i = 0; i < c.hidden_dims.size(); ++i) dims += (i ? "," : "") + std::to_string(c.hidden_dims[i]);
    auto b = [](bool v) { return std::string(v ? "true" : "false"); };
    return {{"warmup_epochs", std::to_string(c.warmup_epochs)},
            {"max_epochs", std::to_string(c.max_epochs)},
            {"k_neighbors", std::to_string(c.neighbors.k)},
            {"ridge_lambda", fmt(c.neighbors.ridge_lambda)},
            {"epsilon", fmt(c.uncertainty.epsilon)},
            {"tau_label", fmt(c.correction.tau_label)},
            {"tau_image", fmt(c.correction.tau_image)},
            {"gmm_max_iterations", std::to_string(c.gmm.max_iterations)},
            {"gmm_tolerance", fmt(c.gmm.tolerance)},
            {"gmm_variance_floor", fmt(c.gmm.variance_floor)},
            {"mode", to_string(c.mode)},
            {"no_neighboring", b(c.ablation.no_neighboring)},
            {"no_reconstruction_weighting", b(c.ablation.no_reconstruction_weighting)},
            {"no_sample_weighting", b(c.ablation.no_sample_weighting)},
            {"no_label_correction", b(c.ablation.no_label_correction)},
            {"subset_label_composition", b(c.ablation.subset_label_composition)},
            {"hidden_dims", dims},
            {"feat_dim", std::to_string(c.feat_dim)},
            {"learning_rate", fmt(c.learning_rate)},
            {"lr_final_fraction", fmt(c.lr_final_fraction)},
            {"momentum", fmt(c.momentum)},
            {"batch_size", std::to_string(c.batch_size)},
            {"seed", std::to_string(c.seed)},
            {"threads", std::to_string(c.threads)}};
}

void SimulateConfig::validate() const {
    noise.validate();
    if (n_persons < 1) throw ConfigError("n_persons", "must be at least 1");
    if (n_train < n_persons) throw ConfigError("n_train", "must be at least n_persons");
    if (n_test < n_persons) throw ConfigError("n_test", "must be at least n_persons");
    if (input_dim < 2) throw ConfigError("input_dim", "must be at least 2");
    if (!(input_jitter >= 0.0)) throw ConfigError("input_jitter", "must be non-negative");
}

const std::set<std::string>& simulate_config_keys() {
    static const std::set<std::string> keys{
        "n_train", "n_test", "n_persons", "input_dim", "input_jitter", "seed", "noise_seed",
        "label_noise_fraction", "label_noise_min_deg", "label_noise_max_deg", "input_corrupt_fraction",
        "input_corrupt_scale"};
    return keys;
}

SimulateConfig simulate_config_from(const KeyValues& kv, SimulateConfig c) {
    for (const auto& [key, v] : kv) {
        if (key == "n_train") c.n_train = to_size(key, v);
        else if (key == "n_test") c.n_test = to_size(key, v);
        else if (key == "n_persons") c.n_persons = to_size(key, v);
        else if (key == "input_dim") c.input_dim = to_size(key, v);
        else if (key == "input_jitter") c.input_jitter = to_double(key, v);
        else if (key == "seed") c.seed = to_u64(key, v);
        else if (key == "noise_seed") c.noise.seed = to_u64(key, v);
        else if (key == "label_noise_fraction") c.noise.label_noise_fraction = to_double(key, v);
        else if (key == "label_noise_min_deg") c.noise.label_noise_min_deg = to_double(key, v);
        else if (key == "label_noise_max_deg") c.noise.label_noise_max_deg = to_double(key, v);
        else if (key == "input_corrupt_fraction") c.noise.input_corrupt_fraction = to_double(key, v);
        else if (key == "input_corrupt_scale") c.noise.input_corrupt_scale = to_double(key, v);
    }
    return c;
}

}  // namespace suge
