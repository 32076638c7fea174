#include "suge/model.hpp"

#include <cmath>
#include <fstream>
#include <random>
#include <sstream>

#include "json.hpp"
#include "suge/error.hpp"

namespace suge {

using nlohmann::json;

void MlpConfig::validate() const {
    if (input_dim < 1) throw ConfigError("input_dim", "must be at least 1");
    for (std::size_t h : hidden_dims) {
        if (h < 1) throw ConfigError("hidden_dims", "every hidden width must be at least 1");
    }
    if (feat_dim < 1) throw ConfigError("feat_dim", "must be at least 1");
    if (!(learning_rate > 0.0) || !std::isfinite(learning_rate)) {
        throw ConfigError("learning_rate", "must be positive and finite");
    }
    if (!(momentum >= 0.0 && momentum < 1.0)) throw ConfigError("momentum", "must be in [0, 1)");
    if (batch_size < 1) throw ConfigError("batch_size", "must be at least 1");
}

Mlp::Mlp(MlpConfig config) : config_(std::move(config)) {
    config_.validate();
    std::vector<std::size_t> widths{config_.input_dim};
    widths.insert(widths.end(), config_.hidden_dims.begin(), config_.hidden_dims.end());
    widths.push_back(config_.feat_dim);
    widths.push_back(2);
    std::size_t offset = 0;
    for (std::size_t l = 0; l + 1 < widths.size(); ++l) {
        Layer layer{widths[l], widths[l + 1], offset, offset + widths[l] * widths[l + 1]};
        offset = layer.bias_offset + layer.out;
        layers_.push_back(layer);
    }
    params_.assign(offset, 0.0);
    velocity_.assign(offset, 0.0);
    reset(config_.seed);
}

void Mlp::reset(std::uint64_t seed) {
    config_.seed = seed;
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    for (const Layer& layer : layers_) {
        const double scale = 1.0 / std::sqrt(static_cast<double>(layer.in));
        for (std::size_t i = 0; i < layer.in * layer.out; ++i) params_[layer.weight_offset + i] = scale * normal(rng);
        for (std::size_t i = 0; i < layer.out; ++i) params_[layer.bias_offset + i] = 0.0;
    }
    std::fill(velocity_.begin(), velocity_.end(), 0.0);
}

void Mlp::set_learning_rate(double lr) {
    if (!(lr > 0.0) || !std::isfinite(lr)) throw InvalidInputError("Mlp: learning rate must be positive");
    config_.learning_rate = lr;
}

void Mlp::set_parameters(std::span<const double> params) {
    if (params.size() != params_.size()) throw InvalidInputError("Mlp::set_parameters: wrong parameter count");
    params_.assign(params.begin(), params.end());
    std::fill(velocity_.begin(), velocity_.end(), 0.0);
}

void Mlp::forward_all(std::span<const double> input, std::vector<std::vector<double>>& act) const {
    if (input.size() != config_.input_dim) {
        throw InvalidInputError("Mlp: input dimension " + std::to_string(input.size()) + " does not match " +
                                std::to_string(config_.input_dim));
    }
    act.resize(layers_.size() + 1);
    act[0].assign(input.begin(), input.end());
    for (std::size_t l = 0; l < layers_.size(); ++l) {
        const Layer& layer = layers_[l];
        const bool head = l + 1 == layers_.size();
        const std::vector<double>& in = act[l];
        std::vector<double>& out = act[l + 1];
        out.resize(layer.out);
        for (std::size_t o = 0; o < layer.out; ++o) {
            const double* w = &params_[layer.weight_offset + o * layer.in];
            double acc = params_[layer.bias_offset + o];
            for (std::size_t i = 0; i < layer.in; ++i) acc += w[i] * in[i];
            out[o] = head ? acc : std::tanh(acc);
        }
    }
}

Forward Mlp::forward(std::span<const double> input) const {
    std::vector<std::vector<double>> act;
    forward_all(input, act);
    const auto& head = act.back();
    return {std::move(act[act.size() - 2]), GazeLabel{head[0], head[1]}};
}

double Mlp::loss_and_gradient(std::span<const TrainItem> batch, std::vector<double>& gradient) const {
    gradient.assign(params_.size(), 0.0);
    std::vector<std::vector<double>> act;
    std::vector<double> delta, prev_delta;
    double loss = 0.0;
    for (const TrainItem& item : batch) {
        if (item.weight == 0.0) continue;  // contributes neither loss nor gradient
        forward_all(item.input, act);
        const auto& pred = act.back();
        const double err[2] = {pred[0] - item.target.yaw, pred[1] - item.target.pitch};
        loss += item.weight * (std::abs(err[0]) + std::abs(err[1]));
        // Subgradient of |e| taken as 0 at e == 0.
        auto sign = [](double e) { return e > 0.0 ? 1.0 : (e < 0.0 ? -1.0 : 0.0); };
        delta = {item.weight * sign(err[0]), item.weight * sign(err[1])};

        for (std::size_t l = layers_.size(); l-- > 0;) {
            const Layer& layer = layers_[l];
            const std::vector<double>& in = act[l];
            for (std::size_t o = 0; o < layer.out; ++o) {
                const double d = delta[o];
                if (d == 0.0) continue;
                double* gw = &gradient[layer.weight_offset + o * layer.in];
                for (std::size_t i = 0; i < layer.in; ++i) gw[i] += d * in[i];
                gradient[layer.bias_offset + o] += d;
            }
            if (l == 0) break;
            // Back through the weights, then through tanh of the layer below.
            prev_delta.assign(layer.in, 0.0);
            for (std::size_t o = 0; o < layer.out; ++o) {
                const double d = delta[o];
                if (d == 0.0) continue;
                const double* w = &params_[layer.weight_offset + o * layer.in];
                for (std::size_t i = 0; i < layer.in; ++i) prev_delta[i] += w[i] * d;
            }
            for (std::size_t i = 0; i < layer.in; ++i) prev_delta[i] *= 1.0 - in[i] * in[i];
            delta.swap(prev_delta);
        }
    }
    return loss;
}

double Mlp::train_step(std::span<const TrainItem> batch) {
    if (batch.empty()) return 0.0;
    std::vector<double> grad;
    const double loss = loss_and_gradient(batch, grad);
    const double step = config_.learning_rate / static_cast<double>(batch.size());
    if (config_.momentum > 0.0) {
        for (std::size_t p = 0; p < params_.size(); ++p) {
            velocity_[p] = config_.momentum * velocity_[p] + grad[p];
            params_[p] -= step * velocity_[p];
        }
    } else {
        for (std::size_t p = 0; p < params_.size(); ++p) params_[p] -= step * grad[p];
    }
    return loss;
}

// Checkpoint layout: {"suge_checkpoint": 1, "config": {...}, "layers": [
//   {"in": n, "out": m, "weights": [m*n row-major], "bias": [m]}, ...]}

std::string Mlp::to_json() const {
    json layers = json::array();
    for (const Layer& layer : layers_) {
        const auto w0 = params_.begin() + static_cast<std::ptrdiff_t>(layer.weight_offset);
        const auto b0 = params_.begin() + static_cast<std::ptrdiff_t>(layer.bias_offset);
        layers.push_back({{"in", layer.in},
                          {"out", layer.out},
                          {"weights", std::vector<double>(w0, w0 + static_cast<std::ptrdiff_t>(layer.in * layer.out))},
                          {"bias", std::vector<double>(b0, b0 + static_cast<std::ptrdiff_t>(layer.out))}});
    }
    json j = {{"suge_checkpoint", 1},
              {"config",
               {{"input_dim", config_.input_dim},
                {"hidden_dims", config_.hidden_dims},
                {"feat_dim", config_.feat_dim},
                {"learning_rate", config_.learning_rate},
                {"momentum", config_.momentum},
                {"batch_size", config_.batch_size},
                {"seed", config_.seed}}},
              {"layers", layers}};
    return j.dump();
}

Mlp Mlp::from_json(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ParseError(0, std::string("checkpoint: malformed JSON: ") + e.what());
    }
    try {
        if (j.at("suge_checkpoint") != 1) throw ParseError(0, "checkpoint: unsupported version");
        const json& c = j.at("config");
        MlpConfig cfg;
        cfg.input_dim = c.at("input_dim").get<std::size_t>();
        cfg.hidden_dims = c.at("hidden_dims").get<std::vector<std::size_t>>();
        cfg.feat_dim = c.at("feat_dim").get<std::size_t>();
        cfg.learning_rate = c.at("learning_rate").get<double>();
        cfg.momentum = c.at("momentum").get<double>();
        cfg.batch_size = c.at("batch_size").get<std::size_t>();
        cfg.seed = c.at("seed").get<std::uint64_t>();
        Mlp mlp(cfg);
        const json& layers = j.at("layers");
        if (layers.size() != mlp.layers_.size()) throw ParseError(0, "checkpoint: layer count mismatch");
        std::vector<double> params(mlp.params_.size());
        for (std::size_t l = 0; l < layers.size(); ++l) {
            const Layer& layer = mlp.layers_[l];
            const auto w = layers[l].at("weights").get<std::vector<double>>();
            const auto b = layers[l].at("bias").get<std::vector<double>>();
            if (layers[l].at("in") != layer.in || layers[l].at("out") != layer.out ||
                w.size() != layer.in * layer.out || b.size() != layer.out) {
                throw ParseError(0, "checkpoint: layer " + std::to_string(l) + " shape mismatch");
            }
            std::copy(w.begin(), w.end(), params.begin() + static_cast<std::ptrdiff_t>(layer.weight_offset));
            std::copy(b.begin(), b.end(), params.begin() + static_cast<std::ptrdiff_t>(layer.bias_offset));
        }
        mlp.set_parameters(params);
        return mlp;
    } catch (const json::exception& e) {
        throw ParseError(0, std::string("checkpoint: ") + e.what());
    }
}

void Mlp::save(const std::filesystem::path& path) const {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write checkpoint " + path.string());
    out << to_json() << '\n';
}

Mlp Mlp::load(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open checkpoint " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return from_json(buf.str());
}

}  // namespace suge
