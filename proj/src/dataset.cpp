#include "suge/dataset.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <numeric>
#include <random>
#include <set>
#include <sstream>

#include "json.hpp"
#include "suge/error.hpp"

namespace suge {

using nlohmann::json;

namespace {

constexpr int kFormatVersion = 1;

std::mt19937_64 make_rng(std::uint64_t seed, std::uint64_t stream, std::uint64_t tag) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32),
                      static_cast<std::uint32_t>(tag)};
    return std::mt19937_64(seq);
}

json label_to_json(const GazeLabel& l) { return json{{"yaw", l.yaw}, {"pitch", l.pitch}}; }

double finite_number(const json& j, const char* what, std::size_t line) {
    if (!j.is_number()) throw ParseError(line, std::string(what) + " is not a number");
    const double v = j.get<double>();
    if (!std::isfinite(v)) throw ParseError(line, std::string(what) + " is not finite");
    return v;
}

GazeLabel label_from_json(const json& j, const char* what, std::size_t line) {
    if (!j.is_object() || !j.contains("yaw") || !j.contains("pitch")) {
        throw ParseError(line, std::string(what) + " must be an object with yaw and pitch");
    }
    return {finite_number(j.at("yaw"), what, line), finite_number(j.at("pitch"), what, line)};
}

bool label_in_box(const GazeLabel& l) {
    constexpr double pi = std::numbers::pi;
    return l.yaw >= -pi && l.yaw <= pi && l.pitch >= -pi / 2 && l.pitch <= pi / 2;
}

Sample sample_from_json(const json& j, std::size_t line) {
    if (!j.is_object()) throw ParseError(line, "sample must be a JSON object");
    for (const char* key : {"id", "person_id", "input", "label"}) {
        if (!j.contains(key)) throw ParseError(line, std::string("missing field '") + key + "'");
    }
    Sample s;
    if (!j.at("id").is_number_integer()) throw ParseError(line, "id must be an integer");
    if (!j.at("person_id").is_number_integer()) throw ParseError(line, "person_id must be an integer");
    s.id = j.at("id").get<std::int64_t>();
    s.person_id = j.at("person_id").get<std::int64_t>();
    const json& input = j.at("input");
    if (!input.is_array() || input.empty()) throw ParseError(line, "input must be a non-empty array");
    s.input.reserve(input.size());
    for (const json& v : input) s.input.push_back(finite_number(v, "input value", line));
    s.label = label_from_json(j.at("label"), "label", line);
    if (!label_in_box(s.label)) throw ParseError(line, "label outside yaw [-pi,pi] / pitch [-pi/2,pi/2]");
    if (j.contains("clean_label")) s.clean_label = label_from_json(j.at("clean_label"), "clean_label", line);
    for (auto [key, slot] : {std::pair{"label_corrupted", &s.label_corrupted},
                             std::pair{"input_corrupted", &s.input_corrupted}}) {
        if (!j.contains(key)) continue;
        if (!j.at(key).is_boolean()) throw ParseError(line, std::string(key) + " must be a boolean");
        *slot = j.at(key).get<bool>();
    }
    return s;
}

json sample_to_json(const Sample& s) {
    json j = {{"id", s.id}, {"person_id", s.person_id}, {"input", s.input}, {"label", label_to_json(s.label)}};
    if (s.clean_label) j["clean_label"] = label_to_json(*s.clean_label);
    if (s.label_corrupted) j["label_corrupted"] = *s.label_corrupted;
    if (s.input_corrupted) j["input_corrupted"] = *s.input_corrupted;
    return j;
}

bool oracle_complete(const Sample& s) {
    return s.clean_label.has_value() && s.label_corrupted.has_value() && s.input_corrupted.has_value();
}
bool oracle_empty(const Sample& s) {
    return !s.clean_label.has_value() && !s.label_corrupted.has_value() && !s.input_corrupted.has_value();
}

}  // namespace

std::vector<GazeLabel> Dataset::labels() const {
    std::vector<GazeLabel> out;
    out.reserve(samples.size());
    for (const Sample& s : samples) out.push_back(s.label);
    return out;
}

std::vector<std::int64_t> Dataset::person_ids() const {
    std::vector<std::int64_t> out;
    out.reserve(samples.size());
    for (const Sample& s : samples) out.push_back(s.person_id);
    return out;
}

std::map<std::int64_t, std::size_t> Dataset::person_group_sizes() const {
    std::map<std::int64_t, std::size_t> sizes;
    for (const Sample& s : samples) ++sizes[s.person_id];
    return sizes;
}

void Dataset::validate() const {
    if (samples.empty()) throw ParseError(0, "empty dataset");
    if (input_dim == 0) throw ParseError(0, "input_dim must be positive");
    if (flip_odd_dims > input_dim) throw ParseError(0, "flip_odd_dims exceeds input_dim");
    std::set<std::int64_t> ids;
    const bool oracle = oracle_complete(samples.front());
    for (const Sample& s : samples) {
        if (s.input.size() != input_dim) {
            throw ParseError(0, "sample " + std::to_string(s.id) + " has input dimension " +
                                    std::to_string(s.input.size()) + ", expected " + std::to_string(input_dim));
        }
        if (!ids.insert(s.id).second) throw ParseError(0, "duplicate id " + std::to_string(s.id));
        if (oracle ? !oracle_complete(s) : !oracle_empty(s)) {
            throw ParseError(0, "oracle fields must be present for all samples or none (sample " +
                                    std::to_string(s.id) + ")");
        }
    }
}

std::vector<double> flip_input(std::span<const double> input, std::size_t odd_dims) {
    std::vector<double> out(input.begin(), input.end());
    const std::size_t n = std::min(odd_dims, out.size());
    for (std::size_t j = 0; j < n; ++j) out[j] = -out[j];
    return out;
}

std::vector<double> flip_input(const Dataset& ds, const Sample& sample) {
    return flip_input(sample.input, ds.flip_odd_dims);
}

Dataset parse_dataset(const std::string& text) {
    Dataset ds;
    std::istringstream in(text);
    std::string raw;
    std::size_t line = 0;
    bool saw_header = false;
    bool dim_known = false;
    std::set<std::int64_t> ids;
    std::optional<bool> oracle;

    while (std::getline(in, raw)) {
        ++line;
        if (std::all_of(raw.begin(), raw.end(), [](unsigned char c) { return std::isspace(c); })) continue;
        json j;
        try {
            j = json::parse(raw);
        } catch (const json::parse_error& e) {
            throw ParseError(line, std::string("malformed JSON: ") + e.what());
        }
        if (j.is_object() && j.contains("suge_dataset")) {
            if (saw_header || !ds.samples.empty()) throw ParseError(line, "header must be the first line");
            saw_header = true;
            if (j.at("suge_dataset") != kFormatVersion) throw ParseError(line, "unsupported format version");
            if (!j.contains("input_dim") || !j.at("input_dim").is_number_unsigned()) {
                throw ParseError(line, "header input_dim must be a positive integer");
            }
            ds.input_dim = j.at("input_dim").get<std::size_t>();
            dim_known = ds.input_dim > 0;
            if (!dim_known) throw ParseError(line, "header input_dim must be a positive integer");
            ds.flip_odd_dims = j.value("flip_odd_dims", std::size_t{0});
            if (ds.flip_odd_dims > ds.input_dim) throw ParseError(line, "flip_odd_dims exceeds input_dim");
            if (j.contains("metadata")) {
                for (const auto& [k, v] : j.at("metadata").items()) {
                    if (!v.is_string()) throw ParseError(line, "metadata values must be strings");
                    ds.metadata[k] = v.get<std::string>();
                }
            }
            continue;
        }
        Sample s = sample_from_json(j, line);
        if (!dim_known) {
            ds.input_dim = s.input.size();
            dim_known = true;
        } else if (s.input.size() != ds.input_dim) {
            throw ParseError(line, "input dimension " + std::to_string(s.input.size()) + " does not match " +
                                       std::to_string(ds.input_dim));
        }
        if (!ids.insert(s.id).second) throw ParseError(line, "duplicate id " + std::to_string(s.id));
        const bool has = oracle_complete(s);
        if (!has && !oracle_empty(s)) throw ParseError(line, "partial oracle fields");
        if (!oracle) oracle = has;
        if (*oracle != has) throw ParseError(line, "oracle fields must be present for all samples or none");
        ds.samples.push_back(std::move(s));
    }
    if (ds.samples.empty()) throw ParseError(0, "empty dataset");
    return ds;
}

Dataset load_dataset(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot open dataset file " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_dataset(buf.str());
}

std::string serialize_dataset(const Dataset& ds) {
    ds.validate();
    std::string out;
    json header = {{"suge_dataset", kFormatVersion},
                   {"input_dim", ds.input_dim},
                   {"flip_odd_dims", ds.flip_odd_dims},
                   {"metadata", ds.metadata}};
    out += header.dump();
    out += '\n';
    for (const Sample& s : ds.samples) {
        out += sample_to_json(s).dump();
        out += '\n';
    }
    return out;
}

void save_dataset(const Dataset& ds, const std::filesystem::path& path) {
    const std::string text = serialize_dataset(ds);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write dataset file " + path.string());
    out << text;
    if (!out) throw Error("write failed for " + path.string());
}

// ---------------------------------------------------------------------------
// Synthetic data

void NoiseSpec::validate() const {
    auto fraction = [](const char* name, double v) {
        if (!(v >= 0.0 && v <= 1.0)) throw ConfigError(name, "must be in [0, 1]");
    };
    fraction("label_noise_fraction", label_noise_fraction);
    fraction("input_corrupt_fraction", input_corrupt_fraction);
    if (!(label_noise_min_deg >= 0.0 && label_noise_min_deg <= 180.0)) {
        throw ConfigError("label_noise_min_deg", "must be in [0, 180]");
    }
    if (!(label_noise_max_deg >= label_noise_min_deg && label_noise_max_deg <= 180.0)) {
        throw ConfigError("label_noise_max_deg", "must be in [label_noise_min_deg, 180]");
    }
    if (!(input_corrupt_scale > 0.0) || !std::isfinite(input_corrupt_scale)) {
        throw ConfigError("input_corrupt_scale", "must be positive and finite");
    }
}

SyntheticMap::SyntheticMap(std::size_t input_dim, std::size_t n_persons, std::uint64_t seed)
    : input_dim_(input_dim), odd_dims_(input_dim / 2) {
    if (input_dim < 2) throw ConfigError("input_dim", "must be at least 2");
    if (n_persons < 1) throw ConfigError("n_persons", "must be at least 1");
    auto rng = make_rng(seed, 0, 0x6d6170);
    std::normal_distribution<double> normal(0.0, 1.0);
    auto fill = [&](std::vector<double>& v, std::size_t n, double scale) {
        v.resize(n);
        for (double& x : v) x = scale * normal(rng);
    };
    const std::size_t even = input_dim_ - odd_dims_;
    embeddings_.resize(n_persons);
    for (auto& e : embeddings_) fill(e, kEmbedDim, 0.7);
    fill(w1_, kHidden * kDriveDim, 1.0 / std::sqrt(static_cast<double>(kDriveDim)) * 1.5);
    fill(b1_, kHidden, 0.3);
    fill(w_even_, even * kHidden, 1.5 / std::sqrt(static_cast<double>(kHidden)));
    fill(b_even_, even, 0.2);
    fill(w_person_, even * kEmbedDim, 0.4);
    fill(w_odd_, odd_dims_ * kHidden, 1.0 / std::sqrt(static_cast<double>(kHidden)));
}

std::vector<double> SyntheticMap::operator()(const GazeLabel& label, std::int64_t person) const {
    if (person < 0 || static_cast<std::size_t>(person) >= embeddings_.size()) {
        throw InvalidInputError("SyntheticMap: person id out of range");
    }
    const auto& emb = embeddings_[static_cast<std::size_t>(person)];
    // Flip-invariant drive: depends on yaw only through cos(yaw).
    std::array<double, kDriveDim> drive{};
    drive[0] = 4.0 * (1.0 - std::cos(label.yaw)) - 1.0;
    drive[1] = 2.0 * label.pitch;
    std::copy(emb.begin(), emb.end(), drive.begin() + 2);

    std::array<double, kHidden> hidden{};
    for (std::size_t h = 0; h < kHidden; ++h) {
        double acc = b1_[h];
        for (std::size_t d = 0; d < kDriveDim; ++d) acc += w1_[h * kDriveDim + d] * drive[d];
        hidden[h] = std::tanh(acc);
    }

    std::vector<double> out(input_dim_);
    const double s = std::sin(label.yaw);
    for (std::size_t j = 0; j < odd_dims_; ++j) {
        double acc = 0.0;
        for (std::size_t h = 0; h < kHidden; ++h) acc += w_odd_[j * kHidden + h] * hidden[h];
        out[j] = 2.0 * s * (1.0 + 0.5 * std::tanh(acc));
    }
    const std::size_t even = input_dim_ - odd_dims_;
    for (std::size_t j = 0; j < even; ++j) {
        double acc = b_even_[j];
        for (std::size_t h = 0; h < kHidden; ++h) acc += w_even_[j * kHidden + h] * hidden[h];
        for (std::size_t d = 0; d < kEmbedDim; ++d) acc += w_person_[j * kEmbedDim + d] * emb[d];
        out[odd_dims_ + j] = acc;
    }
    return out;
}

namespace {

/// Rotates `clean` by `angle_rad` along a uniformly random tangent direction.
GazeLabel offset_on_sphere(const GazeLabel& clean, double angle_rad, double direction) {
    const Direction3 d = gaze_to_3d(clean);
    // Tangent basis: e1 along increasing yaw, e2 = d x e1.
    const Direction3 e1{-std::cos(clean.yaw), 0.0, std::sin(clean.yaw)};
    const Direction3 e2{d.y * e1.z - d.z * e1.y, d.z * e1.x - d.x * e1.z, d.x * e1.y - d.y * e1.x};
    const double c = std::cos(direction), s = std::sin(direction);
    const Direction3 t{c * e1.x + s * e2.x, c * e1.y + s * e2.y, c * e1.z + s * e2.z};
    const double ca = std::cos(angle_rad), sa = std::sin(angle_rad);
    return gaze_from_3d({ca * d.x + sa * t.x, ca * d.y + sa * t.y, ca * d.z + sa * t.z});
}

std::vector<bool> pick_exact(std::size_t n, double fraction, std::mt19937_64& rng) {
    const auto count = static_cast<std::size_t>(std::llround(fraction * static_cast<double>(n)));
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    // Partial Fisher-Yates: the first `count` slots become the chosen subset.
    std::vector<bool> flags(n, false);
    for (std::size_t i = 0; i < count; ++i) {
        std::uniform_int_distribution<std::size_t> pick(i, n - 1);
        std::swap(order[i], order[pick(rng)]);
        flags[order[i]] = true;
    }
    return flags;
}

}  // namespace

Dataset generate_synthetic(std::size_t n_samples, std::size_t n_persons, std::size_t input_dim,
                           const NoiseSpec& noise, std::uint64_t seed, const SyntheticOptions& options) {
    noise.validate();
    if (n_persons < 1) throw ConfigError("n_persons", "must be at least 1");
    if (n_samples < n_persons) throw ConfigError("n_samples", "must be at least n_persons");
    if (input_dim < 2) throw ConfigError("input_dim", "must be at least 2");
    if (!(options.input_jitter >= 0.0)) throw ConfigError("input_jitter", "must be non-negative");

    const SyntheticMap map(input_dim, n_persons, seed);
    auto sample_rng = make_rng(seed, options.split, 0x73616d);
    auto noise_rng = make_rng(noise.seed, options.split, 0x6e6f69);

    std::uniform_real_distribution<double> yaw_dist(-1.0, 1.0);
    std::uniform_real_distribution<double> pitch_dist(-0.6, 0.6);
    std::normal_distribution<double> jitter(0.0, 1.0);

    Dataset ds;
    ds.input_dim = input_dim;
    ds.flip_odd_dims = map.odd_dims();
    ds.samples.resize(n_samples);
    for (std::size_t i = 0; i < n_samples; ++i) {
        Sample& s = ds.samples[i];
        s.id = static_cast<std::int64_t>(i);
        s.person_id = static_cast<std::int64_t>(i % n_persons);
        const GazeLabel clean{yaw_dist(sample_rng), pitch_dist(sample_rng)};
        s.input = map(clean, s.person_id);
        for (double& x : s.input) x += options.input_jitter * jitter(sample_rng);
        s.label = clean;
        s.clean_label = clean;
        s.label_corrupted = false;
        s.input_corrupted = false;
    }

    const std::vector<bool> label_flags = pick_exact(n_samples, noise.label_noise_fraction, noise_rng);
    const std::vector<bool> input_flags = pick_exact(n_samples, noise.input_corrupt_fraction, noise_rng);
    std::uniform_real_distribution<double> magnitude(noise.label_noise_min_deg, noise.label_noise_max_deg);
    std::uniform_real_distribution<double> direction(0.0, 2.0 * std::numbers::pi);
    std::cauchy_distribution<double> heavy(0.0, 1.0);
    for (std::size_t i = 0; i < n_samples; ++i) {
        Sample& s = ds.samples[i];
        if (label_flags[i]) {
            const double m = magnitude(noise_rng) * kDegToRad;
            s.label = offset_on_sphere(*s.clean_label, m, direction(noise_rng));
            s.label_corrupted = true;
        }
        if (input_flags[i]) {
            for (double& x : s.input) x = noise.input_corrupt_scale * heavy(noise_rng);
            s.input_corrupted = true;
        }
    }

    auto fmt = [](double v) {
        std::ostringstream o;
        o.precision(17);
        o << v;
        return o.str();
    };
    ds.metadata = {{"generator", "synthetic"},
                   {"seed", std::to_string(seed)},
                   {"split", std::to_string(options.split)},
                   {"n_persons", std::to_string(n_persons)},
                   {"noise_seed", std::to_string(noise.seed)},
                   {"label_noise_fraction", fmt(noise.label_noise_fraction)},
                   {"label_noise_min_deg", fmt(noise.label_noise_min_deg)},
                   {"label_noise_max_deg", fmt(noise.label_noise_max_deg)},
                   {"input_corrupt_fraction", fmt(noise.input_corrupt_fraction)},
                   {"input_corrupt_scale", fmt(noise.input_corrupt_scale)},
                   {"input_jitter", fmt(options.input_jitter)}};
    return ds;
}

}  // namespace suge
