#include "cli.hpp"

#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "suge/config.hpp"
#include "suge/dataset.hpp"
#include "suge/error.hpp"
#include "suge/metrics.hpp"
#include "suge/model.hpp"
#include "suge/pipeline.hpp"
#include "suge/report.hpp"

namespace suge::cli {

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

struct Common {
    std::string config_path;
    std::vector<std::string> sets;
    std::optional<std::uint64_t> seed;
    std::optional<int> threads;
    std::string output_dir = ".";
    int verbosity = 0;
    bool self_check = false;
};

struct Streams {
    std::ostream& out;
    std::ostream& err;
};

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw Error("cannot write " + path.string());
    f << text;
    if (!f) throw Error("write failed for " + path.string());
}

std::string read_text(const fs::path& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw Error("cannot read " + path.string());
    std::ostringstream buf;
    buf << f.rdbuf();
    return buf.str();
}

void make_dir(const fs::path& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw Error("cannot create directory " + dir.string() + ": " + ec.message());
}

// File keys first, then --set, then the dedicated flags.
KeyValues collect_keys(const Common& c) {
    KeyValues kv;
    if (!c.config_path.empty()) kv = load_key_values(c.config_path);
    for (const std::string& s : c.sets) {
        if (s.find('=') == std::string::npos) throw ConfigError(s, "--set expects key=value");
        for (auto& [k, v] : parse_key_values(s)) kv[k] = v;
    }
    if (c.seed) kv["seed"] = std::to_string(*c.seed);
    if (c.threads) kv["threads"] = std::to_string(*c.threads);
    for (const auto& [k, v] : kv) {
        if (!train_config_keys().count(k) && !simulate_config_keys().count(k)) throw ConfigError(k, "unknown key");
    }
    return kv;
}

std::size_t count_flag(const Dataset& ds, bool label) {
    std::size_t n = 0;
    for (const Sample& s : ds.samples) {
        const auto& flag = label ? s.label_corrupted : s.input_corrupted;
        n += flag.value_or(false) ? 1 : 0;
    }
    return n;
}

ordered_json split_summary(const Dataset& ds) {
    return {{"samples", ds.samples.size()},
            {"label_corrupted", count_flag(ds, true)},
            {"input_corrupted", count_flag(ds, false)}};
}

int cmd_simulate(const Common& c, Streams io) {
    const KeyValues kv = collect_keys(c);
    SimulateConfig sc = simulate_config_from(kv);
    if (!kv.count("noise_seed")) sc.noise.seed = sc.seed;
    sc.validate();

    NoiseSpec clean = sc.noise;
    clean.label_noise_fraction = 0.0;
    clean.input_corrupt_fraction = 0.0;
    const Dataset train = generate_synthetic(sc.n_train, sc.n_persons, sc.input_dim, sc.noise, sc.seed,
                                             {sc.input_jitter, 0});
    const Dataset test = generate_synthetic(sc.n_test, sc.n_persons, sc.input_dim, clean, sc.seed,
                                            {sc.input_jitter, 1});

    const fs::path dir = c.output_dir;
    make_dir(dir);
    save_dataset(train, dir / "train.jsonl");
    save_dataset(test, dir / "test.jsonl");

    ordered_json manifest{{"schema_version", 1},
                          {"seed", sc.seed},
                          {"noise_seed", sc.noise.seed},
                          {"n_persons", sc.n_persons},
                          {"input_dim", sc.input_dim},
                          {"input_jitter", sc.input_jitter},
                          {"label_noise_fraction", sc.noise.label_noise_fraction},
                          {"label_noise_min_deg", sc.noise.label_noise_min_deg},
                          {"label_noise_max_deg", sc.noise.label_noise_max_deg},
                          {"input_corrupt_fraction", sc.noise.input_corrupt_fraction},
                          {"input_corrupt_scale", sc.noise.input_corrupt_scale},
                          {"train", split_summary(train)},
                          {"test", split_summary(test)}};
    write_text(dir / "manifest.json", manifest.dump(2) + "\n");

    if (c.self_check) {
        if (!(load_dataset(dir / "train.jsonl") == train) || !(load_dataset(dir / "test.jsonl") == test)) {
            throw Error("self-check: dataset files do not round-trip");
        }
        const auto m = ordered_json::parse(read_text(dir / "manifest.json"));
        if (m.at("train").at("label_corrupted").get<std::size_t>() != count_flag(train, true)) {
            throw Error("self-check: manifest counts disagree with train.jsonl");
        }
    }
    io.out << "wrote " << train.samples.size() << " train / " << test.samples.size() << " test samples to "
           << dir.string() << " (" << count_flag(train, true) << " label-corrupted, " << count_flag(train, false)
           << " input-corrupted)\n";
    return kOk;
}

int cmd_train(const Common& c, const std::string& train_path, const std::string& test_path, Streams io) {
    const TrainConfig cfg = train_config_from(collect_keys(c));
    cfg.validate();

    const Dataset train = load_dataset(train_path);
    std::optional<Dataset> test;
    if (!test_path.empty()) test = load_dataset(test_path);

    RunHooks hooks;
    if (c.verbosity > 0) hooks.log = [&io](const std::string& msg) { io.err << msg << "\n"; };
    const RunResult result = run(train, test ? &*test : nullptr, cfg, hooks);

    const fs::path dir = c.output_dir;
    make_dir(dir / "confidences");
    write_text(dir / "report.json", run_report_to_json(result.report));
    for (const ConfidenceSnapshot& snap : result.report.history) {
        write_text(dir / "confidences" / confidence_csv_name(snap), confidence_csv(snap));
    }
    for (std::size_t k = 0; k < result.networks.size(); ++k) {
        result.networks[k].save(dir / ("net" + std::to_string(k + 1) + ".json"));
    }
    std::string resolved;
    for (const auto& [k, v] : to_key_values(cfg)) resolved += k + " = " + v + "\n";
    write_text(dir / "config.txt", resolved);

    if (c.self_check) {
        validate_run_report_json(read_text(dir / "report.json"));
        for (const ConfidenceSnapshot& snap : result.report.history) {
            validate_confidence_csv(read_text(dir / "confidences" / confidence_csv_name(snap)), train.samples.size());
        }
        for (std::size_t k = 0; k < result.networks.size(); ++k) {
            if (!(Mlp::load(dir / ("net" + std::to_string(k + 1) + ".json")) == result.networks[k])) {
                throw Error("self-check: checkpoint net" + std::to_string(k + 1) + " does not round-trip");
            }
        }
    }

    io.out << "mode " << to_string(cfg.mode) << ", " << result.report.epochs.size() << " epochs";
    if (result.report.final_eval) {
        const EvalResult& ev = *result.report.final_eval;
        io.out << ", test error";
        for (std::size_t k = 0; k < ev.per_model.size(); ++k) io.out << " net" << k + 1 << " " << ev.per_model[k];
        io.out << " ensemble " << ev.ensemble;
    }
    io.out << "\n";
    return kOk;
}

int cmd_evaluate(const Common& c, const std::vector<std::string>& checkpoints, const std::string& test_path,
                 Streams io) {
    ExecPolicy exec;
    if (c.threads) exec.threads = *c.threads;
    std::vector<Mlp> models;
    for (const std::string& p : checkpoints) models.push_back(Mlp::load(p));
    const Dataset test = load_dataset(test_path);
    for (std::size_t k = 0; k < models.size(); ++k) {
        if (models[k].input_dim() != test.input_dim) {
            throw InvalidInputError(checkpoints[k] + ": input_dim " + std::to_string(models[k].input_dim()) +
                                    " does not match dataset input_dim " + std::to_string(test.input_dim));
        }
    }
    std::vector<const Regressor*> ptrs;
    for (const Mlp& m : models) ptrs.push_back(&m);
    const EvalResult ev = evaluate(ptrs, test, exec);

    ordered_json j{{"schema_version", 1}, {"test_samples", test.samples.size()}};
    for (std::size_t k = 0; k < models.size(); ++k) {
        j["models"].push_back({{"checkpoint", checkpoints[k]}, {"test_error", ev.per_model[k]}});
        io.out << checkpoints[k] << " " << ev.per_model[k] << "\n";
    }
    j["ensemble_test_error"] = ev.ensemble;
    io.out << "ensemble " << ev.ensemble << "\n";
    if (c.output_dir != ".") {
        make_dir(c.output_dir);
        write_text(fs::path(c.output_dir) / "eval.json", j.dump(2) + "\n");
    }
    return kOk;
}

int cmd_report(const Common& c, const std::vector<std::string>& run_dirs, Streams io) {
    std::vector<RunSummary> rows;
    for (const std::string& d : run_dirs) {
        const fs::path p = fs::path(d) / "report.json";
        if (!fs::exists(p)) {
            io.err << "warning: no report.json in " << d << ", skipped\n";
            continue;
        }
        try {
            rows.push_back(summarize_run_report(read_text(p), fs::path(d).lexically_normal().filename().string()));
        } catch (const ParseError& e) {
            io.err << "warning: " << p.string() << ": " << e.what() << ", skipped\n";
        }
    }
    if (rows.empty()) throw Error("no readable run reports");
    const ComparisonTable table = make_comparison(std::move(rows));
    const std::string text = comparison_text(table);
    io.out << text;
    if (c.output_dir != ".") make_dir(c.output_dir);
    write_text(fs::path(c.output_dir) / "comparison.txt", text);
    write_text(fs::path(c.output_dir) / "comparison.csv", comparison_csv(table));
    return kOk;
}

void add_common(CLI::App* sub, Common& c) {
    sub->add_option("-c,--config", c.config_path, "key = value configuration file")->check(CLI::ExistingFile);
    sub->add_option("--set", c.sets, "override a configuration key (key=value), repeatable");
    sub->add_option("--seed", c.seed, "seed override");
    sub->add_option("--threads", c.threads, "worker threads (1 = serial deterministic)")->check(CLI::PositiveNumber);
    sub->add_option("-o,--output-dir", c.output_dir, "directory for outputs");
    sub->add_flag("-v,--verbose", c.verbosity, "progress logging on stderr");
    sub->add_flag("--self-check", c.self_check, "validate written files against their schemas");
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"suge: label purification for noisy gaze regression data"};
    app.require_subcommand(1);
    app.set_version_flag("--version", "suge 1.0.0");

    Common common;
    std::string train_path, test_path;
    std::vector<std::string> checkpoints, run_dirs;

    CLI::App* sim = app.add_subcommand("simulate", "generate a synthetic train/test pair with oracle flags");
    add_common(sim, common);

    CLI::App* tr = app.add_subcommand("train", "run baseline, co-training or ablation training");
    add_common(tr, common);
    tr->add_option("--train", train_path, "training dataset (JSON lines)")->required()->check(CLI::ExistingFile);
    tr->add_option("--test", test_path, "clean test dataset (JSON lines)")->check(CLI::ExistingFile);

    CLI::App* ev = app.add_subcommand("evaluate", "angular error of checkpoints on a dataset");
    add_common(ev, common);
    ev->add_option("--checkpoint", checkpoints, "model checkpoint, repeatable")->required()->check(CLI::ExistingFile);
    ev->add_option("--test", test_path, "dataset (JSON lines)")->required()->check(CLI::ExistingFile);

    CLI::App* rep = app.add_subcommand("report", "comparison table across run directories");
    add_common(rep, common);
    rep->add_option("runs", run_dirs, "run directories containing report.json")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kOk : kValidationFailure;
    }

    const Streams io{out, err};
    try {
        if (*sim) return cmd_simulate(common, io);
        if (*tr) return cmd_train(common, train_path, test_path, io);
        if (*ev) return cmd_evaluate(common, checkpoints, test_path, io);
        return cmd_report(common, run_dirs, io);
    } catch (const ConfigError& e) {
        err << "error: invalid configuration: " << e.what() << "\n";
        return kValidationFailure;
    } catch (const ParseError& e) {
        err << "error: " << e.what() << "\n";
        return kValidationFailure;
    } catch (const InvalidInputError& e) {
        err << "error: " << e.what() << "\n";
        return kValidationFailure;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kRuntimeFailure;
    }
}

}  // namespace suge::cli
