#include "suge/report.hpp"

#include <cmath>
#include <cstdio>
#include <iomanip>
#include <sstream>

#include "json.hpp"
#include "suge/config.hpp"
#include "suge/error.hpp"

namespace suge {

using nlohmann::json;

namespace {

// NaN becomes null in the JSON output.
json number(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

json opt_number(const std::optional<double>& v) { return v ? number(*v) : json(nullptr); }

json fit_to_json(const GmmFit& f) {
    return {{"means", {f.means[0], f.means[1]}},
            {"variances", {f.variances[0], f.variances[1]}},
            {"mixing", {f.mixing[0], f.mixing[1]}},
            {"reliable_component", f.reliable_component},
            {"converged", f.converged},
            {"iterations", f.iterations}};
}

json detection_to_json(const BinaryDetection& d) {
    return {{"precision", number(d.precision)}, {"recall", number(d.recall)}, {"flagged", d.flagged}};
}

json oracle_to_json(const OracleSummary& s) {
    return {{"label_auc", number(s.label_auc)},
            {"image_auc", number(s.image_auc)},
            {"label_detection", detection_to_json(s.label_detection)},
            {"image_detection", detection_to_json(s.image_detection)},
            {"noisy_label_error_deg", number(s.noisy_label_error)},
            {"corrected_label_error_deg", number(s.corrected_label_error)},
            {"tuple_md_label_corrupted", number(s.tuple_md_label_corrupted)},
            {"tuple_md_clean", number(s.tuple_md_clean)},
            {"triple_md_input_corrupted", number(s.triple_md_input_corrupted)},
            {"triple_md_clean", number(s.triple_md_clean)}};
}

std::string ablation_string(const AblationFlags& a) {
    std::string out;
    auto add = [&](bool on, const char* name) {
        if (!on) return;
        if (!out.empty()) out += '+';
        out += name;
    };
    add(a.no_neighboring, "no_neighboring");
    add(a.no_reconstruction_weighting, "no_reconstruction_weighting");
    add(a.no_sample_weighting, "no_sample_weighting");
    add(a.no_label_correction, "no_label_correction");
    add(a.subset_label_composition, "subset_label_composition");
    return out.empty() ? "none" : out;
}

std::string fmt_cell(const std::optional<double>& v, int precision) {
    if (!v || !std::isfinite(*v)) return "n/a";
    std::ostringstream o;
    o << std::fixed << std::setprecision(precision) << *v;
    return o.str();
}

std::optional<double> opt_from(const json& j, const char* key) {
    if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
    return j.at(key).get<double>();
}

}  // namespace

std::string run_report_to_json(const RunReport& r) {
    json epochs = json::array();
    for (const EpochRecord& e : r.epochs) {
        json nets = json::array();
        for (const NetworkEpochSummary& n : e.networks) {
            json jn = {{"train_loss", number(n.train_loss)}, {"test_error_deg", opt_number(n.test_error)}};
            if (n.label_zero_fraction) {
                jn["label_zero_fraction"] = *n.label_zero_fraction;
                jn["image_zero_fraction"] = *n.image_zero_fraction;
                jn["label_fit_degenerate"] = n.label_fit_degenerate;
                jn["image_fit_degenerate"] = n.image_fit_degenerate;
                jn["label_fit"] = n.label_fit ? fit_to_json(*n.label_fit) : json(nullptr);
                jn["image_fit"] = n.image_fit ? fit_to_json(*n.image_fit) : json(nullptr);
                jn["oracle"] = n.oracle ? oracle_to_json(*n.oracle) : json(nullptr);
            }
            nets.push_back(std::move(jn));
        }
        epochs.push_back({{"epoch", e.epoch},
                          {"phase", e.phase},
                          {"networks", std::move(nets)},
                          {"ensemble_test_error_deg", opt_number(e.ensemble_test_error)}});
    }
    json final_eval = nullptr;
    if (r.final_eval) {
        json per = json::array();
        for (double v : r.final_eval->per_model) per.push_back(number(v));
        final_eval = {{"per_network_deg", per}, {"ensemble_deg", number(r.final_eval->ensemble)}};
    }
    json config = json::object();
    for (const auto& [k, v] : to_key_values(r.config)) config[k] = v;
    json j = {{"schema_version", kRunReportSchemaVersion},
              {"mode", to_string(r.config.mode)},
              {"ablations", ablation_string(r.config.ablation)},
              {"config", config},
              {"n_train", r.n_train},
              {"n_test", r.n_test},
              {"has_oracle", r.has_oracle},
              {"epochs", epochs},
              {"final", final_eval}};
    return j.dump(2) + "\n";
}

std::string confidence_csv(const ConfidenceSnapshot& s) {
    std::string out = "sample_id,tuple_md,triple_md,label_confidence,image_confidence,weight\n";
    char buf[256];
    for (std::size_t i = 0; i < s.sample_ids.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%lld,%.17g,%.17g,%.17g,%.17g,%.17g\n",
                      static_cast<long long>(s.sample_ids[i]), s.tuple_md[i], s.triple_md[i], s.label_confidence[i],
                      s.image_confidence[i], s.weight[i]);
        out += buf;
    }
    return out;
}

std::string confidence_csv_name(const ConfidenceSnapshot& s) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "epoch_%03zu_net%zu.csv", s.epoch, s.network + 1);
    return buf;
}

RunSummary summarize_run_report(const std::string& text, const std::string& name) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ParseError(0, name + ": malformed report JSON: " + e.what());
    }
    try {
        RunSummary s;
        s.name = name;
        s.mode = j.at("mode").get<std::string>();
        s.ablations = j.value("ablations", std::string("none"));
        if (j.contains("final") && !j.at("final").is_null()) s.test_error = opt_from(j.at("final"), "ensemble_deg");
        // Detection quality on the first post-warm-up epoch, network 1.
        for (const json& e : j.at("epochs")) {
            if (e.at("phase") != "suge") continue;
            const json& net = e.at("networks").at(0);
            if (!net.contains("oracle") || net.at("oracle").is_null()) break;
            const json& o = net.at("oracle");
            s.label_auc = opt_from(o, "label_auc");
            s.image_auc = opt_from(o, "image_auc");
            s.label_precision = opt_from(o.at("label_detection"), "precision");
            s.label_recall = opt_from(o.at("label_detection"), "recall");
            s.image_precision = opt_from(o.at("image_detection"), "precision");
            s.image_recall = opt_from(o.at("image_detection"), "recall");
            break;
        }
        return s;
    } catch (const json::exception& e) {
        throw ParseError(0, name + ": report is missing fields: " + e.what());
    }
}

ComparisonTable make_comparison(std::vector<RunSummary> rows) {
    ComparisonTable t;
    for (const RunSummary& r : rows) {
        if (r.mode == "baseline" && r.test_error) {
            t.baseline_error = r.test_error;
            break;
        }
    }
    t.rows = std::move(rows);
    return t;
}

namespace {

std::vector<std::vector<std::string>> table_cells(const ComparisonTable& t) {
    std::vector<std::vector<std::string>> cells;
    cells.push_back({"run", "mode", "ablations", "test_error_deg", "delta_vs_baseline_deg", "label_auc",
                     "label_precision", "label_recall", "image_auc", "image_precision", "image_recall"});
    for (const RunSummary& r : t.rows) {
        std::optional<double> delta;
        if (t.baseline_error && r.test_error) delta = *t.baseline_error - *r.test_error;
        cells.push_back({r.name, r.mode, r.ablations, fmt_cell(r.test_error, 4), fmt_cell(delta, 4),
                         fmt_cell(r.label_auc, 4), fmt_cell(r.label_precision, 4), fmt_cell(r.label_recall, 4),
                         fmt_cell(r.image_auc, 4), fmt_cell(r.image_precision, 4), fmt_cell(r.image_recall, 4)});
    }
    return cells;
}

}  // namespace

std::string comparison_text(const ComparisonTable& t) {
    const auto cells = table_cells(t);
    std::vector<std::size_t> width(cells.front().size(), 0);
    for (const auto& row : cells) {
        for (std::size_t c = 0; c < row.size(); ++c) width[c] = std::max(width[c], row[c].size());
    }
    std::ostringstream o;
    for (std::size_t r = 0; r < cells.size(); ++r) {
        for (std::size_t c = 0; c < cells[r].size(); ++c) {
            o << std::left << std::setw(static_cast<int>(width[c])) << cells[r][c];
            o << (c + 1 < cells[r].size() ? "  " : "\n");
        }
        if (r == 0) {
            std::size_t total = 0;
            for (std::size_t w : width) total += w + 2;
            o << std::string(total - 2, '-') << '\n';
        }
    }
    return o.str();
}

std::string comparison_csv(const ComparisonTable& t) {
    std::ostringstream o;
    for (const auto& row : table_cells(t)) {
        for (std::size_t c = 0; c < row.size(); ++c) o << row[c] << (c + 1 < row.size() ? "," : "\n");
    }
    return o.str();
}

void validate_run_report_json(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ParseError(0, std::string("report: malformed JSON: ") + e.what());
    }
    auto require = [](bool ok, const std::string& what) {
        if (!ok) throw ParseError(0, "report: " + what);
    };
    require(j.is_object(), "top level must be an object");
    require(j.value("schema_version", 0) == kRunReportSchemaVersion, "unsupported schema_version");
    for (const char* key : {"mode", "ablations", "config", "n_train", "n_test", "has_oracle", "epochs", "final"}) {
        require(j.contains(key), std::string("missing '") + key + "'");
    }
    require(j.at("epochs").is_array(), "'epochs' must be an array");
    for (const json& e : j.at("epochs")) {
        require(e.contains("epoch") && e.contains("phase") && e.contains("networks"), "epoch entry incomplete");
        const std::string phase = e.at("phase").get<std::string>();
        require(phase == "warmup" || phase == "suge" || phase == "baseline", "unknown phase " + phase);
        require(e.at("networks").is_array() && e.at("networks").size() == 2, "each epoch needs two networks");
        for (const json& n : e.at("networks")) require(n.contains("train_loss"), "network entry lacks train_loss");
    }
}

void validate_confidence_csv(const std::string& text, std::size_t expected_rows) {
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line) || line != "sample_id,tuple_md,triple_md,label_confidence,image_confidence,weight") {
        throw ParseError(1, "confidence CSV: bad header");
    }
    std::size_t rows = 0;
    while (std::getline(in, line)) {
        ++rows;
        std::stringstream ss(line);
        std::string cell;
        std::size_t cols = 0;
        while (std::getline(ss, cell, ',')) {
            ++cols;
            if (cols >= 4 && cols <= 6) {
                double v = 0.0;
                try {
                    v = std::stod(cell);
                } catch (const std::exception&) {
                    throw ParseError(rows + 1, "confidence CSV: not a number: " + cell);
                }
                if (!(v >= 0.0 && v <= 1.0)) throw ParseError(rows + 1, "confidence CSV: value outside [0,1]");
            }
        }
        if (cols != 6) throw ParseError(rows + 1, "confidence CSV: expected 6 columns");
    }
    if (rows != expected_rows) {
        throw ParseError(0, "confidence CSV: expected " + std::to_string(expected_rows) + " rows, found " +
                                std::to_string(rows));
    }
}

}  // namespace suge
