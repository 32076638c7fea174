#include <gtest/gtest.h>

#include <algorithm>

#include "json.hpp"

#include "suge/config.hpp"
#include "suge/error.hpp"
#include "suge/report.hpp"
#include "support.hpp"

using namespace suge;

namespace {

RunSummary row(std::string name, std::string mode, std::optional<double> err) {
    RunSummary r;
    r.name = std::move(name);
    r.mode = std::move(mode);
    r.ablations = "none";
    r.test_error = err;
    return r;
}

const RunReport& tiny_report() {
    static const RunReport r = [] {
        const Dataset train = generate_synthetic(200, 2, 6, NoiseSpec{}, 1);
        const Dataset test = generate_synthetic(50, 2, 6, test::no_noise(), 1, {0.02, 1});
        TrainConfig c;
        c.warmup_epochs = 1;
        c.max_epochs = 3;
        c.hidden_dims = {8};
        c.feat_dim = 4;
        return run(train, &test, c).report;
    }();
    return r;
}

}  // namespace

TEST(KeyValues, ParsesCommentsAndWhitespace) {
    const KeyValues kv = parse_key_values("# comment\n\n  tau_label = 0.4 \nmode=baseline\ntau_label=0.6\n");
    EXPECT_EQ(kv.size(), 2u);
    EXPECT_EQ(kv.at("tau_label"), "0.6");
    EXPECT_EQ(kv.at("mode"), "baseline");
}

TEST(KeyValues, ErrorsNameTheLine) {
    try {
        parse_key_values("a = 1\n\nnot a pair\n");
        FAIL();
    } catch (const ConfigError& e) {
        EXPECT_EQ(e.field(), "line 3");
    }
    EXPECT_THROW(parse_key_values(" = 4\n"), ConfigError);
}

TEST(TrainConfigKv, RoundTrip) {
    TrainConfig c;
    c.max_epochs = 17;
    c.hidden_dims = {12, 7, 3};
    c.correction.tau_label = 0.3;
    c.neighbors.ridge_lambda = 0.1 + 0.2;
    c.mode = TrainMode::suge_selftrain;
    c.ablation.no_sample_weighting = true;
    c.seed = 99;
    const TrainConfig back = train_config_from(to_key_values(c));
    EXPECT_EQ(to_key_values(back), to_key_values(c));
    EXPECT_EQ(back.neighbors.ridge_lambda, c.neighbors.ridge_lambda);
    EXPECT_EQ(back.hidden_dims, c.hidden_dims);
    EXPECT_EQ(back.ablation, c.ablation);
    for (const auto& [k, v] : to_key_values(c)) EXPECT_TRUE(train_config_keys().count(k)) << k;
}

TEST(TrainConfigKv, BadValuesNameTheKey) {
    for (const auto& [k, v] : std::vector<std::pair<std::string, std::string>>{
             {"tau_label", "abc"}, {"max_epochs", "-3"}, {"no_neighboring", "maybe"}, {"hidden_dims", ""},
             {"mode", "teacher"}}) {
        try {
            train_config_from({{k, v}});
            FAIL() << k;
        } catch (const ConfigError& e) {
            if (k != "mode") EXPECT_EQ(e.field(), k);
        }
    }
}

TEST(SimulateConfigKv, ReadsAndValidates) {
    const SimulateConfig s = simulate_config_from(
        {{"n_train", "500"}, {"label_noise_fraction", "0.1"}, {"input_dim", "12"}, {"seed", "4"}});
    EXPECT_EQ(s.n_train, 500u);
    EXPECT_EQ(s.input_dim, 12u);
    EXPECT_EQ(s.noise.label_noise_fraction, 0.1);
    SimulateConfig bad = s;
    bad.input_dim = 1;
    EXPECT_THROW(bad.validate(), ConfigError);
    EXPECT_EQ(train_config_keys().count("n_train"), 0u);
    EXPECT_EQ(simulate_config_keys().count("n_train"), 1u);
}

TEST(Report, JsonValidatesAndSummarizes) {
    const RunReport& r = tiny_report();
    const std::string text = run_report_to_json(r);
    EXPECT_NO_THROW(validate_run_report_json(text));
    const auto j = nlohmann::json::parse(text);
    EXPECT_EQ(j.at("epochs").size(), 3u);
    EXPECT_EQ(j.at("mode"), "suge_cotrain");
    const RunSummary s = summarize_run_report(text, "run_a");
    EXPECT_EQ(s.name, "run_a");
    EXPECT_EQ(s.ablations, "none");
    ASSERT_TRUE(s.test_error.has_value());
    EXPECT_EQ(*s.test_error, r.final_eval->ensemble);
    ASSERT_TRUE(s.label_auc.has_value());
    EXPECT_EQ(*s.label_auc, r.epochs[1].networks[0].oracle->label_auc);
}

TEST(Report, ValidatorRejectsBrokenReports) {
    auto j = nlohmann::json::parse(run_report_to_json(tiny_report()));
    EXPECT_THROW(validate_run_report_json("{"), ParseError);
    auto missing = j;
    missing.erase("epochs");
    EXPECT_THROW(validate_run_report_json(missing.dump()), ParseError);
    auto phase = j;
    phase["epochs"][0]["phase"] = "other";
    EXPECT_THROW(validate_run_report_json(phase.dump()), ParseError);
    auto version = j;
    version["schema_version"] = 99;
    EXPECT_THROW(validate_run_report_json(version.dump()), ParseError);
    EXPECT_THROW(summarize_run_report("[1, 2", "x"), ParseError);
    EXPECT_THROW(summarize_run_report("{}", "x"), ParseError);
}

TEST(Report, DeltaIsBaselineMinusRun) {
    const ComparisonTable t = make_comparison({row("base", "baseline", 5.46), row("suge", "suge_cotrain", 5.05)});
    ASSERT_TRUE(t.baseline_error.has_value());
    const std::string csv = comparison_csv(t);
    EXPECT_NE(csv.find("base,baseline,none,5.4600,0.0000"), std::string::npos) << csv;
    EXPECT_NE(csv.find("suge,suge_cotrain,none,5.0500,0.4100"), std::string::npos) << csv;
}

TEST(Report, MissingValuesPrintNa) {
    const ComparisonTable t = make_comparison({row("only", "suge_cotrain", 2.0)});
    EXPECT_FALSE(t.baseline_error.has_value());
    const std::string text = comparison_text(t);
    EXPECT_NE(text.find("n/a"), std::string::npos);
    const std::string csv = comparison_csv(t);
    EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 2);
    EXPECT_NE(csv.find("only,suge_cotrain,none,2.0000,n/a,n/a"), std::string::npos) << csv;
}

TEST(Report, SingleRunWithoutOracle) {
    const Dataset train = [] {
        Dataset d = generate_synthetic(200, 2, 6, NoiseSpec{}, 2);
        for (Sample& s : d.samples) s.clean_label.reset(), s.label_corrupted.reset(), s.input_corrupted.reset();
        return d;
    }();
    TrainConfig c;
    c.warmup_epochs = 1;
    c.max_epochs = 2;
    c.hidden_dims = {8};
    c.feat_dim = 4;
    const RunSummary s = summarize_run_report(run_report_to_json(run(train, nullptr, c).report), "r");
    EXPECT_FALSE(s.test_error.has_value());
    EXPECT_FALSE(s.label_auc.has_value());
    const std::string text = comparison_text(make_comparison({s}));
    EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 3);
}

TEST(ConfidenceCsv, FormatAndValidation) {
    ConfidenceSnapshot s;
    s.epoch = 10;
    s.network = 1;
    s.sample_ids = {4, 9};
    s.tuple_md = {0.5, 3.25};
    s.triple_md = {0.1, 7.0};
    s.label_confidence = {1.0, 0.0};
    s.image_confidence = {0.75, 0.2};
    s.weight = {0.75, 0.0};
    EXPECT_EQ(confidence_csv_name(s), "epoch_010_net2.csv");
    const std::string csv = confidence_csv(s);
    EXPECT_NO_THROW(validate_confidence_csv(csv, 2));
    EXPECT_THROW(validate_confidence_csv(csv, 3), ParseError);
    EXPECT_THROW(validate_confidence_csv("id,x\n", 0), ParseError);
    std::string bad = csv;
    bad.replace(bad.find("0.75"), 4, "1.75");
    EXPECT_THROW(validate_confidence_csv(bad, 2), ParseError);
    EXPECT_THROW(validate_confidence_csv(csv + "5,1,1,x,1,1\n", 3), ParseError);
}
