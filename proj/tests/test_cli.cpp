#include <gtest/gtest.h>

#include <algorithm>
#include <fstream>
#include <sstream>

#include "json.hpp"

#include "cli.hpp"
#include "suge/report.hpp"
#include "support.hpp"

namespace fs = std::filesystem;

namespace {

struct Result {
    int code;
    std::string out, err;
};

Result cli(std::vector<std::string> args) {
    args.insert(args.begin(), "suge");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    const int code = suge::cli::run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

nlohmann::json manifest(const fs::path& dir) { return nlohmann::json::parse(slurp(dir / "manifest.json")); }

// Small simulated dataset shared by the train/report tests.
const fs::path& small_data() {
    static suge::test::TempDir dir;
    static const bool made = [] {
        const Result r = cli({"simulate", "-o", dir.path().string(), "--seed", "5", "--set", "n_train=400", "--set",
                              "n_test=100", "--set", "n_persons=4", "--set", "input_dim=8"});
        EXPECT_EQ(r.code, 0) << r.err;
        return true;
    }();
    (void)made;
    return dir.path();
}

std::vector<std::string> quick_train(const fs::path& out, const std::string& mode) {
    return {"train",   "-o",    out.string(),      "--train",        (small_data() / "train.jsonl").string(),
            "--test",  (small_data() / "test.jsonl").string(), "--set", "mode=" + mode,
            "--set",   "warmup_epochs=1", "--set", "max_epochs=3", "--set", "hidden_dims=8", "--set", "feat_dim=4"};
}

}  // namespace

TEST(CliSimulate, ZeroFractionsReportNoCorruption) {
    suge::test::TempDir dir;
    const Result r = cli({"simulate", "-o", dir.path().string(), "--set", "n_train=300", "--set", "n_test=50",
                          "--set", "label_noise_fraction=0", "--set", "input_corrupt_fraction=0", "--self-check"});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto m = manifest(dir.path());
    EXPECT_EQ(m["train"]["label_corrupted"], 0);
    EXPECT_EQ(m["train"]["input_corrupted"], 0);
    EXPECT_EQ(m["train"]["samples"], 300);
}

TEST(CliSimulate, SameSeedIsByteIdentical) {
    suge::test::TempDir a, b;
    for (const auto* d : {&a, &b}) {
        ASSERT_EQ(cli({"simulate", "-o", d->path().string(), "--seed", "11", "--set", "n_train=200", "--set",
                       "n_test=40"})
                      .code,
                  0);
    }
    for (const char* f : {"train.jsonl", "test.jsonl", "manifest.json"}) {
        EXPECT_EQ(slurp(a.path() / f), slurp(b.path() / f)) << f;
    }
}

TEST(CliSimulate, ManifestCountMatchesFraction) {
    suge::test::TempDir dir;
    ASSERT_EQ(cli({"simulate", "-o", dir.path().string(), "--set", "n_train=5000", "--set", "n_test=10", "--set",
                   "label_noise_fraction=0.2", "--set", "input_dim=4"})
                  .code,
              0);
    EXPECT_EQ(manifest(dir.path())["train"]["label_corrupted"], 1000);
}

TEST(CliSimulate, InvalidSpecExitsTwo) {
    suge::test::TempDir dir;
    const Result r = cli({"simulate", "-o", dir.path().string(), "--set", "label_noise_fraction=1.5"});
    EXPECT_EQ(r.code, 2);
    EXPECT_NE(r.err.find("label_noise_fraction"), std::string::npos) << r.err;
}

TEST(CliTrain, BaselineSmoke) {
    suge::test::TempDir out;
    const Result r = cli(quick_train(out.path(), "baseline"));
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_TRUE(fs::exists(out.path() / "report.json"));
    EXPECT_TRUE(fs::exists(out.path() / "net1.json"));
    EXPECT_NO_THROW(suge::validate_run_report_json(slurp(out.path() / "report.json")));
}

TEST(CliTrain, ConfidenceCsvsHaveOneRowPerSample) {
    suge::test::TempDir out;
    auto args = quick_train(out.path(), "suge_cotrain");
    args.push_back("--self-check");
    const Result r = cli(args);
    ASSERT_EQ(r.code, 0) << r.err;
    std::size_t files = 0;
    for (const auto& e : fs::directory_iterator(out.path() / "confidences")) {
        ++files;
        EXPECT_NO_THROW(suge::validate_confidence_csv(slurp(e.path()), 400)) << e.path();
    }
    EXPECT_EQ(files, 4u);
}

TEST(CliTrain, InvalidTauExitsTwoNamingField) {
    suge::test::TempDir out;
    auto args = quick_train(out.path(), "suge_cotrain");
    args.insert(args.end(), {"--set", "tau_label=1.5"});
    const Result r = cli(args);
    EXPECT_EQ(r.code, 2);
    EXPECT_NE(r.err.find("tau_label"), std::string::npos) << r.err;
    EXPECT_FALSE(fs::exists(out.path() / "report.json"));
}

TEST(CliTrain, ConfigFileAndFlagOverride) {
    suge::test::TempDir out;
    std::ofstream(out.path() / "run.cfg") << "# quick\nmode = baseline\nmax_epochs = 2\nwarmup_epochs = 1\n"
                                             "hidden_dims = 8\nfeat_dim = 4\n";
    const Result r = cli({"train", "-c", (out.path() / "run.cfg").string(), "-o", out.path().string(), "--train",
                          (small_data() / "train.jsonl").string(), "--set", "max_epochs=3"});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto j = nlohmann::json::parse(slurp(out.path() / "report.json"));
    EXPECT_EQ(j["mode"], "baseline");
    EXPECT_EQ(j["epochs"].size(), 3u);
}

TEST(CliTrain, UsageErrors) {
    EXPECT_EQ(cli({}).code, 2);
    EXPECT_EQ(cli({"train", "--set", "no_such_key=1"}).code, 2);
    EXPECT_EQ(cli({"train", "--train", "/nonexistent/x.jsonl"}).code, 2);
}

TEST(CliEvaluate, MatchesTrainReport) {
    suge::test::TempDir out;
    ASSERT_EQ(cli(quick_train(out.path(), "baseline")).code, 0);
    const auto report = nlohmann::json::parse(slurp(out.path() / "report.json"));
    suge::test::TempDir eval;
    const Result r = cli({"evaluate", "--checkpoint", (out.path() / "net1.json").string(), "--checkpoint",
                          (out.path() / "net2.json").string(), "--test", (small_data() / "test.jsonl").string(),
                          "-o", eval.path().string()});
    ASSERT_EQ(r.code, 0) << r.err;
    const auto e = nlohmann::json::parse(slurp(eval.path() / "eval.json"));
    EXPECT_EQ(e["ensemble_test_error"].get<double>(), report["final"]["ensemble_deg"].get<double>());
}

TEST(CliReport, SingleRunOneRow) {
    suge::test::TempDir out;
    ASSERT_EQ(cli(quick_train(out.path() / "suge", "suge_cotrain")).code, 0);
    const Result r = cli({"report", (out.path() / "suge").string(), "-o", out.path().string()});
    ASSERT_EQ(r.code, 0) << r.err;
    const std::string csv = slurp(out.path() / "comparison.csv");
    EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 2) << csv;
    EXPECT_TRUE(fs::exists(out.path() / "comparison.txt"));
}

TEST(CliReport, DeltaAgainstBaseline) {
    suge::test::TempDir out;
    ASSERT_EQ(cli(quick_train(out.path() / "base", "baseline")).code, 0);
    ASSERT_EQ(cli(quick_train(out.path() / "suge", "suge_cotrain")).code, 0);
    const Result r =
        cli({"report", (out.path() / "base").string(), (out.path() / "suge").string(), "-o", out.path().string()});
    ASSERT_EQ(r.code, 0) << r.err;
    auto err = [&](const char* run) {
        return nlohmann::json::parse(slurp(out.path() / run / "report.json"))["final"]["ensemble_deg"].get<double>();
    };
    std::istringstream csv(slurp(out.path() / "comparison.csv"));
    std::string line;
    std::getline(csv, line);
    std::getline(csv, line);
    std::getline(csv, line);
    std::vector<std::string> cells;
    std::stringstream ss(line);
    for (std::string c; std::getline(ss, c, ',');) cells.push_back(c);
    ASSERT_GE(cells.size(), 5u);
    EXPECT_NEAR(std::stod(cells[4]), err("base") - err("suge"), 1e-4);
}

TEST(CliReport, NoOracleMarksNa) {
    suge::test::TempDir data, out;
    {
        std::ifstream in(small_data() / "train.jsonl");
        std::ofstream o(data.path() / "plain.jsonl");
        for (std::string line; std::getline(in, line);) {
            auto j = nlohmann::json::parse(line);
            for (const char* k : {"clean_label", "label_corrupted", "input_corrupted"}) j.erase(k);
            o << j.dump() << '\n';
        }
    }
    ASSERT_EQ(cli({"train", "-o", (out.path() / "r").string(), "--train", (data.path() / "plain.jsonl").string(),
                   "--set", "warmup_epochs=1", "--set", "max_epochs=2", "--set", "hidden_dims=8", "--set",
                   "feat_dim=4"})
                  .code,
              0);
    const Result r = cli({"report", (out.path() / "r").string(), "-o", out.path().string()});
    ASSERT_EQ(r.code, 0) << r.err;
    EXPECT_NE(slurp(out.path() / "comparison.csv").find("n/a,n/a,n/a,n/a,n/a,n/a"), std::string::npos);
}

TEST(CliReport, MissingRunIsSkippedWithWarning) {
    suge::test::TempDir out;
    ASSERT_EQ(cli(quick_train(out.path() / "ok", "baseline")).code, 0);
    const Result r = cli({"report", (out.path() / "ok").string(), (out.path() / "gone").string(), "-o",
                          out.path().string()});
    EXPECT_EQ(r.code, 0);
    EXPECT_NE(r.err.find("warning"), std::string::npos);
    EXPECT_NE(r.err.find("gone"), std::string::npos);
    EXPECT_EQ(cli({"report", (out.path() / "gone").string()}).code, 1);
}
