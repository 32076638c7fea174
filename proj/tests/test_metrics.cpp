#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "suge/error.hpp"
#include "suge/metrics.hpp"
#include "support.hpp"

using namespace suge;

namespace {

double brute_auc(const std::vector<double>& s, const std::vector<bool>& pos) {
    double num = 0, den = 0;
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (!pos[i]) continue;
        for (std::size_t j = 0; j < s.size(); ++j) {
            if (pos[j]) continue;
            num += s[i] > s[j] ? 1.0 : (s[i] == s[j] ? 0.5 : 0.0);
            den += 1;
        }
    }
    return num / den;
}

class Constant final : public Regressor {
public:
    Constant(std::size_t dim, GazeLabel out) : dim_(dim), out_(out) {}
    std::size_t input_dim() const override { return dim_; }
    std::size_t feat_dim() const override { return 1; }
    Forward forward(std::span<const double>) const override { return {{0.0}, out_}; }
    double train_step(std::span<const TrainItem>) override { return 0; }
    void reset(std::uint64_t) override {}
    void set_learning_rate(double) override {}
    std::unique_ptr<Regressor> clone() const override { return std::make_unique<Constant>(*this); }

private:
    std::size_t dim_;
    GazeLabel out_;
};

class Oracle final : public Regressor {
public:
    explicit Oracle(const Dataset& ds) {
        for (const Sample& s : ds.samples) table_.emplace_back(s.input, s.label);
        dim_ = ds.input_dim;
    }
    std::size_t input_dim() const override { return dim_; }
    std::size_t feat_dim() const override { return 1; }
    Forward forward(std::span<const double> x) const override {
        for (const auto& [in, l] : table_)
            if (std::equal(in.begin(), in.end(), x.begin(), x.end())) return {{0.0}, l};
        throw InvalidInputError("unknown input");
    }
    double train_step(std::span<const TrainItem>) override { return 0; }
    void reset(std::uint64_t) override {}
    void set_learning_rate(double) override {}
    std::unique_ptr<Regressor> clone() const override { return std::make_unique<Oracle>(*this); }

private:
    std::size_t dim_ = 0;
    std::vector<std::pair<std::vector<double>, GazeLabel>> table_;
};

}  // namespace

TEST(Auc, Examples) {
    const std::vector<double> s{0.1, 0.4, 0.35, 0.8};
    EXPECT_DOUBLE_EQ(roc_auc(s, {false, false, true, true}), 0.75);
    EXPECT_DOUBLE_EQ(roc_auc(s, {false, true, false, true}), 1.0);
    EXPECT_DOUBLE_EQ(roc_auc(std::vector<double>{0.5, 0.5}, {true, false}), 0.5);
    EXPECT_TRUE(std::isnan(roc_auc(s, {true, true, true, true})));
}

TEST(AucProperty, MatchesPairCounting) {
    std::mt19937_64 rng(1);
    std::uniform_int_distribution<int> level(0, 9);
    std::bernoulli_distribution coin(0.3);
    for (int t = 0; t < 200; ++t) {
        const std::size_t n = 2 + t % 60;
        std::vector<double> s(n);
        std::vector<bool> pos(n);
        for (std::size_t i = 0; i < n; ++i) {
            s[i] = 0.1 * level(rng);  // many ties
            pos[i] = coin(rng);
        }
        pos[0] = true;
        pos[1] = false;
        ASSERT_NEAR(roc_auc(s, pos), brute_auc(s, pos), 1e-12);
    }
}

TEST(Detection, Arithmetic) {
    const BinaryDetection d = detection_stats({true, true, false, true, false}, {true, false, true, true, false});
    EXPECT_DOUBLE_EQ(d.precision, 2.0 / 3.0);
    EXPECT_DOUBLE_EQ(d.recall, 2.0 / 3.0);
    EXPECT_EQ(d.flagged, 3u);
    const BinaryDetection none = detection_stats({false, false}, {true, false});
    EXPECT_TRUE(std::isnan(none.precision));
    EXPECT_EQ(none.recall, 0.0);
    EXPECT_TRUE(std::isnan(detection_stats({true}, {false}).recall));
    EXPECT_THROW(detection_stats({true}, {true, false}), InvalidInputError);
}

TEST(Evaluate, PerfectPredictionsGiveZero) {
    const Dataset ds = generate_synthetic(100, 2, 6, test::no_noise(), 1);
    const Oracle o(ds);
    const Regressor* models[] = {&o, &o};
    const EvalResult r = evaluate(models, ds);
    EXPECT_LT(r.ensemble, 1e-5);
    EXPECT_LT(r.per_model[0], 1e-5);
}

TEST(Evaluate, ConstantPredictorMatchesClosedForm) {
    const Dataset ds = generate_synthetic(3000, 3, 6, test::no_noise(), 2);
    const Constant zero(6, {0, 0});
    const Regressor* models[] = {&zero};
    double expect = 0;
    for (const Sample& s : ds.samples)
        expect += std::acos(std::cos(s.label.pitch) * std::cos(s.label.yaw)) * 180.0 / std::numbers::pi;
    expect /= ds.size();
    const EvalResult r = evaluate(models, ds);
    EXPECT_NEAR(r.per_model[0], expect, 1e-9);
    EXPECT_EQ(r.ensemble, r.per_model[0]);

    // Monte Carlo estimate for labels uniform on the generator box.
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> yaw(-1, 1), pitch(-0.6, 0.6);
    double mc = 0;
    const int n = 200000;
    for (int i = 0; i < n; ++i) mc += std::acos(std::cos(pitch(rng)) * std::cos(yaw(rng)));
    mc = mc / n * 180.0 / std::numbers::pi;
    EXPECT_NEAR(r.per_model[0], mc, 1.0);
}

TEST(Evaluate, EnsembleAveragesPredictions) {
    const Dataset ds = generate_synthetic(50, 2, 6, test::no_noise(), 4);
    const Constant a(6, {0.2, 0.0}), b(6, {-0.2, 0.1});
    const Regressor* models[] = {&a, &b};
    const EvalResult r = evaluate(models, ds);
    const Constant mid(6, {0.0, 0.05});
    const Regressor* one[] = {&mid};
    EXPECT_NEAR(r.ensemble, evaluate(one, ds).per_model[0], 1e-12);
    const Regressor* parallel[] = {&a, &b};
    EXPECT_EQ(evaluate(parallel, ds, ExecPolicy{3}).ensemble, r.ensemble);
}

TEST(Evaluate, MeanAngularErrorArithmetic) {
    const std::vector<GazeLabel> p{{0, 0}, {std::numbers::pi / 2, 0}};
    const std::vector<GazeLabel> t{{0, 0}, {0, 0}};
    EXPECT_NEAR(mean_angular_error(p, t), 45.0, 1e-12);
}
