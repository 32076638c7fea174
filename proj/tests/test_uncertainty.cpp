#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "suge/error.hpp"
#include "suge/uncertainty.hpp"
#include "support.hpp"

using namespace suge;
using std::numbers::pi;

namespace {

std::vector<double> two_cluster_sample(std::size_t n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::bernoulli_distribution pick(0.1);
    std::normal_distribution<double> a(1.0, 0.5), b(20.0, 2.0);
    std::vector<double> v(n);
    for (double& x : v) x = pick(rng) ? b(rng) : a(rng);
    return v;
}

}  // namespace

TEST(Triplet, Examples) {
    EXPECT_EQ(triplet_distances({0.1, 0.2}, {0.1, 0.2}, {0.1, 0.2}), (TripletDistances{0, 0, 0}));
    const TripletDistances d = triplet_distances({0, 0}, {pi / 2, 0}, {0, 0});
    EXPECT_NEAR(d.d_pg, 90.0, 1e-12);
    EXPECT_NEAR(d.d_pn, 90.0, 1e-12);
    EXPECT_EQ(d.d_ng, 0.0);
}

TEST(Triplet, SwappingPseudoAndNeighboring) {
    std::mt19937_64 rng(1);
    for (int t = 0; t < 100; ++t) {
        const GazeLabel y = test::random_label(rng), p = test::random_label(rng), n = test::random_label(rng);
        const TripletDistances a = triplet_distances(y, p, n), b = triplet_distances(y, n, p);
        ASSERT_EQ(a.d_pg, b.d_ng);
        ASSERT_EQ(a.d_ng, b.d_pg);
        ASSERT_EQ(a.d_pn, b.d_pn);
    }
}

TEST(Metrics, TupleExamples) {
    EXPECT_DOUBLE_EQ(tuple_md({2, 1, 4}, 1.0), 1.0);
    EXPECT_EQ(tuple_md({0, 3, 5}, 1.0), 0.0);
    EXPECT_EQ(tuple_md({0, 0, 0}, 1.0), 0.0);
    EXPECT_THROW(tuple_md({1, 1, 1}, 0.0), InvalidInputError);
}

TEST(Metrics, TripleExamples) {
    EXPECT_EQ(triple_md({2, 1, 4}), 1.0);
    EXPECT_EQ(triple_md({0, 5, 6}), 0.0);
    EXPECT_EQ(triple_md({5, 0, 6}), 0.0);
    EXPECT_EQ(triple_md({5, 6, 0}), 0.0);
    EXPECT_EQ(triple_md({10, 10, 10}), 10.0);
}

TEST(MetricsProperty, MatchSecondImplementation) {
    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> u(0.0, 180.0), e(0.01, 5.0);
    for (int t = 0; t < 10000; ++t) {
        const double pg = u(rng), pn = u(rng), ng = u(rng), eps = e(rng);
        const double tuple_ref = (pg < ng ? pg : ng) / (pn + eps);
        double triple_ref = pg;
        if (pn < triple_ref) triple_ref = pn;
        if (ng < triple_ref) triple_ref = ng;
        ASSERT_EQ(tuple_md({pg, pn, ng}, eps), tuple_ref);
        ASSERT_EQ(triple_md({pg, pn, ng}), triple_ref);
    }
}

TEST(Gmm, RecoversMixture) {
    const GmmFit fit = fit_gmm_1d(two_cluster_sample(2000, 3));
    const std::size_t r = fit.reliable_component, o = 1 - r;
    EXPECT_NEAR(fit.means[r], 1.0, 0.5);
    EXPECT_NEAR(fit.means[o], 20.0, 1.5);
    EXPECT_NEAR(fit.mixing[r], 0.9, 0.05);
    EXPECT_NEAR(fit.mixing[o], 0.1, 0.05);
    EXPECT_TRUE(fit.converged);
    EXPECT_TRUE(fit.separated);
}

TEST(Gmm, SeparableEqualClusters) {
    std::vector<double> v(200, 0.0);
    std::fill(v.begin() + 100, v.end(), 10.0);
    const GmmFit fit = fit_gmm_1d(v);
    const std::size_t r = fit.reliable_component;
    EXPECT_NEAR(fit.means[r], 0.0, 1e-6);
    EXPECT_NEAR(fit.means[1 - r], 10.0, 1e-6);
    EXPECT_NEAR(fit.mixing[0], 0.5, 1e-6);
}

TEST(Gmm, ReliableIsSmallerMean) {
    for (std::uint64_t s = 0; s < 20; ++s) {
        std::vector<double> v = two_cluster_sample(300, s);
        for (double& x : v) x = 25 - x;
        const GmmFit fit = fit_gmm_1d(v);
        ASSERT_LE(fit.means[fit.reliable_component], fit.means[1 - fit.reliable_component]);
    }
}

TEST(Gmm, DegenerateInputThrows) {
    EXPECT_THROW(fit_gmm_1d(std::vector<double>(50, 3.0)), DegenerateFitError);
    EXPECT_THROW(fit_gmm_1d(std::vector<double>{1.0}), DegenerateFitError);
    EXPECT_THROW(fit_gmm_1d(std::vector<double>{1.0, NAN}), InvalidInputError);
}

TEST(Gmm, IdenticalComponentsGiveHalf) {
    GmmFit fit;
    fit.means = {2.0, 2.0};
    fit.variances = {1.5, 1.5};
    fit.mixing = {0.5, 0.5};
    for (double x : {-100.0, 0.0, 2.0, 7.5, 1e6}) EXPECT_DOUBLE_EQ(posterior_reliable(fit, x), 0.5);
}

TEST(Gmm, WellSeparatedPosteriorAtMean) {
    GmmFit fit;
    fit.means = {1.0, 13.0};
    fit.variances = {1.0, 1.0};
    fit.mixing = {0.5, 0.5};
    fit.reliable_component = 0;
    const double p = posterior_reliable(fit, 1.0);
    const double d0 = std::exp(-0.0), d1 = std::exp(-0.5 * 144.0);
    EXPECT_GT(p, 0.99);
    EXPECT_NEAR(p, d0 / (d0 + d1), 1e-15);
}

TEST(GmmProperty, PosteriorMonotoneForEqualVariances) {
    GmmFit fit;
    fit.means = {1.0, 6.0};
    fit.variances = {2.0, 2.0};
    fit.mixing = {0.3, 0.7};
    double prev = 1.0;
    for (double x = -20; x <= 30; x += 0.05) {
        const double p = posterior_reliable(fit, x);
        ASSERT_LE(p, prev);
        prev = p;
    }
}

TEST(GmmProperty, PosteriorsSumToOne) {
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> u(-50, 50), v(0.01, 30), m(0.01, 0.99);
    for (int t = 0; t < 1000; ++t) {
        GmmFit fit;
        fit.means = {u(rng), u(rng)};
        fit.variances = {v(rng), v(rng)};
        const double w = m(rng);
        fit.mixing = {w, 1 - w};
        for (int k = 0; k < 10; ++k) {
            const auto post = gmm_posteriors(fit, 3 * u(rng));
            ASSERT_NEAR(post[0] + post[1], 1.0, 1e-12);
        }
    }
}

TEST(GmmProperty, LogLikelihoodNondecreasing) {
    for (std::uint64_t s = 0; s < 30; ++s) {
        std::mt19937_64 rng(s);
        std::vector<double> v = two_cluster_sample(500 + 50 * s, s);
        std::exponential_distribution<double> ex(0.3);
        if (s % 2) for (double& x : v) x += ex(rng);
        const GmmFit fit = fit_gmm_1d(v);
        ASSERT_GE(fit.log_likelihood_trace.size(), 2u);
        for (std::size_t i = 1; i < fit.log_likelihood_trace.size(); ++i) {
            ASSERT_GE(fit.log_likelihood_trace[i], fit.log_likelihood_trace[i - 1] - 1e-10) << "seed " << s;
        }
    }
}

TEST(GmmProperty, PermutationInvariant) {
    std::mt19937_64 rng(5);
    for (int t = 0; t < 10; ++t) {
        std::vector<double> v = two_cluster_sample(400, 100 + t);
        const GmmFit a = fit_gmm_1d(v);
        std::shuffle(v.begin(), v.end(), rng);
        const GmmFit b = fit_gmm_1d(v);
        const std::size_t ra = a.reliable_component, rb = b.reliable_component;
        ASSERT_EQ(a.means[ra], b.means[rb]);
        ASSERT_EQ(a.means[1 - ra], b.means[1 - rb]);
        ASSERT_EQ(a.variances[ra], b.variances[rb]);
        ASSERT_EQ(a.mixing[ra], b.mixing[rb]);
    }
}

TEST(Confidences, DegenerateMetricGivesOne) {
    const std::vector<double> flat(100, 0.7);
    const std::vector<double> split = two_cluster_sample(100, 6);
    const ConfidenceEstimate est = estimate_confidences(flat, split);
    EXPECT_TRUE(est.label_degenerate);
    EXPECT_FALSE(est.image_degenerate);
    for (const ConfidencePair& p : est.pairs) EXPECT_EQ(p.label_confidence, 1.0);
    EXPECT_FALSE(est.label_fit.has_value());
}

TEST(Confidences, OutliersGetLowConfidence) {
    const std::vector<double> v = two_cluster_sample(1000, 7);
    const ConfidenceEstimate est = estimate_confidences(v, v);
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (v[i] > 15) ASSERT_LT(est.pairs[i].label_confidence, 0.01);
        if (v[i] < 2) ASSERT_GT(est.pairs[i].image_confidence, 0.99);
    }
}

TEST(Confidences, ParallelMatchesSerial) {
    const std::vector<double> a = two_cluster_sample(5000, 8), b = two_cluster_sample(5000, 9);
    const auto s = estimate_confidences(a, b, {}, ExecPolicy::serial());
    const auto p = estimate_confidences(a, b, {}, ExecPolicy{4});
    EXPECT_EQ(s.pairs, p.pairs);
}
