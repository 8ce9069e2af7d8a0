#include <gtest/gtest.h>

#include <algorithm>
#include <random>
#include <vector>

#include "blacklist/belief.hpp"
#include "support/oracles.hpp"

using namespace blacklist;
using blacklist::testing::direct_batch_posterior;
using blacklist::testing::direct_posterior;

namespace {

BeliefState feed(BeliefState b, const std::vector<int>& xs) {
    for (int x : xs) b = b.updated(x);
    return b;
}

}  // namespace

TEST(Posterior, Examples) {
    const BernoulliModel model(0.8, 0.3);
    // one "1": 0.5*0.3 / (0.5*0.3 + 0.5*0.8) = 3/11
    EXPECT_NEAR(posterior(1, 1, model, 0.5), 3.0 / 11.0, 1e-15);
    // one "0": 0.7 / (0.7 + 0.2) = 7/9
    EXPECT_NEAR(posterior(0, 1, model, 0.5), 7.0 / 9.0, 1e-15);
    EXPECT_DOUBLE_EQ(posterior(0, 0, model, 0.37), 0.37);
}

TEST(Posterior, DegenerateModels) {
    // q = 0: a single 1 rules out malicious
    EXPECT_DOUBLE_EQ(posterior(1, 3, BernoulliModel(0.5, 0.0), 0.9), 0.0);
    // u = 1: a single 0 rules out honest
    EXPECT_DOUBLE_EQ(posterior(2, 3, BernoulliModel(1.0, 0.5), 0.1), 1.0);
    // u = q: evidence carries no information
    EXPECT_NEAR(posterior(17, 40, BernoulliModel(0.4, 0.4), 0.23), 0.23, 1e-15);
}

TEST(Posterior, ImpossibleEvidenceThrows) {
    const BernoulliModel model(1.0, 1.0);
    EXPECT_THROW(posterior(2, 3, model, 0.5), ImpossibleEvidence);
    EXPECT_FALSE(try_posterior_pair(2, 3, model, 0.5).has_value());
    EXPECT_THROW(posterior(0, 1, BernoulliModel(0.5, 0.5), 1.5), std::invalid_argument);
    EXPECT_THROW(posterior(4, 3, model, 0.5), std::invalid_argument);
}

TEST(Posterior, ExtremePriorsAreAbsorbing) {
    const BernoulliModel model(0.8, 0.3);
    BeliefState zero(model, 0.0), one(model, 1.0);
    std::mt19937_64 rng(2);
    for (int t = 0; t < 200; ++t) {
        const int x = static_cast<int>(rng() & 1u);
        zero = zero.updated(x);
        one = one.updated(x);
        EXPECT_EQ(zero.posterior_malicious(), 0.0);
        EXPECT_EQ(one.posterior_malicious(), 1.0);
    }
}

TEST(Posterior, StaysFiniteForLongSequences) {
    const BernoulliModel model(0.9, 0.1);
    const auto post = posterior_pair(5000, 10000, model, 0.5);
    EXPECT_NEAR(post.malicious, 0.5, 1e-12);  // symmetric model, balanced counts
    const auto skewed = posterior_pair(9000, 10000, model, 0.5);
    EXPECT_EQ(skewed.malicious, 0.0);
    EXPECT_EQ(skewed.honest, 1.0);
}

TEST(BeliefState, RejectsNonBinaryObservations) {
    BeliefState b(BernoulliModel(0.8, 0.3), 0.5);
    EXPECT_THROW((void)b.updated(2), std::invalid_argument);
    EXPECT_THROW((void)b.updated(Observation(0.5)), std::invalid_argument);
    EXPECT_NO_THROW((void)b.updated(Observation(1.0)));
}

TEST(Predictive, MixesTheTwoMeans) {
    const BeliefState b(BernoulliModel(0.8, 0.3), 0.25);
    EXPECT_NEAR(predictive(b), 0.75 * 0.8 + 0.25 * 0.3, 1e-15);
}

// Property tests against the direct-space oracle.
TEST(PosteriorProperties, MatchesSequentialDirectBayes) {
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (int i = 0; i < 2000; ++i) {
        const double u = 0.02 + 0.96 * unit(rng), q = 0.02 + 0.96 * unit(rng), prior = unit(rng);
        const int t = 1 + static_cast<int>(rng() % 60);
        std::vector<int> xs(t);
        for (int& x : xs) x = unit(rng) < 0.5 ? 1 : 0;
        const BeliefState b = feed(BeliefState(BernoulliModel(u, q), prior), xs);
        const double oracle = direct_posterior(xs, u, q, prior);
        EXPECT_NEAR(b.posterior_malicious(), oracle, 1e-9);
        EXPECT_NEAR(b.posterior_malicious() + b.posterior_honest(), 1.0, 1e-12);
        EXPECT_GE(b.posterior_malicious(), 0.0);
        EXPECT_LE(b.posterior_malicious(), 1.0);

        const auto k = static_cast<std::uint64_t>(std::count(xs.begin(), xs.end(), 1));
        EXPECT_NEAR(b.posterior_malicious(), direct_batch_posterior(k, xs.size(), u, q, prior), 1e-9);
        EXPECT_NEAR(b.posterior_malicious(), posterior(k, xs.size(), BernoulliModel(u, q), prior), 1e-15);
    }
}

TEST(PosteriorProperties, OrderInvariant) {
    std::mt19937_64 rng(23);
    const BernoulliModel model(0.7, 0.35);
    for (int i = 0; i < 500; ++i) {
        std::vector<int> xs(30);
        for (int& x : xs) x = static_cast<int>(rng() & 1u);
        const double base = feed(BeliefState(model, 0.4), xs).posterior_malicious();
        std::shuffle(xs.begin(), xs.end(), rng);
        EXPECT_EQ(feed(BeliefState(model, 0.4), xs).posterior_malicious(), base);
    }
}

TEST(PosteriorProperties, MonotoneInOnesWhenHonestMeanIsHigher) {
    // u > q: more ones means less likely malicious
    const BernoulliModel model(0.8, 0.3);
    for (std::uint64_t t : {5u, 20u, 80u}) {
        double prev = 2.0;
        for (std::uint64_t k = 0; k <= t; ++k) {
            const double p = posterior(k, t, model, 0.5);
            EXPECT_LE(p, prev);
            prev = p;
        }
    }
    // u < q: the direction flips
    const BernoulliModel flipped(0.2, 0.6);
    double prev = -1.0;
    for (std::uint64_t k = 0; k <= 30; ++k) {
        const double p = posterior(k, 30, flipped, 0.5);
        EXPECT_GE(p, prev);
        prev = p;
    }
}

TEST(PosteriorProperties, AdvancedEqualsStepwise) {
    const BeliefState b(BernoulliModel(0.6, 0.45), 0.3);
    const auto stepwise = feed(b, {1, 0, 0, 1, 1});
    const auto jumped = b.advanced(3, 5);
    EXPECT_EQ(stepwise.ones(), jumped.ones());
    EXPECT_EQ(stepwise.count(), jumped.count());
    EXPECT_EQ(stepwise.posterior_malicious(), jumped.posterior_malicious());
}
