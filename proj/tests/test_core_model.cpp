#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <random>

#include "blacklist/core_model.hpp"

using namespace blacklist;

namespace {

EnvParams env_with(double gain, double loss) {
    EnvParams env;
    env.gain_honest = gain;
    env.loss_malicious = loss;
    return env;
}

}  // namespace

TEST(RealizedGain, MaliciousPaysPerStepUntilRemoval) {
    EXPECT_DOUBLE_EQ(realized_gain(NodeType::Malicious, StepCount::never(), StepCount::at(3), env_with(1, 1)), -3.0);
}

TEST(RealizedGain, HonestEarnsUntilEarlierOfDepartureAndRemoval) {
    const auto env = env_with(0.5, 1);
    EXPECT_DOUBLE_EQ(realized_gain(NodeType::Honest, StepCount::at(10), StepCount::never(), env), 5.0);
    EXPECT_DOUBLE_EQ(realized_gain(NodeType::Honest, StepCount::at(10), StepCount::at(4), env), 2.0);
    EXPECT_TRUE(std::isinf(realized_gain(NodeType::Honest, StepCount::never(), StepCount::never(), env)));
}

TEST(RealizedGain, RejectsUncappedMaliciousRemoval) {
    EXPECT_THROW(realized_gain(NodeType::Malicious, StepCount::at(5), StepCount::never(), env_with(1, 1)),
                 std::domain_error);
}

TEST(OracleGain, Examples) {
    EXPECT_DOUBLE_EQ(oracle_gain(NodeType::Malicious, StepCount::at(100), env_with(3, 7)), 0.0);
    EXPECT_DOUBLE_EQ(oracle_gain(NodeType::Honest, StepCount::at(7), env_with(1, 1)), 7.0);
    EXPECT_DOUBLE_EQ(oracle_gain(NodeType::Honest, StepCount::at(0), env_with(2, 1)), 0.0);
}

TEST(RealizedLoss, Examples) {
    EXPECT_DOUBLE_EQ(realized_loss(NodeType::Malicious, StepCount::never().capped(50), StepCount::at(5), env_with(1, 1)),
                     5.0);
    EXPECT_DOUBLE_EQ(realized_loss(NodeType::Honest, StepCount::at(10), StepCount::never().capped(10), env_with(1, 1)),
                     0.0);
    EXPECT_DOUBLE_EQ(realized_loss(NodeType::Honest, StepCount::at(10), StepCount::at(4), env_with(0.5, 1)), 3.0);
}

TEST(RealizedLoss, RequiresCappedTimes) {
    EXPECT_THROW(realized_loss(NodeType::Honest, StepCount::never(), StepCount::at(3), env_with(1, 1)),
                 std::domain_error);
    EXPECT_THROW(realized_loss(NodeType::Malicious, StepCount::at(3), StepCount::never(), env_with(1, 1)),
                 std::domain_error);
}

TEST(WorstCaseLoss, IsMaxAndRejectsNegatives) {
    EXPECT_DOUBLE_EQ(worst_case_loss(3.0, 5.0), 5.0);
    EXPECT_DOUBLE_EQ(worst_case_loss(0.0, 0.0), 0.0);
    EXPECT_DOUBLE_EQ(worst_case_loss(833.3, 100.0), 833.3);
    EXPECT_THROW(worst_case_loss(-1.0, 0.0), std::invalid_argument);
}

TEST(StepCount, CappingTurnsNeverIntoHorizon) {
    EXPECT_EQ(StepCount::never().capped(40), StepCount::at(40));
    EXPECT_EQ(StepCount::at(70).capped(40), StepCount::at(40));
    EXPECT_EQ(StepCount::at(7).capped(40), StepCount::at(7));
    EXPECT_THROW(StepCount::never().value(), std::logic_error);
}

TEST(Observation, BoundsAndBinaryFlag) {
    EXPECT_TRUE(Observation(1.0).is_binary());
    EXPECT_TRUE(Observation(0.0).is_binary());
    EXPECT_FALSE(Observation(0.4).is_binary());
    EXPECT_THROW(Observation(1.5), std::invalid_argument);
    EXPECT_THROW(Observation(-0.1), std::invalid_argument);
    EXPECT_THROW(Observation(std::numeric_limits<double>::quiet_NaN()), std::invalid_argument);
}

TEST(EnvParams, ValidationAndDerivedGap) {
    EnvParams env;
    env.u = 0.8;
    env.q = 0.3;
    EXPECT_NEAR(env.gap(), 0.5, 1e-15);
    env.departure_rate = 0.0;
    EXPECT_THROW(env.validate(), std::invalid_argument);
    env.departure_rate = 0.25;
    EXPECT_NO_THROW(env.validate());
    EXPECT_DOUBLE_EQ(env.expected_departure(), 4.0);
}

// Randomised properties of the loss accounting.
TEST(LossProperties, NonnegativeAndMatchesPerStepBookkeeping) {
    std::mt19937_64 rng(11);
    std::uniform_int_distribution<std::uint64_t> steps(0, 200);
    std::uniform_real_distribution<double> rate(0.0, 3.0);
    for (int i = 0; i < 5000; ++i) {
        const auto env = env_with(rate(rng), rate(rng));
        const std::uint64_t horizon = steps(rng) + 1;
        const std::uint64_t h = std::min(steps(rng), horizon);
        const std::uint64_t n = std::min(steps(rng), horizon);
        for (NodeType type : {NodeType::Honest, NodeType::Malicious}) {
            const double loss = realized_loss(type, StepCount::at(h), StepCount::at(n), env);
            EXPECT_GE(loss, 0.0);

            // step-by-step: +g_U per honest step present, -l_Q per malicious step present
            double gain = 0.0;
            for (std::uint64_t s = 1; s <= horizon; ++s) {
                const bool present = s <= n && (type == NodeType::Malicious || s <= h);
                if (present) gain += type == NodeType::Honest ? env.gain_honest : -env.loss_malicious;
            }
            EXPECT_NEAR(gain, realized_gain(type, StepCount::at(h), StepCount::at(n), env), 1e-9);

            if (type == NodeType::Honest && n >= h) {
                EXPECT_DOUBLE_EQ(loss, 0.0);
            }
            if (type == NodeType::Malicious) {
                EXPECT_NEAR(loss, static_cast<double>(n) * env.loss_malicious, 1e-12);
                EXPECT_LE(loss, realized_loss(type, StepCount::at(h), StepCount::at(n + 1), env));
            }
        }
        const double a = rate(rng), b = rate(rng);
        EXPECT_EQ(worst_case_loss(a, b), worst_case_loss(b, a));
        EXPECT_EQ(worst_case_loss(a, a), a);
    }
}
