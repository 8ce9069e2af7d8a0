#pragma once

#include <algorithm>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "blacklist/belief.hpp"
#include "blacklist/core_model.hpp"

// Response policies derived from the belief-state view of the problem.
// All of them compare the value of keeping against the value of removing,
// which is always zero, and remove on ties.

namespace blacklist {

enum class LeafRule { Zero, MyopicInfinite, Optimistic };

inline std::string_view to_string(LeafRule rule) {
    switch (rule) {
        case LeafRule::Zero: return "zero";
        case LeafRule::MyopicInfinite: return "myopic";
        case LeafRule::Optimistic: return "optimistic";
    }
    return "zero";
}

inline LeafRule parse_leaf_rule(std::string_view text) {
    if (text == "zero") return LeafRule::Zero;
    if (text == "myopic") return LeafRule::MyopicInfinite;
    if (text == "optimistic") return LeafRule::Optimistic;
    throw std::invalid_argument("unknown leaf rule '" + std::string(text) + "' (expected zero|myopic|optimistic)");
}

inline constexpr int kMaxLookaheadDepth = 24;

struct LookaheadConfig {
    int depth = 4;
    LeafRule leaf = LeafRule::Zero;

    void validate() const {
        if (depth < 1 || depth > kMaxLookaheadDepth) {
            throw std::invalid_argument("lookahead depth must lie in [1, " + std::to_string(kMaxLookaheadDepth) + "]");
        }
    }
};

struct DecisionTrace {
    Decision decision;
    double value_keep;
    double value_remove = 0.0;
    double posterior_malicious;
};

inline DecisionTrace make_trace(double value_keep, double posterior_malicious) {
    return {value_keep > 0.0 ? Decision::Keep : Decision::Remove, value_keep, 0.0, posterior_malicious};
}

// -- myopic ------------------------------------------------------------------

inline DecisionTrace myopic_trace(double posterior_malicious, const EnvParams& env) {
    return make_trace(expected_keep_gain(1.0 - posterior_malicious, posterior_malicious, env), posterior_malicious);
}

inline DecisionTrace myopic_trace(const BeliefState& belief, const EnvParams& env) {
    return make_trace(expected_keep_gain(belief, env), belief.posterior_malicious());
}

inline Decision myopic_decide(const BeliefState& belief, const EnvParams& env) {
    return myopic_trace(belief, env).decision;
}

// -- optimistic ----------------------------------------------------------------

/// Upper bound on the keep value: an honest node is kept for 1/lambda steps,
/// a malicious one is caught after a single step.
inline double optimistic_keep_value(double posterior_honest, double posterior_malicious, const EnvParams& env) {
    if (!(env.departure_rate > 0.0)) throw std::invalid_argument("optimistic: departure rate must be positive");
    return posterior_honest * env.gain_honest / env.departure_rate - posterior_malicious * env.loss_malicious;
}

inline DecisionTrace optimistic_trace(double posterior_malicious, const EnvParams& env) {
    return make_trace(optimistic_keep_value(1.0 - posterior_malicious, posterior_malicious, env), posterior_malicious);
}

inline DecisionTrace optimistic_trace(const BeliefState& belief, const EnvParams& env) {
    return make_trace(optimistic_keep_value(belief.posterior_honest(), belief.posterior_malicious(), env),
                      belief.posterior_malicious());
}

inline Decision optimistic_decide(const BeliefState& belief, const EnvParams& env) {
    return optimistic_trace(belief, env).decision;
}

// -- finite lookahead ----------------------------------------------------------

/// Value assigned at the truncation frontier.
inline double leaf_value(const TypePosterior& post, const EnvParams& env, LeafRule rule) {
    switch (rule) {
        case LeafRule::Zero: return 0.0;
        case LeafRule::MyopicInfinite:
            return std::max(0.0, expected_keep_gain(post.honest, post.malicious, env)) / env.departure_rate;
        case LeafRule::Optimistic:
            return std::max(0.0, optimistic_keep_value(post.honest, post.malicious, env));
    }
    return 0.0;
}

namespace detail {

/// Backward induction over the sufficient statistic (extra ones j, extra steps d).
/// Returns the keep value at the root, i.e. before the max with the stop value.
inline double lookahead_keep_value(const BeliefState& belief, const EnvParams& env, const LookaheadConfig& cfg) {
    cfg.validate();
    const auto depth = static_cast<std::size_t>(cfg.depth);
    const BernoulliModel& model = belief.model();
    const double u = model.honest_mean();
    const double q = model.malicious_mean();

    // States with zero likelihood are never reached (their branch probability is
    // exactly zero), so any finite value works for them.
    std::vector<double> next(depth + 1, 0.0);
    std::vector<double> cur(depth + 1, 0.0);
    for (std::size_t j = 0; j <= depth; ++j) {
        auto post = try_posterior_pair(belief.ones() + j, belief.count() + depth, model, belief.prior_malicious());
        next[j] = post ? leaf_value(*post, env, cfg.leaf) : 0.0;
    }
    double root_keep = 0.0;
    for (std::size_t d = depth; d-- > 0;) {
        for (std::size_t j = 0; j <= d; ++j) {
            auto post = try_posterior_pair(belief.ones() + j, belief.count() + d, model, belief.prior_malicious());
            if (!post) {
                cur[j] = 0.0;
                continue;
            }
            const double p_one = u * post->honest + q * post->malicious;
            const double keep = expected_keep_gain(post->honest, post->malicious, env) + p_one * next[j + 1] +
                                (1.0 - p_one) * next[j];
            if (d == 0) root_keep = keep;
            cur[j] = std::max(0.0, keep);
        }
        std::swap(cur, next);
    }
    return root_keep;
}

}  // namespace detail

inline double lookahead_value(const BeliefState& belief, const EnvParams& env, const LookaheadConfig& cfg) {
    return std::max(0.0, detail::lookahead_keep_value(belief, env, cfg));
}

inline DecisionTrace lookahead_trace(const BeliefState& belief, const EnvParams& env, const LookaheadConfig& cfg) {
    return make_trace(detail::lookahead_keep_value(belief, env, cfg), belief.posterior_malicious());
}

inline Decision lookahead_decide(const BeliefState& belief, const EnvParams& env, const LookaheadConfig& cfg) {
    return lookahead_trace(belief, env, cfg).decision;
}

}  // namespace blacklist
