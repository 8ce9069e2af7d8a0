#pragma once

#include <charconv>
#include <limits>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>

#include "blacklist/belief.hpp"
#include "blacklist/core_model.hpp"
#include "blacklist/hiper.hpp"
#include "blacklist/policies.hpp"

// Stateful per-node wrappers around the decision rules. A responder is owned by
// exactly one node and sees that node's observations in order.

namespace blacklist {

struct HiperPolicy {
    std::optional<double> delta;  // empty: use optimal_delta()
};
struct MyopicPolicy {};
struct OptimisticPolicy {};
struct LookaheadPolicy {
    LookaheadConfig config;
};
/// Knows the node type; only meaningful in simulation.
struct OraclePolicy {};

using PolicySpec = std::variant<HiperPolicy, MyopicPolicy, OptimisticPolicy, LookaheadPolicy, OraclePolicy>;

inline std::string policy_id(const PolicySpec& spec) {
    struct Visitor {
        std::string operator()(const HiperPolicy& p) const {
            if (!p.delta) return "hiper-star";
            std::ostringstream os;
            os << "hiper-" << *p.delta;
            return os.str();
        }
        std::string operator()(const MyopicPolicy&) const { return "myopic"; }
        std::string operator()(const OptimisticPolicy&) const { return "optimistic"; }
        std::string operator()(const LookaheadPolicy& p) const {
            std::string id = "lookahead-" + std::to_string(p.config.depth);
            if (p.config.leaf != LeafRule::Zero) id += "-" + std::string(to_string(p.config.leaf));
            return id;
        }
        std::string operator()(const OraclePolicy&) const { return "oracle"; }
    };
    return std::visit(Visitor{}, spec);
}

/// Inverse of policy_id(): hiper-star, hiper-0.9, myopic, optimistic,
/// lookahead-8, lookahead-8-optimistic, oracle.
inline PolicySpec parse_policy(std::string_view text) {
    auto fail = [&] { return std::invalid_argument("unknown policy '" + std::string(text) + "'"); };
    if (text == "myopic") return MyopicPolicy{};
    if (text == "optimistic") return OptimisticPolicy{};
    if (text == "oracle") return OraclePolicy{};
    if (text == "hiper-star" || text == "hiper") return HiperPolicy{};
    if (text.starts_with("hiper-")) {
        const std::string rest(text.substr(6));
        std::size_t used = 0;
        double delta = 0.0;
        try {
            delta = std::stod(rest, &used);
        } catch (const std::exception&) {
            throw fail();
        }
        if (used != rest.size() || !(delta > 0.0 && delta < 1.0)) throw fail();
        return HiperPolicy{delta};
    }
    if (text.starts_with("lookahead-")) {
        std::string_view rest = text.substr(10);
        const auto dash = rest.find('-');
        const std::string_view depth_text = rest.substr(0, dash);
        LookaheadConfig cfg;
        auto [ptr, ec] = std::from_chars(depth_text.data(), depth_text.data() + depth_text.size(), cfg.depth);
        if (ec != std::errc() || ptr != depth_text.data() + depth_text.size()) throw fail();
        if (dash != std::string_view::npos) cfg.leaf = parse_leaf_rule(rest.substr(dash + 1));
        cfg.validate();
        return LookaheadPolicy{cfg};
    }
    throw fail();
}

class HiperResponder {
public:
    explicit HiperResponder(hiper::HiperParams params) : params_(params) {}

    Decision initial() const { return Decision::Keep; }
    Decision observe(Observation x) {
        stat_ = stat_.updated(x);
        return hiper::decide(stat_, params_);
    }
    /// Running mean, or NaN before the first sample.
    double statistic() const {
        return stat_.count() == 0 ? std::numeric_limits<double>::quiet_NaN() : stat_.mean();
    }
    const hiper::HiperParams& params() const { return params_; }

private:
    hiper::HiperParams params_;
    hiper::RunningStat stat_;
};

class BayesianResponder {
public:
    using Rule = std::variant<MyopicPolicy, OptimisticPolicy, LookaheadPolicy>;

    BayesianResponder(Rule rule, const EnvParams& env)
        : rule_(rule), env_(env), belief_(BernoulliModel(env.u, env.q), env.prior_malicious) {}

    Decision initial() const { return Decision::Keep; }
    Decision observe(Observation x) {
        belief_ = belief_.updated(x);
        return current().decision;
    }
    double statistic() const { return belief_.posterior_malicious(); }
    const BeliefState& belief() const { return belief_; }

    DecisionTrace current() const {
        struct Visitor {
            const BeliefState& belief;
            const EnvParams& env;
            DecisionTrace operator()(const MyopicPolicy&) const { return myopic_trace(belief, env); }
            DecisionTrace operator()(const OptimisticPolicy&) const { return optimistic_trace(belief, env); }
            DecisionTrace operator()(const LookaheadPolicy& p) const { return lookahead_trace(belief, env, p.config); }
        };
        return std::visit(Visitor{belief_, env_}, rule_);
    }

private:
    Rule rule_;
    EnvParams env_;
    BeliefState belief_;
};

class OracleResponder {
public:
    explicit OracleResponder(NodeType type) : type_(type) {}

    Decision initial() const { return type_ == NodeType::Malicious ? Decision::Remove : Decision::Keep; }
    Decision observe(Observation) { return initial(); }
    double statistic() const { return type_ == NodeType::Malicious ? 1.0 : 0.0; }

private:
    NodeType type_;
};

using Responder = std::variant<HiperResponder, BayesianResponder, OracleResponder>;

inline Decision initial_decision(const Responder& r) {
    return std::visit([](const auto& x) { return x.initial(); }, r);
}
inline Decision observe(Responder& r, Observation x) {
    return std::visit([x](auto& v) { return v.observe(x); }, r);
}
inline double statistic(const Responder& r) {
    return std::visit([](const auto& x) { return x.statistic(); }, r);
}

/// Confidence level a HIPER policy runs with in a given environment.
inline hiper::DeltaChoice hiper_delta(const HiperPolicy& policy, const EnvParams& env) {
    if (policy.delta) return {*policy.delta, false};
    return hiper::optimal_delta(env.loss_malicious, env.gain_honest, env.departure_rate, env.gap());
}

/// Builds a fresh responder with full knowledge of the environment parameters.
/// `type` is consulted only by the oracle.
inline Responder make_responder(const PolicySpec& spec, const EnvParams& env, NodeType type) {
    struct Visitor {
        const EnvParams& env;
        NodeType type;
        Responder operator()(const HiperPolicy& p) const {
            return HiperResponder(hiper::HiperParams(hiper_delta(p, env).delta, env.gap(), env.q));
        }
        Responder operator()(const MyopicPolicy& p) const { return BayesianResponder(p, env); }
        Responder operator()(const OptimisticPolicy& p) const { return BayesianResponder(p, env); }
        Responder operator()(const LookaheadPolicy& p) const {
            p.config.validate();
            return BayesianResponder(p, env);
        }
        Responder operator()(const OraclePolicy&) const { return OracleResponder(type); }
    };
    return std::visit(Visitor{env, type}, spec);
}

}  // namespace blacklist
