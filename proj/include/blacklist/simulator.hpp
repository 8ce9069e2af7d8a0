#pragma once

#include <concepts>
#include <cstdint>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "blacklist/core_model.hpp"
#include "blacklist/responders.hpp"
#include "blacklist/rng.hpp"

namespace blacklist {

enum class Suite { Fig1, Fig2, Fig3 };

inline std::string_view to_string(Suite suite) {
    switch (suite) {
        case Suite::Fig1: return "fig1";
        case Suite::Fig2: return "fig2";
        case Suite::Fig3: return "fig3";
    }
    return "fig1";
}

inline Suite parse_suite(std::string_view text) {
    if (text == "fig1" || text == "Fig1") return Suite::Fig1;
    if (text == "fig2" || text == "Fig2") return Suite::Fig2;
    if (text == "fig3" || text == "Fig3") return Suite::Fig3;
    throw std::invalid_argument("unknown suite '" + std::string(text) + "' (expected fig1|fig2|fig3)");
}

/// One sampled world: horizon, parameters, population size and the seed from
/// which every node stream is derived.
struct ExperimentDraw {
    std::uint64_t horizon = 1;
    EnvParams env;
    std::uint32_t n_nodes = 100;
    std::uint64_t seed = 0;

    void validate() const {
        if (horizon < 1) throw std::invalid_argument("ExperimentDraw: horizon must be >= 1");
        if (n_nodes < 1) throw std::invalid_argument("ExperimentDraw: need at least one node");
        env.validate();
    }
};

inline constexpr std::uint32_t kNodesPerExperiment = 100;

/// Samples a world for one of the three experiment suites. The departure rate
/// is tied to the horizon (lambda = 1/H) and l_Q is fixed to 1.
inline ExperimentDraw sample_experiment(Rng& rng, Suite suite) {
    ExperimentDraw draw;
    const std::uint64_t h_lo = suite == Suite::Fig3 ? 1 : 10;
    const std::uint64_t h_hi = suite == Suite::Fig3 ? 100 : 1000;
    draw.horizon = std::uniform_int_distribution<std::uint64_t>(h_lo, h_hi)(rng);
    draw.env.u = uniform01(rng);
    draw.env.q = uniform01(rng);
    const double gain_hi = suite == Suite::Fig1 ? 1.0 : 2.0;
    draw.env.gain_honest = gain_hi * uniform01(rng);
    draw.env.loss_malicious = 1.0;
    draw.env.prior_malicious = sample_beta(rng, 2.0, 2.0);
    draw.env.departure_rate = 1.0 / static_cast<double>(draw.horizon);
    draw.n_nodes = kNodesPerExperiment;
    draw.seed = rng();
    return draw;
}

struct NodeRecord {
    std::uint32_t node_id = 0;
    NodeType type = NodeType::Honest;
    StepCount removal = StepCount::never();
    StepCount departure = StepCount::never();
    std::uint64_t observations = 0;  ///< signals fed to the policy
    double loss = 0.0;
};

/// Runs one node for up to `draw.horizon` steps. Each step consumes exactly two
/// uniforms (departure, signal) whether or not they are used, so that every
/// policy sees the same world for the same node stream.
///
/// Step t: an honest node departs with probability lambda (H = t, no signal);
/// otherwise a Bernoulli signal is drawn and fed to the policy, and a Remove
/// verdict sets N = t. Both times are capped at the horizon before accounting.
template <typename R>
NodeRecord simulate_node(R& responder, NodeType type, const ExperimentDraw& draw, Rng& rng) {
    NodeRecord rec;
    rec.type = type;
    const double mean = type == NodeType::Honest ? draw.env.u : draw.env.q;
    if (initial_decision(responder) == Decision::Remove) {
        rec.removal = StepCount::at(0);
    } else {
        for (std::uint64_t t = 1; t <= draw.horizon; ++t) {
            const double leave = uniform01(rng);
            const double signal = uniform01(rng);
            if (type == NodeType::Honest && leave < draw.env.departure_rate) {
                rec.departure = StepCount::at(t);
                break;
            }
            const Observation x(signal < mean ? 1.0 : 0.0);
            ++rec.observations;
            if (observe(responder, x) == Decision::Remove) {
                rec.removal = StepCount::at(t);
                break;
            }
        }
    }
    rec.loss = realized_loss(type, rec.departure.capped(draw.horizon), rec.removal.capped(draw.horizon), draw.env);
    return rec;
}

struct EpisodeResult {
    std::vector<NodeRecord> nodes;
    double mean_loss = 0.0;
    std::optional<double> mean_loss_honest;
    std::optional<double> mean_loss_malicious;
    double malicious_fraction = 0.0;
};

/// Aggregates in node order so the result is independent of how nodes were run.
inline EpisodeResult summarize(std::vector<NodeRecord> nodes) {
    EpisodeResult result;
    double total = 0.0, honest = 0.0, malicious = 0.0;
    std::size_t n_honest = 0, n_malicious = 0;
    for (const auto& rec : nodes) {
        total += rec.loss;
        if (rec.type == NodeType::Honest) {
            honest += rec.loss;
            ++n_honest;
        } else {
            malicious += rec.loss;
            ++n_malicious;
        }
    }
    if (!nodes.empty()) {
        result.mean_loss = total / static_cast<double>(nodes.size());
        result.malicious_fraction = static_cast<double>(n_malicious) / static_cast<double>(nodes.size());
    }
    if (n_honest > 0) result.mean_loss_honest = honest / static_cast<double>(n_honest);
    if (n_malicious > 0) result.mean_loss_malicious = malicious / static_cast<double>(n_malicious);
    result.nodes = std::move(nodes);
    return result;
}

/// Node i draws its type and its world from stream derive_seed(draw.seed, i).
/// `factory(env, type)` must return a fresh responder.
template <typename Factory>
    requires std::invocable<Factory&, const EnvParams&, NodeType>
EpisodeResult run_episode(Factory&& factory, const ExperimentDraw& draw) {
    draw.validate();
    std::vector<NodeRecord> nodes;
    nodes.reserve(draw.n_nodes);
    for (std::uint32_t i = 0; i < draw.n_nodes; ++i) {
        Rng rng(derive_seed(draw.seed, i));
        const NodeType type = uniform01(rng) < draw.env.prior_malicious ? NodeType::Malicious : NodeType::Honest;
        auto responder = factory(draw.env, type);
        NodeRecord rec = simulate_node(responder, type, draw, rng);
        rec.node_id = i;
        nodes.push_back(rec);
    }
    return summarize(std::move(nodes));
}

inline EpisodeResult run_episode(const PolicySpec& spec, const ExperimentDraw& draw) {
    return run_episode([&spec](const EnvParams& env, NodeType type) { return make_responder(spec, env, type); },
                       draw);
}

/// Runs `count` nodes of a fixed type (no type sampling); used for per-type loss estimates.
inline std::vector<NodeRecord> run_nodes_of_type(const PolicySpec& spec, NodeType type, const ExperimentDraw& draw,
                                                 std::uint32_t count) {
    draw.validate();
    std::vector<NodeRecord> nodes;
    nodes.reserve(count);
    for (std::uint32_t i = 0; i < count; ++i) {
        Rng rng(derive_seed(draw.seed, i));
        auto responder = make_responder(spec, draw.env, type);
        NodeRecord rec = simulate_node(responder, type, draw, rng);
        rec.node_id = i;
        nodes.push_back(rec);
    }
    return nodes;
}

}  // namespace blacklist
