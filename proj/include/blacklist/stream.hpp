#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <utility>

#include <json.hpp>

#include "blacklist/core_model.hpp"
#include "blacklist/responders.hpp"

// Online per-node decisions over a newline-delimited JSON event stream.
//
//   in:  {"node_id": "10.0.0.7", "t": 3, "x": 0.25}
//   out: {"node_id": "10.0.0.7", "t": 3, "decision": "keep", "statistic": 0.41}
//
// One verdict per event until a node is removed; later events for that node
// produce nothing.

namespace blacklist {

struct StreamEvent {
    std::string node_id;
    std::uint64_t t = 0;
    double x = 0.0;
};

struct StreamVerdict {
    std::string node_id;
    std::uint64_t t = 0;
    Decision decision = Decision::Keep;
    double statistic = 0.0;
};

/// Bad input at a given (1-based) line.
class StreamInputError : public std::runtime_error {
public:
    StreamInputError(std::size_t line, const std::string& message)
        : std::runtime_error("line " + std::to_string(line) + ": " + message), line_(line) {}
    std::size_t line() const { return line_; }

private:
    std::size_t line_;
};

inline StreamEvent parse_event(const std::string& text, std::size_t line) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw StreamInputError(line, std::string("malformed record: ") + e.what());
    }
    if (!j.is_object()) throw StreamInputError(line, "record must be a JSON object");
    StreamEvent ev;
    const auto id = j.find("node_id");
    if (id == j.end() || !id->is_string()) throw StreamInputError(line, "'node_id' must be a string");
    ev.node_id = id->get<std::string>();
    const auto t = j.find("t");
    if (t == j.end() || !t->is_number_integer() || t->get<std::int64_t>() < 1) {
        throw StreamInputError(line, "'t' must be a positive integer");
    }
    ev.t = t->get<std::uint64_t>();
    const auto x = j.find("x");
    if (x == j.end() || !x->is_number()) throw StreamInputError(line, "'x' must be a number");
    ev.x = x->get<double>();
    if (!(ev.x >= 0.0 && ev.x <= 1.0)) throw StreamInputError(line, "'x' must lie in [0,1]");
    return ev;
}

inline std::string format_verdict(const StreamVerdict& v) {
    nlohmann::json j;
    j["node_id"] = v.node_id;
    j["t"] = v.t;
    j["decision"] = std::string(to_string(v.decision));
    j["statistic"] = v.statistic;
    return j.dump();
}

class StreamProcessor {
public:
    using Factory = std::function<Responder()>;

    /// `needs_binary`: the policy only accepts x in {0,1}. `binarize` maps
    /// x >= threshold to 1 for such policies.
    StreamProcessor(Factory factory, bool needs_binary, std::optional<double> binarize)
        : factory_(std::move(factory)), needs_binary_(needs_binary), binarize_(binarize) {}

    bool needs_binary() const { return needs_binary_; }

    /// Feeds one event. Returns no verdict if the node was already removed.
    std::optional<StreamVerdict> process(const StreamEvent& ev, std::size_t line) {
        auto it = nodes_.find(ev.node_id);
        if (it == nodes_.end()) {
            it = nodes_.emplace(ev.node_id, NodeState{factory_(), 0, false}).first;
        }
        NodeState& node = it->second;
        if (node.removed) return std::nullopt;
        if (ev.t <= node.last_t) {
            throw StreamInputError(line, "t=" + std::to_string(ev.t) + " for node '" + ev.node_id +
                                             "' is not after t=" + std::to_string(node.last_t));
        }
        double x = ev.x;
        if (needs_binary()) {
            if (binarize_) {
                x = x >= *binarize_ ? 1.0 : 0.0;
            } else if (x != 0.0 && x != 1.0) {
                throw StreamInputError(line, "policy needs binary x (got " + std::to_string(ev.x) +
                                                 "); pass --binarize <threshold>");
            }
        }
        node.last_t = ev.t;
        const Decision d = observe(node.responder, Observation(x));
        if (d == Decision::Remove) node.removed = true;
        return StreamVerdict{ev.node_id, ev.t, d, statistic(node.responder)};
    }

    std::size_t tracked_nodes() const { return nodes_.size(); }

private:
    struct NodeState {
        Responder responder;
        std::uint64_t last_t;
        bool removed;
    };

    Factory factory_;
    bool needs_binary_;
    std::optional<double> binarize_;
    std::unordered_map<std::string, NodeState> nodes_;
};

}  // namespace blacklist
