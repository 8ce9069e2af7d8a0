#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <string_view>

namespace blacklist {

enum class NodeType { Honest, Malicious };

enum class Decision { Keep, Remove };

inline std::string_view to_string(NodeType type) {
    return type == NodeType::Honest ? "honest" : "malicious";
}

inline std::string_view to_string(Decision decision) {
    return decision == Decision::Keep ? "keep" : "remove";
}

/// A single information signal for one node and one time step.
class Observation {
public:
    explicit Observation(double value) : value_(value) {
        if (!(value >= 0.0 && value <= 1.0)) {
            throw std::invalid_argument("observation must lie in [0,1], got " + std::to_string(value));
        }
    }

    double value() const { return value_; }
    bool is_binary() const { return value_ == 0.0 || value_ == 1.0; }

private:
    double value_;
};

/// A time step that may be "never" (the node was never removed / never departed).
/// Kept distinct from large integers so that a missing horizon cap is detectable.
class StepCount {
public:
    static constexpr StepCount never() { return StepCount(); }
    static constexpr StepCount at(std::uint64_t step) { return StepCount(step); }

    constexpr bool is_never() const { return never_; }

    std::uint64_t value() const {
        if (never_) throw std::logic_error("StepCount::value() called on 'never'");
        return step_;
    }

    /// Truncates at an episode horizon; "never" becomes the horizon itself.
    constexpr StepCount capped(std::uint64_t horizon) const {
        if (never_) return StepCount(horizon);
        return StepCount(std::min(step_, horizon));
    }

    friend constexpr bool operator==(const StepCount&, const StepCount&) = default;

private:
    constexpr StepCount() : step_(0), never_(true) {}
    constexpr explicit StepCount(std::uint64_t step) : step_(step), never_(false) {}

    std::uint64_t step_;
    bool never_;
};

/// The generative world shared by every node of one experiment.
struct EnvParams {
    double u = 0.5;                ///< mean signal of honest nodes
    double q = 0.5;                ///< mean signal of malicious nodes
    double gain_honest = 1.0;      ///< g_U, earned per step an honest node stays
    double loss_malicious = 1.0;   ///< l_Q, paid per step a malicious node stays
    double departure_rate = 0.01;  ///< per-step probability an honest node leaves
    double prior_malicious = 0.5;

    double gap() const { return std::abs(u - q); }
    double expected_departure() const { return 1.0 / departure_rate; }

    void validate() const {
        auto unit = [](double v) { return v >= 0.0 && v <= 1.0; };
        if (!unit(u) || !unit(q)) throw std::invalid_argument("EnvParams: u and q must lie in [0,1]");
        if (!(gain_honest >= 0.0) || !(loss_malicious >= 0.0)) {
            throw std::invalid_argument("EnvParams: gain and loss must be nonnegative");
        }
        if (!(departure_rate > 0.0 && departure_rate <= 1.0)) {
            throw std::invalid_argument("EnvParams: departure rate must lie in (0,1]");
        }
        if (!unit(prior_malicious)) throw std::invalid_argument("EnvParams: prior must lie in [0,1]");
    }
};

/// Total gain from a node that departs at `departure` and is removed at `removal`.
/// Honest: min{H,N} g_U.  Malicious: -N l_Q, which requires a finite N.
inline double realized_gain(NodeType type, StepCount departure, StepCount removal, const EnvParams& env) {
    if (type == NodeType::Malicious) {
        if (removal.is_never()) {
            throw std::domain_error("realized_gain: malicious node with uncapped removal time");
        }
        return -static_cast<double>(removal.value()) * env.loss_malicious;
    }
    if (departure.is_never() && removal.is_never()) return std::numeric_limits<double>::infinity();
    std::uint64_t stay = 0;
    if (departure.is_never()) stay = removal.value();
    else if (removal.is_never()) stay = departure.value();
    else stay = std::min(departure.value(), removal.value());
    return static_cast<double>(stay) * env.gain_honest;
}

/// Gain of the policy that knows the type: remove malicious at 0, never remove honest.
inline double oracle_gain(NodeType type, StepCount departure, const EnvParams& env) {
    if (type == NodeType::Malicious) return 0.0;
    if (departure.is_never()) throw std::domain_error("oracle_gain: departure time must be capped");
    return static_cast<double>(departure.value()) * env.gain_honest;
}

/// Oracle gain minus realized gain; both times must already be capped at the episode horizon.
inline double realized_loss(NodeType type, StepCount departure, StepCount removal, const EnvParams& env) {
    if (removal.is_never() || (type == NodeType::Honest && departure.is_never())) {
        throw std::domain_error("realized_loss: times must be capped at the episode horizon");
    }
    return oracle_gain(type, departure, env) - realized_gain(type, departure, removal, env);
}

inline double worst_case_loss(double loss_honest, double loss_malicious) {
    if (!(loss_honest >= 0.0) || !(loss_malicious >= 0.0)) {
        throw std::invalid_argument("worst_case_loss: losses must be nonnegative");
    }
    return std::max(loss_honest, loss_malicious);
}

}  // namespace blacklist
