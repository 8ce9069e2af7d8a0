#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>

#include "blacklist/core_model.hpp"

// High-probability stopping rule: remove a node once its running mean sits
// inside a shrinking Hoeffding radius around the malicious mean q, but only
// after a warm-up that depends on the confidence level and the gap.

namespace blacklist::hiper {

inline constexpr double kDeltaMin = 1e-6;
inline constexpr double kDeltaMax = 1.0 - 1e-6;

/// Sample count and running sum; the mean is recomputed as sum/count.
class RunningStat {
public:
    RunningStat() = default;

    std::uint64_t count() const { return count_; }
    double sum() const { return sum_; }

    double mean() const {
        if (count_ == 0) throw std::logic_error("RunningStat::mean() with no samples");
        return sum_ / static_cast<double>(count_);
    }

    [[nodiscard]] RunningStat updated(Observation x) const {
        RunningStat next = *this;
        next.count_ += 1;
        next.sum_ += x.value();
        return next;
    }

private:
    std::uint64_t count_ = 0;
    double sum_ = 0.0;
};

inline RunningStat update(const RunningStat& stat, double x) { return stat.updated(Observation(x)); }

struct HiperParams {
    double delta;
    double gap;
    double malicious_mean;

    HiperParams(double delta_, double gap_, double malicious_mean_)
        : delta(delta_), gap(gap_), malicious_mean(malicious_mean_) {
        if (!(delta > 0.0 && delta < 1.0)) throw std::invalid_argument("HiperParams: delta must lie in (0,1)");
        if (!(gap > 0.0)) throw std::invalid_argument("HiperParams: gap must be positive");
        if (!(malicious_mean >= 0.0 && malicious_mean <= 1.0)) {
            throw std::invalid_argument("HiperParams: q must lie in [0,1]");
        }
    }
};

/// sqrt(ln(2/delta) / 2t)
inline double confidence_radius(double delta, std::uint64_t t) {
    if (!(delta > 0.0 && delta < 1.0)) throw std::invalid_argument("confidence_radius: delta must lie in (0,1)");
    if (t == 0) throw std::invalid_argument("confidence_radius: t must be positive");
    return std::sqrt(std::log(2.0 / delta) / (2.0 * static_cast<double>(t)));
}

/// ln(2/delta) / (2 gap^2); removal requires the step count to strictly exceed it.
inline double min_samples(double delta, double gap) {
    if (!(delta > 0.0 && delta < 1.0)) throw std::invalid_argument("min_samples: delta must lie in (0,1)");
    if (!(gap > 0.0)) throw std::invalid_argument("min_samples: gap must be positive");
    return std::log(2.0 / delta) / (2.0 * gap * gap);
}

inline Decision decide(const RunningStat& stat, const HiperParams& params) {
    const std::uint64_t t = stat.count();
    if (t == 0) return Decision::Keep;
    const bool warmed_up = static_cast<double>(t) > min_samples(params.delta, params.gap);
    const bool near_malicious = std::abs(stat.mean() - params.malicious_mean) < confidence_radius(params.delta, t);
    return warmed_up && near_malicious ? Decision::Remove : Decision::Keep;
}

struct DeltaChoice {
    double delta;
    bool clamped;
};

/// Confidence level that equalises the malicious and honest loss bounds.
/// Results outside (0,1) are clamped into [kDeltaMin, kDeltaMax] and flagged.
inline DeltaChoice optimal_delta(double loss_malicious, double gain_honest, double departure_rate, double gap) {
    if (!(loss_malicious >= 0.0) || !(gain_honest >= 0.0) || !(gap >= 0.0)) {
        throw std::invalid_argument("optimal_delta: loss, gain and gap must be nonnegative");
    }
    if (!(departure_rate > 0.0)) throw std::invalid_argument("optimal_delta: departure rate must be positive");
    const double g2 = gap * gap;
    const double numerator = loss_malicious * departure_rate * (g2 + 2.0 * departure_rate);
    const double denominator = gain_honest * (g2 + 2.0);
    // g_U = 0 sends the ratio to +inf, i.e. delta -> -inf
    const double delta = denominator > 0.0 ? 1.0 - std::sqrt(numerator / denominator)
                                           : -std::numeric_limits<double>::infinity();
    if (delta < kDeltaMin) return {kDeltaMin, true};
    if (delta > kDeltaMax) return {kDeltaMax, true};
    return {delta, false};
}

/// Expected loss on a malicious node: l_Q / (1-delta)^2.
inline double bound_loss_malicious(double loss_malicious, double delta) {
    if (!(delta >= 0.0 && delta < 1.0)) throw std::invalid_argument("bound_loss_malicious: delta must lie in [0,1)");
    return loss_malicious / ((1.0 - delta) * (1.0 - delta));
}

/// Expected loss on an honest node: g_U (gap^2 + 2) / (lambda (gap^2 + 2 lambda)).
inline double bound_loss_honest(double gain_honest, double departure_rate, double gap) {
    if (!(departure_rate > 0.0)) throw std::invalid_argument("bound_loss_honest: departure rate must be positive");
    if (!(gap > 0.0)) throw std::invalid_argument("bound_loss_honest: gap must be positive");
    const double g2 = gap * gap;
    return gain_honest * (g2 + 2.0) / (departure_rate * (g2 + 2.0 * departure_rate));
}

/// Worst-case bound at delta = optimal_delta(); the malicious side coincides with the honest one.
inline double bound_loss_combined(double loss_malicious, double gain_honest, double departure_rate, double gap) {
    (void)loss_malicious;
    return bound_loss_honest(gain_honest, departure_rate, gap);
}

}  // namespace blacklist::hiper
