#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <stdexcept>

#include "blacklist/core_model.hpp"

namespace blacklist {

/// Raised when the evidence has zero likelihood under both node types.
class ImpossibleEvidence : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Binary signal model: P(x=1 | honest) = u, P(x=1 | malicious) = q.
/// Log-probabilities are cached; zero probabilities are stored as -inf.
class BernoulliModel {
public:
    BernoulliModel(double honest_mean, double malicious_mean) : u_(honest_mean), q_(malicious_mean) {
        if (!(u_ >= 0.0 && u_ <= 1.0) || !(q_ >= 0.0 && q_ <= 1.0)) {
            throw std::invalid_argument("BernoulliModel: means must lie in [0,1]");
        }
        log_u_ = std::log(u_);
        log_not_u_ = std::log1p(-u_);
        log_q_ = std::log(q_);
        log_not_q_ = std::log1p(-q_);
    }

    double honest_mean() const { return u_; }
    double malicious_mean() const { return q_; }

    /// log P(k ones in t trials, in a fixed order | type); 0 * log 0 counts as 0.
    double log_likelihood(NodeType type, std::uint64_t ones, std::uint64_t count) const {
        const bool honest = type == NodeType::Honest;
        const double log_one = honest ? log_u_ : log_q_;
        const double log_zero = honest ? log_not_u_ : log_not_q_;
        const std::uint64_t zeros = count - ones;
        double total = 0.0;
        if (ones > 0) total += static_cast<double>(ones) * log_one;
        if (zeros > 0) total += static_cast<double>(zeros) * log_zero;
        return total;
    }

private:
    double u_;
    double q_;
    double log_u_;
    double log_not_u_;
    double log_q_;
    double log_not_q_;
};

struct TypePosterior {
    double malicious;
    double honest;
};

/// Posterior over node type after k ones in t binary observations, computed as
/// a logistic transform of the log-likelihood difference. Empty when the
/// evidence has zero likelihood under both types.
inline std::optional<TypePosterior> try_posterior_pair(std::uint64_t ones, std::uint64_t count,
                                                       const BernoulliModel& model, double prior_malicious) {
    if (ones > count) throw std::invalid_argument("posterior: ones exceeds count");
    if (!(prior_malicious >= 0.0 && prior_malicious <= 1.0)) {
        throw std::invalid_argument("posterior: prior must lie in [0,1]");
    }
    const double log_mal = std::log(prior_malicious) + model.log_likelihood(NodeType::Malicious, ones, count);
    const double log_hon = std::log1p(-prior_malicious) + model.log_likelihood(NodeType::Honest, ones, count);
    constexpr double kNegInf = -std::numeric_limits<double>::infinity();
    if (log_mal == kNegInf && log_hon == kNegInf) return std::nullopt;
    if (log_mal == kNegInf) return TypePosterior{0.0, 1.0};
    if (log_hon == kNegInf) return TypePosterior{1.0, 0.0};
    const double d = log_mal - log_hon;
    // evaluate each side with a non-positive exponent
    if (d >= 0.0) {
        const double e = std::exp(-d);
        return TypePosterior{1.0 / (1.0 + e), e / (1.0 + e)};
    }
    const double e = std::exp(d);
    return TypePosterior{e / (1.0 + e), 1.0 / (1.0 + e)};
}

inline TypePosterior posterior_pair(std::uint64_t ones, std::uint64_t count, const BernoulliModel& model,
                                    double prior_malicious) {
    auto result = try_posterior_pair(ones, count, model, prior_malicious);
    if (!result) throw ImpossibleEvidence("posterior: evidence has zero likelihood under both types");
    return *result;
}

inline double posterior(std::uint64_t ones, std::uint64_t count, const BernoulliModel& model, double prior_malicious) {
    return posterior_pair(ones, count, model, prior_malicious).malicious;
}

/// Per-node belief: (ones, count, prior) is sufficient; the posterior is cached.
class BeliefState {
public:
    BeliefState(BernoulliModel model, double prior_malicious)
        : model_(model), prior_(prior_malicious), cached_(posterior_pair(0, 0, model, prior_malicious)) {}

    const BernoulliModel& model() const { return model_; }
    std::uint64_t ones() const { return ones_; }
    std::uint64_t count() const { return count_; }
    double prior_malicious() const { return prior_; }
    double posterior_malicious() const { return cached_.malicious; }
    double posterior_honest() const { return cached_.honest; }

    [[nodiscard]] BeliefState updated(int x) const {
        if (x != 0 && x != 1) throw std::invalid_argument("BeliefState: observation must be binary");
        return BeliefState(model_, prior_, ones_ + static_cast<std::uint64_t>(x), count_ + 1);
    }

    [[nodiscard]] BeliefState updated(Observation x) const {
        if (!x.is_binary()) throw std::invalid_argument("BeliefState: observation must be binary");
        return updated(x.value() == 1.0 ? 1 : 0);
    }

    /// Belief after `extra_ones` ones in `extra_count` further observations.
    [[nodiscard]] BeliefState advanced(std::uint64_t extra_ones, std::uint64_t extra_count) const {
        return BeliefState(model_, prior_, ones_ + extra_ones, count_ + extra_count);
    }

private:
    BeliefState(BernoulliModel model, double prior, std::uint64_t ones, std::uint64_t count)
        : model_(model), prior_(prior), ones_(ones), count_(count), cached_(posterior_pair(ones, count, model, prior)) {}

    BernoulliModel model_;
    double prior_;
    std::uint64_t ones_ = 0;
    std::uint64_t count_ = 0;
    TypePosterior cached_;
};

/// P(x_{t+1} = 1 | data) = u P(honest) + q P(malicious).
inline double predictive(const BeliefState& belief) {
    return belief.model().honest_mean() * belief.posterior_honest() +
           belief.model().malicious_mean() * belief.posterior_malicious();
}

inline double expected_keep_gain(double posterior_honest, double posterior_malicious, const EnvParams& env) {
    return posterior_honest * env.gain_honest - posterior_malicious * env.loss_malicious;
}

/// Expected one-step gain of keeping the node; removing always yields 0.
inline double expected_keep_gain(const BeliefState& belief, const EnvParams& env) {
    return expected_keep_gain(belief.posterior_honest(), belief.posterior_malicious(), env);
}

}  // namespace blacklist
