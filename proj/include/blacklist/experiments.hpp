#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <exception>
#include <fstream>
#include <mutex>
#include <numeric>
#include <ostream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <thread>
#include <tuple>
#include <vector>

#include "blacklist/responders.hpp"
#include "blacklist/rng.hpp"
#include "blacklist/simulator.hpp"

namespace blacklist {

enum class Panel { Horizon, Gap, MaliciousProportion, Gain };

inline constexpr Panel kPanels[] = {Panel::Horizon, Panel::Gap, Panel::MaliciousProportion, Panel::Gain};

inline std::string_view to_string(Panel panel) {
    switch (panel) {
        case Panel::Horizon: return "horizon";
        case Panel::Gap: return "gap";
        case Panel::MaliciousProportion: return "malicious_proportion";
        case Panel::Gain: return "gain";
    }
    return "horizon";
}

struct SweepRecord {
    Suite suite = Suite::Fig1;
    Panel panel = Panel::Horizon;
    std::string policy;
    double x = 0.0;
    double mean_loss = 0.0;
    std::uint64_t run_count = 1;
};

inline std::vector<PolicySpec> default_policies(Suite suite) {
    switch (suite) {
        case Suite::Fig1:
            return {HiperPolicy{0.9}, HiperPolicy{0.95}, HiperPolicy{0.99}, HiperPolicy{}};
        case Suite::Fig2:
            return {HiperPolicy{}, MyopicPolicy{}, OptimisticPolicy{}};
        case Suite::Fig3:
            return {OptimisticPolicy{}, LookaheadPolicy{{4, LeafRule::Zero}}, LookaheadPolicy{{8, LeafRule::Zero}}};
    }
    return {};
}

inline std::uint64_t default_runs(Suite suite) { return suite == Suite::Fig3 ? 1000 : 10000; }

struct SuiteConfig {
    Suite suite = Suite::Fig1;
    std::uint64_t n_runs = 10000;
    std::uint64_t ma_window = 51;
    std::uint64_t base_seed = 0;
    std::vector<PolicySpec> policies = default_policies(Suite::Fig1);
    /// Plot the malicious axis against the sampled prior instead of the realized fraction.
    bool latent_malicious_axis = false;
    unsigned threads = 1;

    static SuiteConfig defaults(Suite suite) {
        SuiteConfig cfg;
        cfg.suite = suite;
        cfg.n_runs = default_runs(suite);
        cfg.policies = default_policies(suite);
        return cfg;
    }

    void validate() const {
        if (n_runs < 1) throw std::invalid_argument("n_runs must be >= 1");
        if (ma_window < 1 || ma_window % 2 == 0) throw std::invalid_argument("ma_window must be odd and >= 1");
        if (policies.empty()) throw std::invalid_argument("at least one policy is required");
        if (threads < 1) throw std::invalid_argument("threads must be >= 1");
    }
};

/// Everything measured in one run: the sampled world and each policy's mean loss per node.
struct RunOutcome {
    ExperimentDraw draw;
    double malicious_fraction = 0.0;
    std::vector<double> mean_loss;  ///< indexed like SuiteConfig::policies
};

inline RunOutcome run_single(const SuiteConfig& cfg, std::uint64_t run_index) {
    Rng rng(derive_seed(cfg.base_seed, run_index));
    RunOutcome out;
    out.draw = sample_experiment(rng, cfg.suite);
    out.mean_loss.reserve(cfg.policies.size());
    for (const auto& policy : cfg.policies) {
        const EpisodeResult episode = run_episode(policy, out.draw);
        out.malicious_fraction = episode.malicious_fraction;
        out.mean_loss.push_back(episode.mean_loss);
    }
    return out;
}

/// Runs every experiment of the suite. Runs are independent and may execute on
/// several threads; results are stored by run index.
inline std::vector<RunOutcome> run_suite_raw(const SuiteConfig& cfg) {
    cfg.validate();
    std::vector<RunOutcome> runs(cfg.n_runs);
    const unsigned workers = static_cast<unsigned>(std::min<std::uint64_t>(cfg.threads, cfg.n_runs));
    if (workers <= 1) {
        for (std::uint64_t r = 0; r < cfg.n_runs; ++r) runs[r] = run_single(cfg, r);
        return runs;
    }
    std::atomic<std::uint64_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    {
        std::vector<std::jthread> pool;
        for (unsigned w = 0; w < workers; ++w) {
            pool.emplace_back([&] {
                for (std::uint64_t r = next++; r < cfg.n_runs; r = next++) {
                    try {
                        runs[r] = run_single(cfg, r);
                    } catch (...) {
                        std::lock_guard lock(failure_mutex);
                        if (!failure) failure = std::current_exception();
                        next = cfg.n_runs;
                    }
                }
            });
        }
    }
    if (failure) std::rethrow_exception(failure);
    return runs;
}

struct CurvePoint {
    double x;
    double mean_loss;
    std::uint64_t run_count;
};

/// Centered moving average; near the ends the window shrinks symmetrically.
/// Each output point's run_count is the total over its window.
inline std::vector<CurvePoint> moving_average(const std::vector<CurvePoint>& points, std::uint64_t window) {
    if (window < 1 || window % 2 == 0) throw std::invalid_argument("moving_average: window must be odd and >= 1");
    const std::size_t n = points.size();
    const std::size_t half = static_cast<std::size_t>(window / 2);
    std::vector<CurvePoint> out;
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t h = std::min({half, i, n - 1 - i});
        double sum = 0.0;
        std::uint64_t runs = 0;
        for (std::size_t j = i - h; j <= i + h; ++j) {
            sum += points[j].mean_loss;
            runs += points[j].run_count;
        }
        out.push_back({points[i].x, sum / static_cast<double>(2 * h + 1), runs});
    }
    return out;
}

inline double panel_value(const RunOutcome& run, Panel panel, bool latent_malicious_axis) {
    switch (panel) {
        case Panel::Horizon: return static_cast<double>(run.draw.horizon);
        case Panel::Gap: return run.draw.env.gap();
        case Panel::MaliciousProportion:
            return latent_malicious_axis ? run.draw.env.prior_malicious : run.malicious_fraction;
        case Panel::Gain: return run.draw.env.gain_honest;
    }
    return 0.0;
}

/// Sorts runs by each panel's variable, merges runs sharing an x value, then smooths.
inline std::vector<SweepRecord> sweep_records(const SuiteConfig& cfg, const std::vector<RunOutcome>& runs) {
    std::vector<SweepRecord> records;
    for (Panel panel : kPanels) {
        for (std::size_t p = 0; p < cfg.policies.size(); ++p) {
            std::vector<std::pair<double, double>> pairs;
            pairs.reserve(runs.size());
            for (const auto& run : runs) pairs.emplace_back(panel_value(run, panel, cfg.latent_malicious_axis), run.mean_loss[p]);
            // sorting on (x, loss) makes the order independent of run order
            std::sort(pairs.begin(), pairs.end());
            std::vector<CurvePoint> points;
            for (std::size_t i = 0; i < pairs.size();) {
                std::size_t j = i;
                double sum = 0.0;
                while (j < pairs.size() && pairs[j].first == pairs[i].first) sum += pairs[j++].second;
                points.push_back({pairs[i].first, sum / static_cast<double>(j - i), j - i});
                i = j;
            }
            const std::string id = policy_id(cfg.policies[p]);
            for (const auto& pt : moving_average(points, cfg.ma_window)) {
                records.push_back({cfg.suite, panel, id, pt.x, pt.mean_loss, pt.run_count});
            }
        }
    }
    return records;
}

inline std::vector<SweepRecord> run_suite(const SuiteConfig& cfg) { return sweep_records(cfg, run_suite_raw(cfg)); }

/// Mean over runs of each policy's per-run mean loss.
inline std::vector<double> aggregate_loss(const std::vector<RunOutcome>& runs, std::size_t n_policies) {
    std::vector<double> totals(n_policies, 0.0);
    for (const auto& run : runs) {
        for (std::size_t p = 0; p < n_policies; ++p) totals[p] += run.mean_loss[p];
    }
    if (!runs.empty()) {
        for (auto& t : totals) t /= static_cast<double>(runs.size());
    }
    return totals;
}

inline std::string format_number(double value) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.9g", value);
    return buf;
}

inline constexpr std::string_view kCsvHeader = "suite,panel,policy,x,mean_loss,run_count";

/// Header plus rows ordered by (panel, policy, x).
inline void write_csv(std::vector<SweepRecord> records, std::ostream& os) {
    std::sort(records.begin(), records.end(), [](const SweepRecord& a, const SweepRecord& b) {
        return std::make_tuple(to_string(a.panel), std::string_view(a.policy), a.x, a.mean_loss) <
               std::make_tuple(to_string(b.panel), std::string_view(b.policy), b.x, b.mean_loss);
    });
    os << kCsvHeader << '\n';
    for (const auto& r : records) {
        os << to_string(r.suite) << ',' << to_string(r.panel) << ',' << r.policy << ',' << format_number(r.x) << ','
           << format_number(r.mean_loss) << ',' << r.run_count << '\n';
    }
}

inline void emit_csv(std::vector<SweepRecord> records, const std::string& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
    write_csv(std::move(records), out);
    out.flush();
    if (!out) throw std::runtime_error("write failed for '" + path + "'");
}

}  // namespace blacklist
