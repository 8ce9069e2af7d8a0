#pragma once

#include <chrono>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <iomanip>
#include <istream>
#include <optional>
#include <ostream>
#include <string>

#include "blacklist/experiments.hpp"
#include "blacklist/hiper.hpp"
#include "blacklist/stream.hpp"
#include "blacklist/suite_config.hpp"

// Subcommand bodies, separated from argument parsing so they can be driven
// from tests. Exit codes: 0 success, 1 runtime failure, 2 usage/config/input error.

namespace blacklist::cli {

inline constexpr int kOk = 0;
inline constexpr int kRuntimeError = 1;
inline constexpr int kUsageError = 2;

struct SuiteOptions {
    std::optional<std::string> config_path;
    std::optional<std::string> suite;
    std::string out_path;
    std::optional<std::uint64_t> seed;
    std::optional<std::uint64_t> ma_window;
    std::optional<unsigned> threads;
};

inline int cmd_suite(const SuiteOptions& opts, std::ostream& out, std::ostream& err) {
    SuiteConfig cfg;
    bool has_seed = false;
    try {
        if (opts.config_path) {
            std::ifstream in(*opts.config_path);
            if (!in) {
                err << "error: cannot open config file '" << *opts.config_path << "'\n";
                return kUsageError;
            }
            auto parsed = parse_suite_config(in, *opts.config_path);
            cfg = parsed.config;
            has_seed = parsed.has_seed;
            if (opts.suite && parse_suite(*opts.suite) != cfg.suite) {
                err << "error: --suite " << *opts.suite << " conflicts with suite in " << *opts.config_path << "\n";
                return kUsageError;
            }
        } else if (opts.suite) {
            cfg = SuiteConfig::defaults(parse_suite(*opts.suite));
        } else {
            err << "error: either --config or --suite is required\n";
            return kUsageError;
        }
        if (opts.seed) {
            cfg.base_seed = *opts.seed;
            has_seed = true;
        }
        if (opts.ma_window) cfg.ma_window = *opts.ma_window;
        if (opts.threads) cfg.threads = *opts.threads;
        if (!has_seed) {
            err << "error: no seed given; pass --seed or set base_seed in the config\n";
            return kUsageError;
        }
        cfg.validate();
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << "\n";
        return kUsageError;
    } catch (const std::invalid_argument& e) {
        err << "config error: " << e.what() << "\n";
        return kUsageError;
    }

    try {
        const auto start = std::chrono::steady_clock::now();
        const auto runs = run_suite_raw(cfg);
        const auto records = sweep_records(cfg, runs);
        emit_csv(records, opts.out_path);
        const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        const auto totals = aggregate_loss(runs, cfg.policies.size());
        out << "suite " << to_string(cfg.suite) << ": " << cfg.n_runs << " runs, " << std::fixed
            << std::setprecision(2) << seconds << " s, " << records.size() << " rows -> " << opts.out_path << "\n";
        out << std::defaultfloat << std::setprecision(6);
        for (std::size_t p = 0; p < cfg.policies.size(); ++p) {
            out << "  " << policy_id(cfg.policies[p]) << "  mean loss " << totals[p] << "\n";
        }
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kRuntimeError;
    }
    return kOk;
}

struct BoundsOptions {
    std::optional<double> loss_malicious;
    std::optional<double> gain_honest;
    std::optional<double> departure_rate;
    std::optional<double> gap;
    std::optional<double> u;
    std::optional<double> q;
};

inline int cmd_bounds(const BoundsOptions& opts, std::ostream& out, std::ostream& err) {
    std::optional<double> gap = opts.gap;
    if (!gap && opts.u && opts.q) gap = std::abs(*opts.u - *opts.q);
    auto require = [&](const std::optional<double>& v, const char* flag) {
        if (!v) {
            err << "error: " << flag << " is required\n";
            return false;
        }
        if (!(*v > 0.0)) {
            err << "error: " << flag << " must be positive\n";
            return false;
        }
        return true;
    };
    if (!require(opts.loss_malicious, "--lQ") || !require(opts.gain_honest, "--gU") ||
        !require(opts.departure_rate, "--lambda") || !require(gap, "--Delta (or --u and --q)")) {
        return kUsageError;
    }
    if (*opts.departure_rate > 1.0) {
        err << "error: --lambda must not exceed 1\n";
        return kUsageError;
    }
    const double lq = *opts.loss_malicious, gu = *opts.gain_honest, lambda = *opts.departure_rate;
    const auto choice = hiper::optimal_delta(lq, gu, lambda, *gap);
    out << std::setprecision(9);
    out << "delta_star " << choice.delta << "\n";
    out << "clamped " << (choice.clamped ? "true" : "false") << "\n";
    out << "bound_malicious " << hiper::bound_loss_malicious(lq, choice.delta) << "\n";
    out << "bound_honest " << hiper::bound_loss_honest(gu, lambda, *gap) << "\n";
    out << "bound_combined " << hiper::bound_loss_combined(lq, gu, lambda, *gap) << "\n";
    return kOk;
}

struct StreamOptions {
    std::string policy = "hiper";
    std::optional<double> u;
    std::optional<double> q;
    double gain_honest = 1.0;
    double loss_malicious = 1.0;
    std::optional<double> departure_rate;
    std::optional<double> delta;
    std::optional<double> gap;
    double prior = 0.5;
    int lookahead_depth = 4;
    std::string leaf_rule = "zero";
    std::optional<double> binarize;
};

/// Validates stream flags and returns a processor; throws std::invalid_argument on bad flags.
inline StreamProcessor make_stream_processor(const StreamOptions& opts) {
    if (!opts.q) throw std::invalid_argument("--q is required");
    if (opts.binarize && !(*opts.binarize >= 0.0 && *opts.binarize <= 1.0)) {
        throw std::invalid_argument("--binarize threshold must lie in [0,1]");
    }
    const double q = *opts.q;

    if (opts.policy == "hiper") {
        double gap = 0.0;
        if (opts.gap) gap = *opts.gap;
        else if (opts.u) gap = std::abs(*opts.u - q);
        else throw std::invalid_argument("hiper needs --Delta or --u");
        double delta = 0.0;
        if (opts.delta) {
            delta = *opts.delta;
        } else if (opts.departure_rate) {
            delta = hiper::optimal_delta(opts.loss_malicious, opts.gain_honest, *opts.departure_rate, gap).delta;
        } else {
            throw std::invalid_argument("hiper needs --delta or --lambda");
        }
        const hiper::HiperParams params(delta, gap, q);
        return StreamProcessor([params] { return Responder(HiperResponder(params)); }, false, opts.binarize);
    }

    if (!opts.u) throw std::invalid_argument(opts.policy + " needs --u");
    EnvParams env;
    env.u = *opts.u;
    env.q = q;
    env.gain_honest = opts.gain_honest;
    env.loss_malicious = opts.loss_malicious;
    env.prior_malicious = opts.prior;
    if (opts.departure_rate) env.departure_rate = *opts.departure_rate;

    PolicySpec spec;
    if (opts.policy == "myopic") {
        spec = MyopicPolicy{};
    } else if (opts.policy == "optimistic") {
        if (!opts.departure_rate) throw std::invalid_argument("optimistic needs --lambda");
        spec = OptimisticPolicy{};
    } else if (opts.policy == "lookahead") {
        LookaheadConfig cfg{opts.lookahead_depth, parse_leaf_rule(opts.leaf_rule)};
        cfg.validate();
        if (cfg.leaf != LeafRule::Zero && !opts.departure_rate) {
            throw std::invalid_argument("leaf rule '" + opts.leaf_rule + "' needs --lambda");
        }
        spec = LookaheadPolicy{cfg};
    } else {
        throw std::invalid_argument("unknown policy '" + opts.policy + "' (expected hiper|myopic|optimistic|lookahead)");
    }
    env.validate();
    (void)make_responder(spec, env, NodeType::Honest);
    return StreamProcessor([spec, env] { return make_responder(spec, env, NodeType::Honest); }, true, opts.binarize);
}

inline int cmd_stream(const StreamOptions& opts, std::istream& in, std::ostream& out, std::ostream& err) {
    std::optional<StreamProcessor> processor;
    try {
        processor.emplace(make_stream_processor(opts));
    } catch (const std::invalid_argument& e) {
        err << "error: " << e.what() << "\n";
        return kUsageError;
    }
    std::string line;
    std::size_t line_no = 0;
    try {
        while (std::getline(in, line)) {
            ++line_no;
            if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
            const StreamEvent ev = parse_event(line, line_no);
            if (auto verdict = processor->process(ev, line_no)) out << format_verdict(*verdict) << '\n';
        }
    } catch (const StreamInputError& e) {
        out.flush();
        err << "input error: " << e.what() << "\n";
        return kUsageError;
    } catch (const std::exception& e) {
        err << "error at line " << line_no << ": " << e.what() << "\n";
        return kRuntimeError;
    }
    out.flush();
    if (!out) {
        err << "error: failed writing output\n";
        return kRuntimeError;
    }
    return kOk;
}

}  // namespace blacklist::cli
