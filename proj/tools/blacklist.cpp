// blacklist: run experiment suites, compute HIPER bounds, and apply a removal
// policy to a per-node score stream.
//
//   blacklist suite  --config fig2.conf --out fig2.csv --seed 7
//   blacklist bounds --lQ 1 --gU 1 --lambda 0.1 --Delta 0.5
//   blacklist stream --policy hiper --q 0.3 --delta 0.9 --Delta 0.4 < events.jsonl

#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "blacklist/cli.hpp"

namespace {

template <typename T>
void add_optional(CLI::App* app, const std::string& name, std::optional<T>& target, const std::string& help) {
    app->add_option_function<T>(name, [&target](const T& v) { target = v; }, help);
}

}  // namespace

int main(int argc, char** argv) {
    using namespace blacklist::cli;

    CLI::App app{"Blacklisting decisions: HIPER stopping rule and belief-based response policies"};
    app.require_subcommand(1);

    SuiteOptions suite;
    auto* suite_cmd = app.add_subcommand("suite", "Run an experiment suite and write plot-ready CSV");
    add_optional(suite_cmd, "--config", suite.config_path, "Suite config file (key = value lines)");
    add_optional(suite_cmd, "--suite", suite.suite, "fig1 | fig2 | fig3 (defaults when no config is given)");
    suite_cmd->add_option("--out", suite.out_path, "Output CSV path")->required();
    add_optional(suite_cmd, "--seed", suite.seed, "Base seed (overrides base_seed in the config)");
    add_optional(suite_cmd, "--ma-window", suite.ma_window, "Moving-average window (odd)");
    add_optional(suite_cmd, "--threads", suite.threads, "Worker threads; output does not depend on it");

    BoundsOptions bounds;
    auto* bounds_cmd = app.add_subcommand("bounds", "Print the optimal delta and the loss bounds");
    add_optional(bounds_cmd, "--lQ", bounds.loss_malicious, "Loss per step of a malicious node");
    add_optional(bounds_cmd, "--gU", bounds.gain_honest, "Gain per step of an honest node");
    add_optional(bounds_cmd, "--lambda", bounds.departure_rate, "Honest departure rate");
    add_optional(bounds_cmd, "--Delta", bounds.gap, "Gap |u - q|");
    add_optional(bounds_cmd, "--u", bounds.u, "Honest mean (with --q, gives the gap)");
    add_optional(bounds_cmd, "--q", bounds.q, "Malicious mean");

    StreamOptions stream;
    std::string input_path = "-";
    std::string output_path = "-";
    auto* stream_cmd = app.add_subcommand("stream", "Apply a policy to newline-delimited JSON events");
    stream_cmd->add_option("--policy", stream.policy, "hiper | myopic | optimistic | lookahead")
        ->capture_default_str();
    add_optional(stream_cmd, "--u", stream.u, "Honest mean");
    add_optional(stream_cmd, "--q", stream.q, "Malicious mean");
    stream_cmd->add_option("--gU", stream.gain_honest, "Gain per honest step")->capture_default_str();
    stream_cmd->add_option("--lQ", stream.loss_malicious, "Loss per malicious step")->capture_default_str();
    add_optional(stream_cmd, "--lambda", stream.departure_rate, "Honest departure rate");
    add_optional(stream_cmd, "--delta", stream.delta, "HIPER confidence level (default: optimal)");
    add_optional(stream_cmd, "--Delta", stream.gap, "HIPER gap (default: |u - q|)");
    stream_cmd->add_option("--prior", stream.prior, "Prior probability of malicious")->capture_default_str();
    stream_cmd->add_option("--lookahead-depth", stream.lookahead_depth, "Planning depth T")->capture_default_str();
    stream_cmd->add_option("--leaf-rule", stream.leaf_rule, "zero | myopic | optimistic")->capture_default_str();
    add_optional(stream_cmd, "--binarize", stream.binarize, "Map x >= threshold to 1 for belief policies");
    stream_cmd->add_option("--input", input_path, "Input file, '-' for stdin")->capture_default_str();
    stream_cmd->add_option("--output", output_path, "Output file, '-' for stdout")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::Success& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kUsageError;
    }

    if (suite_cmd->parsed()) return cmd_suite(suite, std::cout, std::cerr);
    if (bounds_cmd->parsed()) return cmd_bounds(bounds, std::cout, std::cerr);

    std::ifstream in_file;
    std::ofstream out_file;
    if (input_path != "-") {
        in_file.open(input_path);
        if (!in_file) {
            std::cerr << "error: cannot open input '" << input_path << "'\n";
            return kUsageError;
        }
    }
    if (output_path != "-") {
        out_file.open(output_path, std::ios::binary | std::ios::trunc);
        if (!out_file) {
            std::cerr << "error: cannot open output '" << output_path << "'\n";
            return kRuntimeError;
        }
    }
    std::istream& in = input_path == "-" ? std::cin : in_file;
    std::ostream& out = output_path == "-" ? std::cout : out_file;
    return cmd_stream(stream, in, out, std::cerr);
}
