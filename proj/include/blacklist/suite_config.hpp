#pragma once

#include <algorithm>
#include <charconv>
#include <cstdint>
#include <istream>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "blacklist/experiments.hpp"
#include "blacklist/responders.hpp"

// Suite config files are plain `key = value` lines; `#` starts a comment.
//
//   suite = fig2
//   n_runs = 1000
//   ma_window = 51
//   base_seed = 42
//   policies = hiper-star, myopic, optimistic
//   malicious_axis = realized      # or: latent
//   threads = 4
//
// Keys that are absent fall back to the suite's defaults.

namespace blacklist {

class ConfigError : public std::runtime_error {
public:
    ConfigError(std::string source, std::size_t line, std::string field, const std::string& message)
        : std::runtime_error(source + (line > 0 ? ":" + std::to_string(line) : std::string()) +
                             (field.empty() ? std::string() : ": '" + field + "'") + ": " + message),
          line_(line),
          field_(std::move(field)) {}

    std::size_t line() const { return line_; }
    const std::string& field() const { return field_; }

private:
    std::size_t line_;
    std::string field_;
};

namespace detail {

inline std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

inline std::uint64_t parse_unsigned(std::string_view text) {
    std::uint64_t value = 0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc() || ptr != text.data() + text.size() || text.empty()) {
        throw std::invalid_argument("expected a non-negative integer, got '" + std::string(text) + "'");
    }
    return value;
}

}  // namespace detail

inline std::vector<PolicySpec> parse_policy_list(std::string_view text) {
    std::vector<PolicySpec> policies;
    while (!text.empty()) {
        const auto comma = text.find(',');
        const auto item = detail::trim(text.substr(0, comma));
        if (item.empty()) throw std::invalid_argument("empty policy name in list");
        policies.push_back(parse_policy(item));
        if (comma == std::string_view::npos) break;
        text.remove_prefix(comma + 1);
    }
    return policies;
}

struct SuiteConfigFile {
    SuiteConfig config;
    bool has_seed = false;
};

inline SuiteConfigFile parse_suite_config(std::istream& in, const std::string& source) {
    struct Entry {
        std::string value;
        std::size_t line;
    };
    static const std::vector<std::string> known = {"suite",          "n_runs",  "ma_window", "base_seed",
                                                   "policies",       "threads", "malicious_axis"};
    std::map<std::string, Entry> entries;
    std::string raw;
    std::size_t line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        std::string_view line = raw;
        if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
        line = detail::trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) throw ConfigError(source, line_no, "", "expected 'key = value'");
        const std::string key(detail::trim(line.substr(0, eq)));
        const std::string value(detail::trim(line.substr(eq + 1)));
        if (std::find(known.begin(), known.end(), key) == known.end()) {
            throw ConfigError(source, line_no, key, "unknown key");
        }
        if (entries.count(key)) throw ConfigError(source, line_no, key, "duplicate key");
        if (value.empty()) throw ConfigError(source, line_no, key, "missing value");
        entries[key] = {value, line_no};
    }

    auto apply = [&](const std::string& key, auto&& fn) {
        auto it = entries.find(key);
        if (it == entries.end()) return;
        try {
            fn(it->second.value);
        } catch (const std::exception& e) {
            throw ConfigError(source, it->second.line, key, e.what());
        }
    };

    Suite suite = Suite::Fig1;
    if (!entries.count("suite")) throw ConfigError(source, 0, "suite", "required key is missing");
    apply("suite", [&](const std::string& v) { suite = parse_suite(v); });
    SuiteConfig cfg = SuiteConfig::defaults(suite);
    apply("n_runs", [&](const std::string& v) { cfg.n_runs = detail::parse_unsigned(v); });
    apply("ma_window", [&](const std::string& v) { cfg.ma_window = detail::parse_unsigned(v); });
    apply("base_seed", [&](const std::string& v) { cfg.base_seed = detail::parse_unsigned(v); });
    apply("threads", [&](const std::string& v) { cfg.threads = static_cast<unsigned>(detail::parse_unsigned(v)); });
    apply("policies", [&](const std::string& v) { cfg.policies = parse_policy_list(v); });
    apply("malicious_axis", [&](const std::string& v) {
        if (v == "latent") cfg.latent_malicious_axis = true;
        else if (v == "realized") cfg.latent_malicious_axis = false;
        else throw std::invalid_argument("expected 'realized' or 'latent'");
    });

    auto check = [&](const std::string& key, bool ok, const char* message) {
        if (ok) return;
        const auto it = entries.find(key);
        throw ConfigError(source, it == entries.end() ? 0 : it->second.line, key, message);
    };
    check("n_runs", cfg.n_runs >= 1, "must be >= 1");
    check("ma_window", cfg.ma_window >= 1 && cfg.ma_window % 2 == 1, "must be odd and >= 1");
    check("threads", cfg.threads >= 1, "must be >= 1");
    return {cfg, entries.count("base_seed") > 0};
}

}  // namespace blacklist
