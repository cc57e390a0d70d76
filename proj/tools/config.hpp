#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "freewalk/markov_walk.hpp"

namespace freewalk::cli {

/// Bad configuration or usage; maps to exit code 2.
class config_error : public std::runtime_error {
public:
    explicit config_error(const std::string& msg, std::size_t line = 0)
        : std::runtime_error(msg), line_(line)
    {
    }
    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

struct Budgets {
    std::size_t strands = 14;
    std::size_t radius = 6;
    std::size_t horizon = 20;
    std::size_t samples = 100000;
    std::size_t max_steps = 10000;
    std::size_t stable_steps = 50;
};

struct RunConfig {
    double q = 0.5;
    std::map<std::string, double> mu{{"a", 0.5}, {"b", 0.5}};
    std::uint64_t seed = 1;
    std::size_t workers = 1;
    Budgets budgets;
    std::string format = "csv";
    std::string out_dir = "out";
    double tolerance_scale = 1.0;
    /// Command parameters (x, y, z, r, n, ...), kept as text.
    std::map<std::string, std::string> params;
    std::vector<std::string> warnings;

    ProbMeasure measure() const;
    std::string param(const std::string& key, const std::string& fallback) const;
    std::optional<std::string> param(const std::string& key) const;
};

/// Keys accepted in `params`.
const std::vector<std::string>& parameter_keys();

/// Applies `key = value` (value as written in a config file). Throws
/// config_error on unknown keys or malformed values.
void set_value(RunConfig& cfg, const std::string& key, const std::string& value, std::size_t line = 0);

/// Parses a config file of `key = value` lines; `#` starts a comment.
RunConfig load_config(const std::string& path);
RunConfig parse_config(const std::string& text);

/// Checks the invariants; normalizes mu within 1e-3 of mass 1 (with a
/// warning) and rejects it beyond.
void validate(RunConfig& cfg);

/// Canonical text of everything that determines the data output.
std::string canonical(const RunConfig& cfg, const std::string& command);
std::string digest(const RunConfig& cfg, const std::string& command);

} // namespace freewalk::cli
