#include "config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "freewalk/rng.hpp"

namespace freewalk::cli {

namespace {

std::string trim(const std::string& s)
{
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos)
        return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

template <class T>
T parse_number(const std::string& key, const std::string& v, std::size_t line)
{
    T out{};
    const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc() || ptr != v.data() + v.size())
        throw config_error(key + ": cannot parse '" + v + "' as a number", line);
    return out;
}

std::size_t parse_count(const std::string& key, const nlohmann::json& v, std::size_t line)
{
    if (!v.is_number_unsigned() || v.get<std::size_t>() == 0)
        throw config_error("budgets." + key + " must be a positive integer", line);
    return v.get<std::size_t>();
}

} // namespace

const std::vector<std::string>& parameter_keys()
{
    static const std::vector<std::string> keys{"x",     "y",      "z",     "r",          "w",       "n",
                                                "steps", "letter", "depths", "lengths",   "y_lengths", "y_start",
                                                "x0",    "a",      "iterations", "tail_extra", "support_depth",
                                                "ys"};
    return keys;
}

ProbMeasure RunConfig::measure() const
{
    std::map<Word, double> w;
    for (const auto& [k, v] : mu)
        w.emplace(Word::parse(k), v);
    return ProbMeasure(std::move(w));
}

std::string RunConfig::param(const std::string& key, const std::string& fallback) const
{
    const auto it = params.find(key);
    return it == params.end() ? fallback : it->second;
}

std::optional<std::string> RunConfig::param(const std::string& key) const
{
    const auto it = params.find(key);
    if (it == params.end())
        return std::nullopt;
    return it->second;
}

void set_value(RunConfig& cfg, const std::string& key, const std::string& value, std::size_t line)
{
    if (key == "q")
        cfg.q = parse_number<double>(key, value, line);
    else if (key == "seed")
        cfg.seed = parse_number<std::uint64_t>(key, value, line);
    else if (key == "workers")
        cfg.workers = parse_number<std::size_t>(key, value, line);
    else if (key == "tolerance_scale")
        cfg.tolerance_scale = parse_number<double>(key, value, line);
    else if (key == "format")
        cfg.format = value;
    else if (key == "out_dir")
        cfg.out_dir = value;
    else if (key == "mu") {
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(value);
        } catch (const nlohmann::json::exception& e) {
            throw config_error("mu: " + std::string(e.what()), line);
        }
        if (!j.is_object() || j.empty())
            throw config_error("mu must be a non-empty object of word -> weight", line);
        cfg.mu.clear();
        for (const auto& [w, v] : j.items()) {
            if (!v.is_number())
                throw config_error("mu[" + w + "] is not a number", line);
            try {
                Word::parse(w);
            } catch (const std::exception&) {
                throw config_error("mu: '" + w + "' is not a word over {a, b}", line);
            }
            cfg.mu[w] = v.get<double>();
        }
    } else if (key == "budgets") {
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(value);
        } catch (const nlohmann::json::exception& e) {
            throw config_error("budgets: " + std::string(e.what()), line);
        }
        if (!j.is_object())
            throw config_error("budgets must be an object", line);
        for (const auto& [k, v] : j.items()) {
            auto& b = cfg.budgets;
            if (k == "strands")
                b.strands = parse_count(k, v, line);
            else if (k == "radius")
                b.radius = parse_count(k, v, line);
            else if (k == "horizon")
                b.horizon = parse_count(k, v, line);
            else if (k == "samples")
                b.samples = parse_count(k, v, line);
            else if (k == "max_steps")
                b.max_steps = parse_count(k, v, line);
            else if (k == "stable_steps")
                b.stable_steps = parse_count(k, v, line);
            else
                throw config_error("unknown budget '" + k + "'", line);
        }
    } else if (std::find(parameter_keys().begin(), parameter_keys().end(), key) != parameter_keys().end())
        cfg.params[key] = value;
    else
        throw config_error("unknown key '" + key + "'", line);
}

RunConfig parse_config(const std::string& text)
{
    RunConfig cfg;
    std::istringstream in(text);
    std::string raw;
    for (std::size_t line = 1; std::getline(in, raw); ++line) {
        const std::string s = trim(raw.substr(0, raw.find('#')));
        if (s.empty())
            continue;
        const auto eq = s.find('=');
        if (eq == std::string::npos)
            throw config_error("expected 'key = value'", line);
        const std::string key = trim(s.substr(0, eq));
        if (key.empty())
            throw config_error("missing key", line);
        set_value(cfg, key, trim(s.substr(eq + 1)), line);
    }
    return cfg;
}

RunConfig load_config(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw config_error("cannot read config file " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

void validate(RunConfig& cfg)
{
    if (!(cfg.q > 0.0 && cfg.q < 1.0))
        throw config_error("q must lie in the open interval (0,1), got " + std::to_string(cfg.q));
    if (cfg.workers == 0)
        throw config_error("workers must be positive");
    if (cfg.format != "csv" && cfg.format != "jsonl")
        throw config_error("format must be csv or jsonl");
    if (!(cfg.tolerance_scale > 0.0))
        throw config_error("tolerance_scale must be positive");
    double sum = 0.0;
    for (const auto& [w, v] : cfg.mu) {
        if (!(v > 0.0))
            throw config_error("mu[" + w + "] must be positive");
        sum += v;
    }
    if (std::abs(sum - 1.0) > 1e-3)
        throw config_error("mu sums to " + std::to_string(sum) + ", beyond tolerance 1e-3 of 1");
    if (std::abs(sum - 1.0) > 1e-9) {
        cfg.warnings.push_back("mu sums to " + std::to_string(sum) + "; normalized");
        for (auto& [w, v] : cfg.mu)
            v /= sum;
    }
    // canonical spelling of mu words
    std::map<std::string, double> mu;
    for (const auto& [w, v] : cfg.mu)
        mu[Word::parse(w).display()] += v;
    cfg.mu = std::move(mu);
}

std::string canonical(const RunConfig& cfg, const std::string& command)
{
    // workers, format and out_dir never change the data
    nlohmann::json j;
    j["command"] = command;
    j["q"] = cfg.q;
    j["mu"] = cfg.mu;
    j["seed"] = cfg.seed;
    j["tolerance_scale"] = cfg.tolerance_scale;
    const auto& b = cfg.budgets;
    j["budgets"] = {{"strands", b.strands},   {"radius", b.radius},       {"horizon", b.horizon},
                    {"samples", b.samples},   {"max_steps", b.max_steps}, {"stable_steps", b.stable_steps}};
    j["params"] = cfg.params;
    return j.dump();
}

std::string digest(const RunConfig& cfg, const std::string& command)
{
    char buf[17];
    const auto [ptr, ec] = std::to_chars(buf, buf + 16, fnv1a(canonical(cfg, command)), 16);
    std::string hex(buf, ptr);
    return std::string(16 - hex.size(), '0') + hex;
}

} // namespace freewalk::cli
