#include <cstdlib>
#include <iostream>
#include <map>
#include <optional>

#include <CLI11.hpp>
#include <json.hpp>

#include "commands.hpp"
#include "config.hpp"
#include "emit.hpp"
#include "freewalk/errors.hpp"

using namespace freewalk;
using namespace freewalk::cli;

namespace {

void error_record(const std::string& kind, const std::string& message, std::size_t line = 0)
{
    nlohmann::ordered_json j{{"error", kind}, {"message", message}};
    if (line)
        j["line"] = line;
    std::cerr << j.dump() << '\n';
}

std::string flag_name(std::string key)
{
    for (char& c : key)
        if (c == '_')
            c = '-';
    return "--" + key;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Random walks on the free fusion ring of O+_F, classical and quantum boundary checks"};
    app.set_version_flag("--version", tool_version);

    std::string command, config_path;
    std::optional<std::string> q, mu, seed, workers, format, out_dir, tolerance_scale;
    std::optional<std::size_t> samples, max_steps, stable_steps, radius, strands, horizon;
    std::map<std::string, std::optional<std::string>> params;

    std::string names;
    for (const auto& n : command_names())
        names += (names.empty() ? "" : ", ") + n;
    app.add_option("command", command, "one of: " + names)->required();
    app.add_option("--config", config_path, "key = value file");
    app.add_option("--q", q, "deformation parameter in (0, 1)");
    app.add_option("--mu", mu, "measure as JSON, e.g. {\"a\":0.5,\"b\":0.5}");
    app.add_option("--seed", seed);
    app.add_option("--workers", workers);
    app.add_option("--format", format, "csv or jsonl");
    app.add_option("--out-dir", out_dir);
    app.add_option("--tolerance-scale", tolerance_scale);
    app.add_option("--samples", samples);
    app.add_option("--max-steps", max_steps);
    app.add_option("--stable-steps", stable_steps);
    app.add_option("--radius", radius);
    app.add_option("--strands", strands);
    app.add_option("--horizon", horizon);
    for (const auto& key : parameter_keys())
        app.add_option(flag_name(key), params[key]);

    try {
        app.parse(argc, argv);
    } catch (const CLI::Success& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        error_record("usage", e.what());
        return 2;
    }

    try {
        RunConfig cfg = config_path.empty() ? RunConfig{} : load_config(config_path);
        const auto set = [&](const char* key, const std::optional<std::string>& v) {
            if (v)
                set_value(cfg, key, *v);
        };
        set("q", q);
        set("mu", mu);
        set("seed", seed);
        set("workers", workers);
        set("format", format);
        set("out_dir", out_dir);
        set("tolerance_scale", tolerance_scale);
        for (const auto& [key, v] : params)
            set(key.c_str(), v);
        auto& b = cfg.budgets;
        for (auto [flag, slot] : {std::pair{&samples, &b.samples}, {&max_steps, &b.max_steps},
                                  {&stable_steps, &b.stable_steps}, {&radius, &b.radius},
                                  {&strands, &b.strands}, {&horizon, &b.horizon}})
            if (*flag)
                *slot = **flag;
        if (const char* env = std::getenv("FREEWALK_OUT"); env && *env)
            cfg.out_dir = env;
        validate(cfg);
        for (const auto& w : cfg.warnings)
            std::cerr << nlohmann::json{{"warning", w}}.dump() << '\n';

        const Envelope env = dispatch(command, cfg);
        for (const auto& path : emit(env, cfg.format, cfg.out_dir))
            std::cout << path.string() << '\n';
        if (env.check_failed) {
            std::cerr << nlohmann::json{{"check", command}, {"result", "fail"}}.dump() << '\n';
            return 1;
        }
        return 0;
    } catch (const config_error& e) {
        error_record("config", e.what(), e.line());
        return 2;
    } catch (const resource_error& e) {
        error_record("budget", e.what());
        return 2;
    } catch (const std::domain_error& e) {
        error_record("domain", e.what());
        return 2;
    } catch (const std::exception& e) {
        error_record("runtime", e.what());
        return 1;
    }
}
