#include "emit.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <system_error>

#include <json.hpp>

namespace freewalk::cli {

namespace fs = std::filesystem;

void Table::add(std::vector<Cell> row)
{
    if (row.size() != columns.size())
        throw std::logic_error("table " + name + ": row has " + std::to_string(row.size()) + " cells, expected "
                               + std::to_string(columns.size()));
    rows.push_back(std::move(row));
}

std::string format_double(double v)
{
    if (std::isnan(v))
        return "nan";
    if (std::isinf(v))
        return v > 0 ? "inf" : "-inf";
    char buf[64];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
}

std::string format_cell(const Cell& c)
{
    return std::visit(
        [](const auto& v) -> std::string {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, std::string>)
                return v;
            else if constexpr (std::is_same_v<T, double>)
                return format_double(v);
            else if constexpr (std::is_same_v<T, bool>)
                return v ? "true" : "false";
            else
                return std::to_string(v);
        },
        c);
}

namespace {

std::string csv_field(const std::string& s)
{
    if (s.find_first_of(",\"\n\r") == std::string::npos)
        return s;
    std::string out = "\"";
    for (char ch : s) {
        if (ch == '"')
            out += '"';
        out += ch;
    }
    return out + "\"";
}

nlohmann::ordered_json json_cell(const Cell& c)
{
    return std::visit(
        [](const auto& v) -> nlohmann::ordered_json {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, double>) {
                if (!std::isfinite(v))
                    return format_double(v);
            }
            return v;
        },
        c);
}

void write_atomically(const fs::path& path, const std::string& content)
{
    const fs::path tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary);
        if (!out)
            throw std::runtime_error("cannot write " + tmp.string());
        out << content;
        out.close();
        if (!out)
            throw std::runtime_error("failed writing " + tmp.string());
    }
    std::error_code ec;
    fs::rename(tmp, path, ec);
    if (ec) {
        fs::remove(tmp);
        throw std::runtime_error("cannot move " + tmp.string() + " to " + path.string() + ": " + ec.message());
    }
}

std::string render_csv(const Envelope& env, const Table& t)
{
    std::ostringstream out;
    out << "# tool=freewalk version=" << env.version << " command=" << env.command << " table=" << t.name
        << " digest=" << env.digest << "\n";
    for (std::size_t i = 0; i < t.columns.size(); ++i)
        out << (i ? "," : "") << csv_field(t.columns[i]);
    out << "\n";
    for (const auto& row : t.rows) {
        for (std::size_t i = 0; i < row.size(); ++i)
            out << (i ? "," : "") << csv_field(format_cell(row[i]));
        out << "\n";
    }
    return out.str();
}

std::string render_jsonl(const Envelope& env, const Table& t)
{
    std::ostringstream out;
    nlohmann::ordered_json header;
    header["tool"] = "freewalk";
    header["version"] = env.version;
    header["command"] = env.command;
    header["table"] = t.name;
    header["digest"] = env.digest;
    header["columns"] = t.columns;
    out << nlohmann::ordered_json{{"header", header}}.dump() << "\n";
    for (const auto& row : t.rows) {
        nlohmann::ordered_json j;
        for (std::size_t i = 0; i < row.size(); ++i)
            j[t.columns[i]] = json_cell(row[i]);
        out << j.dump() << "\n";
    }
    return out.str();
}

} // namespace

std::vector<fs::path> emit(const Envelope& env, const std::string& format, const fs::path& out_dir)
{
    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (ec)
        throw std::runtime_error("cannot create output directory " + out_dir.string() + ": " + ec.message());
    std::vector<fs::path> files;
    const std::string ext = format == "jsonl" ? ".jsonl" : ".csv";
    for (const auto& t : env.tables) {
        const fs::path path = out_dir / (env.command + "." + t.name + ext);
        write_atomically(path, format == "jsonl" ? render_jsonl(env, t) : render_csv(env, t));
        files.push_back(path);
    }
    nlohmann::ordered_json j;
    j["tool"] = "freewalk";
    j["version"] = env.version;
    j["command"] = env.command;
    j["digest"] = env.digest;
    j["wall_seconds"] = env.wall_seconds;
    j["check_failed"] = env.check_failed;
    j["messages"] = env.messages;
    j["files"] = nlohmann::ordered_json::array();
    for (const auto& f : files)
        j["files"].push_back(f.filename().string());
    write_atomically(out_dir / (env.command + ".envelope.json"), j.dump(2) + "\n");
    return files;
}

} // namespace freewalk::cli
