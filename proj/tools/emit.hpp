#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <variant>
#include <vector>

namespace freewalk::cli {

inline constexpr const char* tool_version = "0.1.0";

using Cell = std::variant<std::string, double, std::int64_t, bool>;

struct Table {
    std::string name;
    std::vector<std::string> columns;
    std::vector<std::vector<Cell>> rows;

    void add(std::vector<Cell> row);
};

struct Envelope {
    std::string command;
    std::string digest;
    std::string version = tool_version;
    double wall_seconds = 0.0;
    std::vector<Table> tables;
    bool check_failed = false;
    std::vector<std::string> messages;
};

std::string format_double(double v);
std::string format_cell(const Cell& c);

/// Writes one data file per table plus `<command>.envelope.json`, each via a
/// temporary file renamed into place. Returns the data file paths.
std::vector<std::filesystem::path> emit(const Envelope& env, const std::string& format,
                                        const std::filesystem::path& out_dir);

} // namespace freewalk::cli
