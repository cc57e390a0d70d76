#pragma once

#include <string>
#include <vector>

#include "config.hpp"
#include "emit.hpp"

namespace freewalk::cli {

const std::vector<std::string>& command_names();

/// Runs one command. Throws config_error for bad parameters; check failures
/// set Envelope::check_failed.
Envelope dispatch(const std::string& command, const RunConfig& cfg);

} // namespace freewalk::cli
