#pragma once

#include <filesystem>
#include <string>

#include "samplenet/run_config.hpp"

namespace samplenet {

/// Parses a YAML run description. Unknown keys are rejected by their full
/// dotted path; syntax errors report the line number. The result is
/// validated.
RunConfig parse_config(const std::string& text);

/// parse_config on the contents of `path`. Throws IoError if unreadable.
RunConfig load_config(const std::filesystem::path& path);

}  // namespace samplenet
