#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <vector>

#include <json.hpp>

#include "samplenet/run_config.hpp"

namespace samplenet::commands {

/// Exit codes shared by every subcommand.
enum ExitCode : int {
  kSuccess = 0,
  kValidation = 1,
  kNumerical = 2,
  kIo = 3,
};

/// Output sink for human-readable progress; null when --quiet.
struct Console {
  std::ostream* out = nullptr;
};

/// Each command writes its files under config.output.dir and returns the
/// JSON document it wrote (or would have written with summary output off).
/// Errors propagate as exceptions; see exit_code_for_current_exception.
nlohmann::json cmd_gaussian(const RunConfig& config, Console console);
nlohmann::json cmd_binary_edge(const RunConfig& config, Console console);
nlohmann::json cmd_diagnostics(const RunConfig& config, Console console);

/// Canned configurations for the two reproduction runs.
RunConfig fig1_config();
RunConfig fig2_config(TopologyKind kind);

nlohmann::json cmd_repro_fig1(const RunConfig& config, Console console);
/// Runs clique(7) and cycle(7) with the output settings of `base`.
nlohmann::json cmd_repro_fig2(const RunConfig& base, Console console);

/// Maps the current exception to an exit code; call inside a catch block.
int exit_code_for_current_exception();

}  // namespace samplenet::commands
