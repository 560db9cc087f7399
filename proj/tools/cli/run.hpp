#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "config.hpp"

namespace confgeo::cli {

inline constexpr const char* kToolName = "confgeo";
inline constexpr const char* kToolVersion = "1.0.0";

enum class Command { Invariant, Frame, MobiusApply, Equivalence, LemmaCheck };

/// Exit classes: a refusal means a hypothesis of the rigidity theorem does
/// not hold, which is different from a computation that failed.
enum ExitCode : int { kSuccess = 0, kError = 1, kRefusal = 2 };

std::optional<Command> command_from_name(const std::string& name);
const char* command_name(Command c);

struct RunOptions {
  std::uint64_t seed = 0;
  bool timestamp = true;
};

struct RunResult {
  Json record;
  int exit_code = kSuccess;
};

/// Executes one command. Module errors at grid points are collected into
/// the record's "errors" list with their grid index and parameters.
RunResult run(Command command, const RunConfig& config, const RunOptions& options);

/// Record for a configuration that could not be read.
RunResult config_failure(Command command, const ConfigError& error, const RunOptions& options);

}  // namespace confgeo::cli
