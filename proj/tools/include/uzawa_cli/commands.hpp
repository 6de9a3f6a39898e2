#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace uzawa::cli {

enum ExitCode : int { kSuccess = 0, kSolverFailure = 1, kConfigError = 2 };

/// Flags shared by the subcommands. Unset values fall back to the config file,
/// then to built-in defaults.
struct RunOptions {
  std::optional<std::filesystem::path> config;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> iterations;
  std::optional<std::size_t> workers;
  std::optional<std::filesystem::path> out;
  std::optional<std::string> sigma;     // comma separated, tcl only
  std::optional<std::string> schedule;  // "a=1,b=10"
  /// Recorded in the manifest.
  std::vector<std::string> command_line;
};

int cmd_toy(const RunOptions& options, std::ostream& out, std::ostream& err);
int cmd_lqg(const RunOptions& options, std::ostream& out, std::ostream& err);
int cmd_tcl(const RunOptions& options, std::ostream& out, std::ostream& err);

/// Parses `uzawa <toy|lqg|tcl> [flags]` and dispatches.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace uzawa::cli
