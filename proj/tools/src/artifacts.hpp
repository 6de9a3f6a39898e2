#pragma once

#include "uzawa/core/config.hpp"

#include <json.hpp>

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <initializer_list>
#include <string>
#include <vector>

namespace uzawa::cli {

/// Reads typed values with defaults and records every resolved value, so the
/// snapshot alone reproduces the run.
class Settings {
 public:
  explicit Settings(Config config) : config_(std::move(config)) {}

  double number(const std::string& section, const std::string& key, double fallback);
  std::uint64_t count(const std::string& section, const std::string& key, std::uint64_t fallback);
  bool flag(const std::string& section, const std::string& key, bool fallback);
  std::string text(const std::string& section, const std::string& key, const std::string& fallback);
  std::vector<double> numbers(const std::string& section, const std::string& key,
                              const std::vector<double>& fallback);
  std::vector<std::uint64_t> counts(const std::string& section, const std::string& key,
                                    const std::vector<std::uint64_t>& fallback);

  const Config& config() const noexcept { return config_; }
  const Config& snapshot() const noexcept { return snapshot_; }

 private:
  Config config_;
  Config snapshot_;
};

/// Output directory with a manifest of every file written through it.
class ArtifactDir {
 public:
  explicit ArtifactDir(std::filesystem::path dir);

  /// Writes via a temporary file and rename.
  void write(const std::string& name, const std::string& contents);
  /// Records a file already written into the directory.
  void adopt(const std::string& name);

  /// Writes manifest.json last, atomically.
  void finish(const std::string& command, const std::vector<std::string>& command_line, const Config& snapshot,
              std::uint64_t seed);

  const std::filesystem::path& path() const noexcept { return dir_; }

 private:
  struct Output {
    std::string name;
    std::uintmax_t bytes = 0;
    std::uint64_t hash = 0;
  };
  std::filesystem::path dir_;
  std::vector<Output> outputs_;
  std::chrono::system_clock::time_point started_;
};

std::string hex64(std::uint64_t v);
void write_atomic(const std::filesystem::path& path, const std::string& contents);

}  // namespace uzawa::cli
