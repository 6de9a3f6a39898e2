#pragma once

#include "uzawa/core/errors.hpp"

#include <cstdint>
#include <filesystem>
#include <initializer_list>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace uzawa {

/// Sectioned key=value configuration text.
///
///   # comment
///   [schedule]
///   a = 1.0
///   b = 10     ; trailing comments allowed
///
/// Keys are unique per section. Lists are comma separated. Every accessor
/// throws ConfigError naming the section, key and line on failure.
class Config {
 public:
  static Config parse(const std::string& text, const std::string& source = "<string>");
  static Config load(const std::filesystem::path& path);

  bool has_section(const std::string& section) const;
  bool has(const std::string& section, const std::string& key) const;

  /// Throws ConfigError if the section is absent.
  void require_section(const std::string& section) const;
  /// Throws ConfigError on keys of `section` not listed in `known`.
  void check_keys(const std::string& section, std::initializer_list<const char*> known) const;

  std::string get_string(const std::string& section, const std::string& key) const;
  double get_double(const std::string& section, const std::string& key) const;
  std::int64_t get_int(const std::string& section, const std::string& key) const;
  std::uint64_t get_u64(const std::string& section, const std::string& key) const;
  bool get_bool(const std::string& section, const std::string& key) const;
  std::vector<double> get_doubles(const std::string& section, const std::string& key) const;
  std::vector<std::uint64_t> get_u64s(const std::string& section, const std::string& key) const;

  std::string get_string(const std::string& section, const std::string& key, const std::string& fallback) const;
  double get_double(const std::string& section, const std::string& key, double fallback) const;
  std::int64_t get_int(const std::string& section, const std::string& key, std::int64_t fallback) const;
  std::uint64_t get_u64(const std::string& section, const std::string& key, std::uint64_t fallback) const;
  bool get_bool(const std::string& section, const std::string& key, bool fallback) const;
  std::vector<double> get_doubles(const std::string& section, const std::string& key,
                                  const std::vector<double>& fallback) const;

  /// Overrides (or adds) a value, e.g. from a command-line flag.
  void set(const std::string& section, const std::string& key, const std::string& value);

  /// Canonical text: sections and keys sorted, one `key = value` per line.
  std::string canonical() const;
  const std::string& source() const noexcept { return source_; }

 private:
  struct Entry {
    std::string value;
    std::size_t line = 0;
  };
  const Entry& entry(const std::string& section, const std::string& key) const;

  std::string source_;
  std::map<std::string, std::map<std::string, Entry>> sections_;
  std::map<std::string, std::size_t> section_lines_;
};

/// 64-bit FNV-1a.
std::uint64_t fnv1a64(const std::string& bytes) noexcept;

}  // namespace uzawa
