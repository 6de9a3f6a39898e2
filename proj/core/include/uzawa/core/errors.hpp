#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace uzawa {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An oracle was asked for a capability it does not provide
/// (e.g. exact expectations of an agent without a closed form).
class CapabilityError : public Error {
 public:
  using Error::Error;
};

/// Malformed or incomplete configuration. Carries the offending section/key
/// and, when known, the 1-based line number in the source text.
class ConfigError : public Error {
 public:
  ConfigError(std::string section, std::string key, std::size_t line, const std::string& what)
      : Error(what), section_(std::move(section)), key_(std::move(key)), line_(line) {}

  const std::string& section() const noexcept { return section_; }
  const std::string& key() const noexcept { return key_; }
  std::size_t line() const noexcept { return line_; }

 private:
  std::string section_;
  std::string key_;
  std::size_t line_ = 0;
};

}  // namespace uzawa
