#include "uzawa/core/config.hpp"

#include "uzawa/core/errors.hpp"

#include <algorithm>
#include <cctype>
#include <cerrno>
#include <charconv>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace uzawa {

namespace {

std::string trim(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

std::string strip_comment(const std::string& line) {
  for (std::size_t i = 0; i < line.size(); ++i) {
    if (line[i] == '#' || line[i] == ';') return line.substr(0, i);
  }
  return line;
}

std::vector<std::string> split_list(const std::string& v) {
  std::vector<std::string> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(trim(item));
  return out;
}

}  // namespace

Config Config::parse(const std::string& text, const std::string& source) {
  Config cfg;
  cfg.source_ = source;
  std::istringstream in(text);
  std::string raw;
  std::string section;
  std::size_t lineno = 0;
  while (std::getline(in, raw)) {
    ++lineno;
    const std::string line = trim(strip_comment(raw));
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError("", "", lineno, source + ":" + std::to_string(lineno) + ": unterminated section header");
      section = trim(std::string_view(line).substr(1, line.size() - 2));
      if (section.empty()) throw ConfigError("", "", lineno, source + ":" + std::to_string(lineno) + ": empty section name");
      cfg.sections_[section];
      cfg.section_lines_.emplace(section, lineno);
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ConfigError(section, "", lineno, source + ":" + std::to_string(lineno) + ": expected key = value");
    }
    if (section.empty()) {
      throw ConfigError("", "", lineno, source + ":" + std::to_string(lineno) + ": key outside of any section");
    }
    const std::string key = trim(std::string_view(line).substr(0, eq));
    const std::string value = trim(std::string_view(line).substr(eq + 1));
    if (key.empty()) throw ConfigError(section, "", lineno, source + ":" + std::to_string(lineno) + ": empty key");
    auto& sec = cfg.sections_[section];
    if (sec.count(key)) {
      throw ConfigError(section, key, lineno,
                        source + ":" + std::to_string(lineno) + ": duplicate key [" + section + "] " + key);
    }
    sec.emplace(key, Entry{value, lineno});
  }
  return cfg;
}

Config Config::load(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw ConfigError("", "", 0, "cannot open config file " + path.string());
  std::stringstream ss;
  ss << f.rdbuf();
  return parse(ss.str(), path.string());
}

bool Config::has_section(const std::string& section) const { return sections_.count(section) > 0; }

bool Config::has(const std::string& section, const std::string& key) const {
  auto it = sections_.find(section);
  return it != sections_.end() && it->second.count(key) > 0;
}

void Config::require_section(const std::string& section) const {
  if (!has_section(section)) {
    throw ConfigError(section, "", 0, source_ + ": missing section [" + section + "]");
  }
}

void Config::check_keys(const std::string& section, std::initializer_list<const char*> known) const {
  auto it = sections_.find(section);
  if (it == sections_.end()) return;
  for (const auto& [key, e] : it->second) {
    bool ok = std::any_of(known.begin(), known.end(), [&](const char* k) { return key == k; });
    if (!ok) {
      throw ConfigError(section, key, e.line,
                        source_ + ":" + std::to_string(e.line) + ": unknown key [" + section + "] " + key);
    }
  }
}

const Config::Entry& Config::entry(const std::string& section, const std::string& key) const {
  auto it = sections_.find(section);
  if (it == sections_.end()) {
    throw ConfigError(section, key, 0, source_ + ": missing section [" + section + "] (needed for key " + key + ")");
  }
  auto kt = it->second.find(key);
  if (kt == it->second.end()) {
    auto lt = section_lines_.find(section);
    const std::size_t line = lt == section_lines_.end() ? 0 : lt->second;
    throw ConfigError(section, key, line, source_ + ": missing key [" + section + "] " + key);
  }
  return kt->second;
}

namespace {

[[noreturn]] void bad_value(const std::string& source, const std::string& section, const std::string& key,
                            std::size_t line, const std::string& value, const char* expected) {
  throw ConfigError(section, key, line,
                    source + ":" + std::to_string(line) + ": [" + section + "] " + key + " = '" + value +
                        "' is not " + expected);
}

bool parse_double(const std::string& s, double& out) {
  if (s.empty()) return false;
  errno = 0;
  char* end = nullptr;
  out = std::strtod(s.c_str(), &end);
  return end == s.c_str() + s.size() && errno != ERANGE;
}

template <class T>
bool parse_integer(const std::string& s, T& out) {
  if (s.empty()) return false;
  int base = 10;
  std::string_view v(s);
  if (v.size() > 2 && v[0] == '0' && (v[1] == 'x' || v[1] == 'X')) {
    base = 16;
    v.remove_prefix(2);
  }
  auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out, base);
  return ec == std::errc() && p == v.data() + v.size();
}

}  // namespace

std::string Config::get_string(const std::string& section, const std::string& key) const {
  return entry(section, key).value;
}

double Config::get_double(const std::string& section, const std::string& key) const {
  const auto& e = entry(section, key);
  double v = 0.0;
  if (!parse_double(e.value, v)) bad_value(source_, section, key, e.line, e.value, "a number");
  return v;
}

std::int64_t Config::get_int(const std::string& section, const std::string& key) const {
  const auto& e = entry(section, key);
  std::int64_t v = 0;
  if (!parse_integer(e.value, v)) bad_value(source_, section, key, e.line, e.value, "an integer");
  return v;
}

std::uint64_t Config::get_u64(const std::string& section, const std::string& key) const {
  const auto& e = entry(section, key);
  std::uint64_t v = 0;
  if (!parse_integer(e.value, v)) bad_value(source_, section, key, e.line, e.value, "an unsigned integer");
  return v;
}

bool Config::get_bool(const std::string& section, const std::string& key) const {
  const auto& e = entry(section, key);
  std::string v = e.value;
  std::transform(v.begin(), v.end(), v.begin(), [](unsigned char c) { return std::tolower(c); });
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  bad_value(source_, section, key, e.line, e.value, "a boolean");
}

std::vector<double> Config::get_doubles(const std::string& section, const std::string& key) const {
  const auto& e = entry(section, key);
  std::vector<double> out;
  for (const auto& item : split_list(e.value)) {
    double v = 0.0;
    if (!parse_double(item, v)) bad_value(source_, section, key, e.line, e.value, "a list of numbers");
    out.push_back(v);
  }
  return out;
}

std::vector<std::uint64_t> Config::get_u64s(const std::string& section, const std::string& key) const {
  const auto& e = entry(section, key);
  std::vector<std::uint64_t> out;
  for (const auto& item : split_list(e.value)) {
    std::uint64_t v = 0;
    if (!parse_integer(item, v)) bad_value(source_, section, key, e.line, e.value, "a list of unsigned integers");
    out.push_back(v);
  }
  return out;
}

std::string Config::get_string(const std::string& section, const std::string& key, const std::string& fallback) const {
  return has(section, key) ? get_string(section, key) : fallback;
}
double Config::get_double(const std::string& section, const std::string& key, double fallback) const {
  return has(section, key) ? get_double(section, key) : fallback;
}
std::int64_t Config::get_int(const std::string& section, const std::string& key, std::int64_t fallback) const {
  return has(section, key) ? get_int(section, key) : fallback;
}
std::uint64_t Config::get_u64(const std::string& section, const std::string& key, std::uint64_t fallback) const {
  return has(section, key) ? get_u64(section, key) : fallback;
}
bool Config::get_bool(const std::string& section, const std::string& key, bool fallback) const {
  return has(section, key) ? get_bool(section, key) : fallback;
}
std::vector<double> Config::get_doubles(const std::string& section, const std::string& key,
                                        const std::vector<double>& fallback) const {
  return has(section, key) ? get_doubles(section, key) : fallback;
}

void Config::set(const std::string& section, const std::string& key, const std::string& value) {
  auto& sec = sections_[section];
  section_lines_.emplace(section, 0);
  auto it = sec.find(key);
  if (it == sec.end()) {
    sec.emplace(key, Entry{value, 0});
  } else {
    it->second.value = value;
  }
}

std::string Config::canonical() const {
  std::string out;
  for (const auto& [name, keys] : sections_) {
    out += "[" + name + "]\n";
    for (const auto& [k, e] : keys) out += k + " = " + e.value + "\n";
  }
  return out;
}

std::uint64_t fnv1a64(const std::string& bytes) noexcept {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace uzawa
