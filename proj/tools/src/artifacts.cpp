#include "artifacts.hpp"

#include "uzawa/dual/trace_io.hpp"
#include "uzawa/version.hpp"

#include <Eigen/Core>

#include <cstdio>
#include <ctime>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace uzawa::cli {

namespace {

std::string join(const std::vector<std::string>& parts) {
  std::string s;
  for (std::size_t i = 0; i < parts.size(); ++i) s += (i ? "," : "") + parts[i];
  return s;
}

std::string utc(std::chrono::system_clock::time_point t) {
  const std::time_t tt = std::chrono::system_clock::to_time_t(t);
  std::tm tm{};
  gmtime_r(&tt, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

double Settings::number(const std::string& section, const std::string& key, double fallback) {
  const double v = config_.get_double(section, key, fallback);
  snapshot_.set(section, key, format_number(v));
  return v;
}

std::uint64_t Settings::count(const std::string& section, const std::string& key, std::uint64_t fallback) {
  const auto v = config_.get_u64(section, key, fallback);
  snapshot_.set(section, key, std::to_string(v));
  return v;
}

bool Settings::flag(const std::string& section, const std::string& key, bool fallback) {
  const bool v = config_.get_bool(section, key, fallback);
  snapshot_.set(section, key, v ? "true" : "false");
  return v;
}

std::string Settings::text(const std::string& section, const std::string& key, const std::string& fallback) {
  auto v = config_.get_string(section, key, fallback);
  snapshot_.set(section, key, v);
  return v;
}

std::vector<double> Settings::numbers(const std::string& section, const std::string& key,
                                      const std::vector<double>& fallback) {
  auto v = config_.get_doubles(section, key, fallback);
  std::vector<std::string> parts;
  for (double x : v) parts.push_back(format_number(x));
  snapshot_.set(section, key, join(parts));
  return v;
}

std::vector<std::uint64_t> Settings::counts(const std::string& section, const std::string& key,
                                            const std::vector<std::uint64_t>& fallback) {
  auto v = config_.has(section, key) ? config_.get_u64s(section, key) : fallback;
  std::vector<std::string> parts;
  for (auto x : v) parts.push_back(std::to_string(x));
  snapshot_.set(section, key, join(parts));
  return v;
}

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

void write_atomic(const std::filesystem::path& path, const std::string& contents) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
    out << contents;
    if (!out.flush()) throw std::runtime_error("error writing " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

ArtifactDir::ArtifactDir(std::filesystem::path dir) : dir_(std::move(dir)), started_(std::chrono::system_clock::now()) {
  std::filesystem::create_directories(dir_);
}

void ArtifactDir::write(const std::string& name, const std::string& contents) {
  write_atomic(dir_ / name, contents);
  outputs_.push_back({name, contents.size(), fnv1a64(contents)});
}

void ArtifactDir::adopt(const std::string& name) {
  const auto bytes = read_file(dir_ / name);
  outputs_.push_back({name, bytes.size(), fnv1a64(bytes)});
}

void ArtifactDir::finish(const std::string& command, const std::vector<std::string>& command_line,
                         const Config& snapshot, std::uint64_t seed) {
  nlohmann::ordered_json j;
  j["command"] = command;
  j["command_line"] = command_line;
  j["config_hash"] = hex64(fnv1a64(snapshot.canonical()));
  j["seed"] = seed;
  j["versions"] = {{"uzawa", kVersion},
                   {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
                                 std::to_string(EIGEN_MINOR_VERSION)},
                   {"compiler", __VERSION__}};
  j["started"] = utc(started_);
  j["finished"] = utc(std::chrono::system_clock::now());
  auto files = nlohmann::ordered_json::array();
  for (const auto& o : outputs_) files.push_back({{"file", o.name}, {"bytes", o.bytes}, {"fnv1a64", hex64(o.hash)}});
  j["outputs"] = files;
  write_atomic(dir_ / "manifest.json", j.dump(2) + "\n");
}

}  // namespace uzawa::cli
