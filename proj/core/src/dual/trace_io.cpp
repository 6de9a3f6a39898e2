#include "uzawa/dual/trace_io.hpp"

#include <json.hpp>

#include <charconv>
#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace uzawa {

std::string format_number(double v) {
  char buf[64];
  auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
  if (ec != std::errc()) throw std::runtime_error("format_number failed");
  return std::string(buf, p);
}

void write_trace_csv(const DualTrace& trace, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << "k,rho_k,channel,slot,lambda,Y\n";
  for (const auto& it : trace.iterates) {
    const auto& ch = it.lambda.channels();
    for (std::size_t c = 0; c < it.lambda.channel_count(); ++c) {
      for (std::size_t s = 0; s < it.lambda.slot_count(); ++s) {
        out << it.k << ',' << format_number(it.rho) << ',' << ch[c] << ',' << s << ','
            << format_number(it.lambda(c, s)) << ',' << format_number(it.gradient(c, s)) << '\n';
      }
    }
  }
  const auto& f = trace.final_price;
  for (std::size_t c = 0; c < f.channel_count(); ++c) {
    for (std::size_t s = 0; s < f.slot_count(); ++s) {
      out << trace.iterations << ",," << f.channels()[c] << ',' << s << ',' << format_number(f(c, s)) << ",\n";
    }
  }
  if (!out) throw std::runtime_error("error writing " + path.string());
}

void write_trace_metadata(const DualTrace& trace, const TraceMetadata& meta, const std::filesystem::path& path) {
  nlohmann::ordered_json j;
  j["seed"] = meta.seed;
  j["schedule"] = {{"a", meta.schedule_a}, {"b", meta.schedule_b}};
  j["variant"] = meta.variant;
  j["iterations"] = trace.iterations;
  j["thinning"] = trace.thinning;
  j["channels"] = trace.final_price.channels();
  j["slots"] = trace.final_price.slot_count();
  char hex[17];
  std::snprintf(hex, sizeof hex, "%016llx", static_cast<unsigned long long>(meta.instance_hash));
  j["instance_hash"] = hex;
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << j.dump(2) << '\n';
}

}  // namespace uzawa
