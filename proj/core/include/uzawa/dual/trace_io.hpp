#pragma once

#include "uzawa/dual/trace.hpp"

#include <cstdint>
#include <filesystem>
#include <string>

namespace uzawa {

struct TraceMetadata {
  std::uint64_t seed = 0;
  double schedule_a = 0.0;
  double schedule_b = 0.0;
  std::string variant;
  std::uint64_t instance_hash = 0;
};

/// Columns `k,rho_k,channel,slot,lambda,Y`; the final price is written with
/// k = K and empty rho_k/Y.
void write_trace_csv(const DualTrace& trace, const std::filesystem::path& path);
/// JSON sidecar with seed, schedule, variant, iteration count and instance hash.
void write_trace_metadata(const DualTrace& trace, const TraceMetadata& meta, const std::filesystem::path& path);

/// Shortest round-trip decimal form used in every CSV.
std::string format_number(double v);

}  // namespace uzawa
