#pragma once

#include <array>
#include <cstdint>
#include <limits>
#include <random>

namespace uzawa {

/// Philox4x64-10 block function.
/// Maps a 256-bit counter and 128-bit key to 256 pseudo-random bits.
std::array<std::uint64_t, 4> philox4x64(std::array<std::uint64_t, 4> counter,
                                        std::array<std::uint64_t, 2> key) noexcept;

/// Purpose tags keep streams used for different jobs disjoint.
enum class StreamTag : std::uint64_t {
  AgentNoise = 1,
  AgentSampling = 2,
  DualEstimate = 3,
  GapEstimate = 4,
  GapMean = 5,
  Replicate = 6,
  Population = 7,
  Evaluation = 8,
  Baseline = 9,
  Test = 100,
};

/// Identifies one stream: (tag, agent, iteration, extra). Every distinct path
/// maps to a distinct Philox counter block, so streams never overlap.
struct StreamPath {
  StreamTag tag = StreamTag::AgentNoise;
  std::uint64_t agent = 0;
  std::uint64_t iteration = 0;
  std::uint64_t extra = 0;
};

/// Reproducible source of i.i.d. draws for one (seed, path) pair.
///
/// Satisfies UniformRandomBitGenerator, so the standard distributions can be
/// used on top of it. A stream is owned by exactly one task; it is cheap to
/// construct and must not be shared between threads.
class NoiseStream {
 public:
  using result_type = std::uint64_t;

  NoiseStream(std::uint64_t master_seed, const StreamPath& path) noexcept;

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

  result_type operator()() noexcept;

  double gaussian() { return normal_(*this); }
  double uniform01() { return uniform_(*this); }
  /// Uniform integer in [0, count).
  std::size_t index(std::size_t count);

 private:
  void refill() noexcept;

  std::array<std::uint64_t, 2> key_;
  std::array<std::uint64_t, 4> counter_;
  std::array<std::uint64_t, 4> block_{};
  unsigned position_ = 4;
  std::normal_distribution<double> normal_{0.0, 1.0};
  std::uniform_real_distribution<double> uniform_{0.0, 1.0};
};

/// Stream of agent `agent` at iteration `iteration` under `master`.
inline NoiseStream derive_stream(std::uint64_t master, std::uint64_t agent, std::uint64_t iteration) noexcept {
  return NoiseStream(master, StreamPath{StreamTag::AgentNoise, agent, iteration, 0});
}

/// Derives a child seed (for replicates, populations, ...) from a master seed.
std::uint64_t derive_seed(std::uint64_t master, const StreamPath& path) noexcept;

}  // namespace uzawa
