#include "uzawa/core/noise_stream.hpp"

namespace uzawa {

namespace {

constexpr std::uint64_t kMul0 = 0xD2E7470EE14C6C93ULL;
constexpr std::uint64_t kMul1 = 0xCA5A826395121157ULL;
constexpr std::uint64_t kBump0 = 0x9E3779B97F4A7C15ULL;
constexpr std::uint64_t kBump1 = 0xBB67AE8584CAA73BULL;

__extension__ typedef unsigned __int128 u128;

inline void mulhilo(std::uint64_t a, std::uint64_t b, std::uint64_t& hi, std::uint64_t& lo) noexcept {
  const u128 p = static_cast<u128>(a) * b;
  hi = static_cast<std::uint64_t>(p >> 64);
  lo = static_cast<std::uint64_t>(p);
}

}  // namespace

std::array<std::uint64_t, 4> philox4x64(std::array<std::uint64_t, 4> c, std::array<std::uint64_t, 2> k) noexcept {
  for (int round = 0; round < 10; ++round) {
    std::uint64_t hi0, lo0, hi1, lo1;
    mulhilo(kMul0, c[0], hi0, lo0);
    mulhilo(kMul1, c[2], hi1, lo1);
    c = {hi1 ^ c[1] ^ k[0], lo1, hi0 ^ c[3] ^ k[1], lo0};
    k[0] += kBump0;
    k[1] += kBump1;
  }
  return c;
}

NoiseStream::NoiseStream(std::uint64_t master_seed, const StreamPath& path) noexcept
    : key_{master_seed, static_cast<std::uint64_t>(path.tag)},
      counter_{0, path.iteration, path.agent, path.extra} {}

void NoiseStream::refill() noexcept {
  block_ = philox4x64(counter_, key_);
  ++counter_[0];
  position_ = 0;
}

NoiseStream::result_type NoiseStream::operator()() noexcept {
  if (position_ == 4) refill();
  return block_[position_++];
}

std::size_t NoiseStream::index(std::size_t count) {
  std::uniform_int_distribution<std::size_t> dist(0, count - 1);
  return dist(*this);
}

std::uint64_t derive_seed(std::uint64_t master, const StreamPath& path) noexcept {
  NoiseStream s(master, path);
  return s();
}

}  // namespace uzawa
