#pragma once

#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <random>

namespace lgcf {

using Rng = std::mt19937_64;

constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Order-sensitive combination of stream coordinates (seed, pair, epoch, ...).
constexpr std::uint64_t mix_seed(std::initializer_list<std::uint64_t> parts) noexcept {
  std::uint64_t h = 0x6a09e667f3bcc909ULL;
  for (auto p : parts) h = splitmix64(h ^ splitmix64(p));
  return h;
}

// Private random stream for one unit of work. Streams depend only on their
// coordinates, never on scheduling.
inline Rng make_stream(std::initializer_list<std::uint64_t> parts) {
  return Rng(mix_seed(parts));
}

inline double uniform01(Rng& rng) {
  return std::uniform_real_distribution<double>(0.0, 1.0)(rng);
}

inline std::size_t uniform_index(Rng& rng, std::size_t n) {
  return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng);
}

// Stream tags keep independent consumers of the same master seed apart.
namespace stream {
inline constexpr std::uint64_t kSplit = 0x5350u;
inline constexpr std::uint64_t kLevels = 0x4c56u;
inline constexpr std::uint64_t kInit = 0x494eu;
inline constexpr std::uint64_t kShuffle = 0x5348u;
inline constexpr std::uint64_t kNegative = 0x4e47u;
inline constexpr std::uint64_t kExtract = 0x4558u;
inline constexpr std::uint64_t kEvalCandidates = 0x4543u;
inline constexpr std::uint64_t kEvalExtract = 0x4545u;
inline constexpr std::uint64_t kSynthetic = 0x5359u;
}  // namespace stream

}  // namespace lgcf
