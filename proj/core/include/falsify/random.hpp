#pragma once

#include <cstdint>
#include <random>

namespace falsify {

using Rng = std::mt19937_64;

// SplitMix64 finalizer; used to derive independent stream seeds.
constexpr std::uint64_t mix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Seed of the stream owned by `stream` under `master`. Streams for different
// ids are decorrelated, so per-sample draws do not depend on scheduling.
constexpr std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream) noexcept {
  return mix64(mix64(master) ^ mix64(stream + 0x632be59bd9b4e019ULL));
}

inline Rng make_stream(std::uint64_t master, std::uint64_t stream) {
  return Rng{derive_seed(master, stream)};
}

// Uniform double in [0, 1) with 53 random bits.
inline double uniform01(Rng& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

// Uniform integer in [0, n).
inline std::uint64_t uniform_index(Rng& rng, std::uint64_t n) {
  return std::uniform_int_distribution<std::uint64_t>{0, n - 1}(rng);
}

}  // namespace falsify
