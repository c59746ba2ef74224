#pragma once

#include <cstdint>
#include <random>

namespace lambda_infer {

using Rng = std::mt19937_64;

// SplitMix64 finaliser; used to derive independent seed streams.
constexpr auto mix_seed(std::uint64_t x) -> std::uint64_t {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Counter-based child stream: stream `index` of master seed `seed`.
// Distinct (seed, index) pairs give statistically independent generators,
// and the result does not depend on how work is split across threads.
constexpr auto child_seed(std::uint64_t seed, std::uint64_t index) -> std::uint64_t {
  return mix_seed(mix_seed(seed) ^ mix_seed(index + 0x632be59bd9b4e019ULL));
}

inline auto make_rng(std::uint64_t seed, std::uint64_t index = 0) -> Rng {
  return Rng{child_seed(seed, index)};
}

// Uniform on the open interval (0, 1).
inline auto uniform_open(Rng& rng) -> double {
  // 53 random bits, shifted off zero.
  return (static_cast<double>(rng() >> 11) + 0.5) * 0x1.0p-53;
}

}  // namespace lambda_infer
