#pragma once

#include <cstdint>

namespace facloc {

// Counter-based pseudo-random stream built on the splitmix64 finalizer.
// Stateless: value k of stream `seed` is a pure function of (seed, k), so
// any worker can evaluate any position without coordination.

constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ull;

constexpr std::uint64_t mix64(std::uint64_t z) {
  z ^= z >> 30;
  z *= 0xBF58476D1CE4E5B9ull;
  z ^= z >> 27;
  z *= 0x94D049BB133111EBull;
  z ^= z >> 31;
  return z;
}

constexpr std::uint64_t stream_at(std::uint64_t seed, std::uint64_t k) {
  return mix64(seed + (k + 1) * kGolden);
}

// 53-bit mantissa in [0,1).
constexpr double unit_double(std::uint64_t bits) {
  return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

constexpr double uniform01(std::uint64_t seed, std::uint64_t k) {
  return unit_double(stream_at(seed, k));
}

// Derives an independent child seed from (master, a, b); used for per-trial
// seeding so trials are reproducible in isolation.
constexpr std::uint64_t derive_seed(std::uint64_t master, std::uint64_t a,
                                    std::uint64_t b) {
  std::uint64_t h = mix64(master + kGolden);
  h = mix64(h ^ (a + kGolden));
  h = mix64(h ^ (b + kGolden));
  return h;
}

}  // namespace facloc
