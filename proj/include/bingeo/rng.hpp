#pragma once

#include <cmath>
#include <cstdint>

namespace bingeo {

// Counter-based random stream built on the SplitMix64 finalizer
// (Steele/Lea/Flood 2014). Each draw is a pure function of
// (seed, stream, counter), so sweeps can be replayed or parallelized in any
// order and still produce identical noise realizations on every platform.
// std::normal_distribution is deliberately avoided: its output is not
// specified bit-for-bit across standard libraries.
namespace rng {

inline uint64_t splitmix64(uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline uint64_t counter_bits(uint64_t seed, uint64_t stream, uint64_t counter) {
  return splitmix64(splitmix64(splitmix64(seed) ^ stream) + counter);
}

// Uniform double in (0,1]; never returns 0 so it is safe under log().
inline double uniform_open(uint64_t seed, uint64_t stream, uint64_t counter) {
  const uint64_t bits = counter_bits(seed, stream, counter) >> 11;  // 53 bits
  return (double(bits) + 1.0) * 0x1.0p-53;
}

// Standard normal via Box-Muller on two counter draws.
inline double normal(uint64_t seed, uint64_t stream, uint64_t index) {
  const double u1 = uniform_open(seed, stream, 2 * index);
  const double u2 = uniform_open(seed, stream, 2 * index + 1);
  constexpr double two_pi = 6.283185307179586476925286766559;
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(two_pi * u2);
}

}  // namespace rng
}  // namespace bingeo
