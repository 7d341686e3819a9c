#pragma once

#include <cmath>
#include <cstdint>

namespace lasalt::rng {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

/// Counter-based key: a fixed mixing chain over the tuple, so any entry of
/// any member's table can be generated independently and bit-reproducibly.
inline std::uint64_t key(std::uint64_t seed, std::uint64_t member,
                         std::uint64_t noise_index, std::uint64_t step) {
  std::uint64_t s = splitmix64(seed ^ 0xD1B54A32D192ED03ull);
  s = splitmix64(s ^ splitmix64(member + 0x8CB92BA72F3D8DD7ull));
  s = splitmix64(s ^ splitmix64(noise_index + 0xABCC5167CCAD925Full));
  s = splitmix64(s ^ splitmix64(step + 0x2545F4914F6CDD1Dull));
  return s;
}

inline double uniform01(std::uint64_t bits) {
  return double(bits >> 11) * 0x1.0p-53;
}

/// Standard normal via Box-Muller on two counter-derived uniforms.
inline double standard_normal(std::uint64_t k) {
  const std::uint64_t a = splitmix64(k);
  const std::uint64_t b = splitmix64(a);
  double u1 = uniform01(a);
  if (u1 <= 0.0) u1 = 0x1.0p-53;
  const double u2 = uniform01(b);
  return std::sqrt(-2.0 * std::log(u1)) *
         std::cos(6.283185307179586476925286766559 * u2);
}

}  // namespace lasalt::rng
