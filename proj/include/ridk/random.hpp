#pragma once

// Counter-based Gaussian streams (Philox4x32-10). A draw is a pure function
// of (seed, counter), so results do not depend on evaluation order.

#include "ridk/common.hpp"

#include <array>
#include <cmath>
#include <cstdint>

namespace ridk {

using Counter = std::array<std::uint32_t, 4>;

inline Counter philox4x32(Counter ctr, std::uint64_t seed) {
  constexpr std::uint32_t m0 = 0xD2511F53u, m1 = 0xCD9E8D57u;
  constexpr std::uint32_t w0 = 0x9E3779B9u, w1 = 0xBB67AE85u;
  std::uint32_t k0 = static_cast<std::uint32_t>(seed);
  std::uint32_t k1 = static_cast<std::uint32_t>(seed >> 32);
  for (int round = 0; round < 10; ++round) {
    const std::uint64_t p0 = static_cast<std::uint64_t>(m0) * ctr[0];
    const std::uint64_t p1 = static_cast<std::uint64_t>(m1) * ctr[2];
    ctr = {static_cast<std::uint32_t>(p1 >> 32) ^ ctr[1] ^ k0, static_cast<std::uint32_t>(p1),
           static_cast<std::uint32_t>(p0 >> 32) ^ ctr[3] ^ k1, static_cast<std::uint32_t>(p0)};
    k0 += w0;
    k1 += w1;
  }
  return ctr;
}

namespace detail {
inline double to_open_unit(std::uint32_t hi, std::uint32_t lo) {
  const std::uint64_t bits = ((static_cast<std::uint64_t>(hi) << 32) | lo) >> 11;
  return (static_cast<double>(bits) + 0.5) * 0x1.0p-53;
}
}  // namespace detail

/// Two uniforms in (0,1) for one counter.
inline std::array<double, 2> uniform_pair(std::uint64_t seed, const Counter& ctr) {
  const Counter r = philox4x32(ctr, seed);
  return {detail::to_open_unit(r[0], r[1]), detail::to_open_unit(r[2], r[3])};
}

/// Two independent standard normals for one counter (Box-Muller).
inline std::array<double, 2> normal_pair(std::uint64_t seed, const Counter& ctr) {
  const auto u = uniform_pair(seed, ctr);
  const double rad = std::sqrt(-2.0 * std::log(u[0]));
  return {rad * std::cos(kTwoPi * u[1]), rad * std::sin(kTwoPi * u[1])};
}

inline double standard_normal(std::uint64_t seed, const Counter& ctr) { return normal_pair(seed, ctr)[0]; }

/// Stream tags keep unrelated consumers of one seed apart.
enum class Stream : std::uint32_t {
  noise_a = 1,
  noise_b = 2,
  langevin = 16,
  reaction = 17,
  init_positions = 18,
};

inline Counter make_counter(std::uint64_t step, std::uint32_t component, std::uint32_t index, Stream s) {
  return {static_cast<std::uint32_t>(step), component | (static_cast<std::uint32_t>(step >> 32) << 8), index,
          static_cast<std::uint32_t>(s)};
}

}  // namespace ridk
