#ifndef NLCAP_CORE_RNG_HPP
#define NLCAP_CORE_RNG_HPP

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <utility>

namespace nlcap::rng {

// Philox 4x32 with 10 rounds. The output block is a pure function of
// (key, counter), so any (sample, step) pair can be generated independently,
// in any order, and on any thread, which is what makes the Monte-Carlo
// ensembles reproducible under arbitrary parallel scheduling.
inline constexpr std::uint32_t kPhiloxM0 = 0xD2511F53u;
inline constexpr std::uint32_t kPhiloxM1 = 0xCD9E8D57u;
inline constexpr std::uint32_t kPhiloxW0 = 0x9E3779B9u;
inline constexpr std::uint32_t kPhiloxW1 = 0xBB67AE85u;

inline std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> counter,
                                               std::array<std::uint32_t, 2> key) {
  for (int round = 0; round < 10; ++round) {
    if (round != 0) {
      key[0] += kPhiloxW0;
      key[1] += kPhiloxW1;
    }
    const std::uint64_t product0 = static_cast<std::uint64_t>(kPhiloxM0) * counter[0];
    const std::uint64_t product1 = static_cast<std::uint64_t>(kPhiloxM1) * counter[2];
    counter = {static_cast<std::uint32_t>(product1 >> 32) ^ counter[1] ^ key[0],
               static_cast<std::uint32_t>(product1),
               static_cast<std::uint32_t>(product0 >> 32) ^ counter[3] ^ key[1],
               static_cast<std::uint32_t>(product0)};
  }
  return counter;
}

// One block per (seed, sample, step): the seed is the key, the two 64-bit
// indices fill the 128-bit counter.
inline std::array<std::uint32_t, 4> block(std::uint64_t seed, std::uint64_t sample,
                                          std::uint64_t step) {
  return philox4x32({static_cast<std::uint32_t>(sample),
                     static_cast<std::uint32_t>(sample >> 32),
                     static_cast<std::uint32_t>(step),
                     static_cast<std::uint32_t>(step >> 32)},
                    {static_cast<std::uint32_t>(seed),
                     static_cast<std::uint32_t>(seed >> 32)});
}

// Uniform draw in the open interval (0, 1): 52 bits assembled from two words,
// offset by half a grid cell so 0 and 1 are never produced. grid + 0.5 stays
// below 2^52 where half-integers are exact, so the scaled result is exact and
// the endpoints are unreachable.
inline double uniform52(std::uint32_t hi_word, std::uint32_t lo_word) {
  const double grid = static_cast<double>(hi_word >> 6) * 0x1p26 +
                      static_cast<double>(lo_word >> 6);
  return (grid + 0.5) * 0x1p-52;
}

// Standard normal pair by Box-Muller from a single generator block.
inline std::pair<double, double> gaussian_pair(std::uint64_t seed, std::uint64_t sample,
                                               std::uint64_t step) {
  const std::array<std::uint32_t, 4> words = block(seed, sample, step);
  const double u1 = uniform52(words[0], words[1]);
  const double u2 = uniform52(words[2], words[3]);
  const double radius = std::sqrt(-2.0 * std::log(u1));
  const double angle = 2.0 * std::numbers::pi * u2;
  return {radius * std::cos(angle), radius * std::sin(angle)};
}

}  // namespace nlcap::rng

#endif  // NLCAP_CORE_RNG_HPP
