#pragma once

// Philox4x32-10 counter-based generator (Salmon et al., SC'11).
//
// Stream layout used throughout the library. A 64-bit seed is the key. The
// 128-bit counter is split into a 64-bit draw index (words 0-1) and a 64-bit
// stream id (words 2-3). Stream ids carry an 8-bit domain tag in the top byte
// and a 56-bit lane below it:
//
//   domain 0  Brownian increments, lane = path index,
//             draw index = step * ceil(n / 2) + asset pair
//   domain 1  Player 1 fair randomization, lane = resample attempt
//   domain 2  Player 2 fair randomization, lane = resample attempt
//
// Every normal therefore depends only on (seed, path, step, asset), never on
// thread count or evaluation order.

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <utility>

namespace kelly {

class Philox4x32 {
 public:
  using Block = std::array<std::uint32_t, 4>;

  explicit constexpr Philox4x32(std::uint64_t seed)
      : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)} {}

  constexpr Philox4x32(std::uint32_t k0, std::uint32_t k1) : key_{k0, k1} {}

  constexpr Block operator()(Block counter) const {
    std::array<std::uint32_t, 2> key = key_;
    for (int round = 0; round < 10; ++round) {
      if (round > 0) {
        key[0] += kW0;
        key[1] += kW1;
      }
      counter = single_round(counter, key);
    }
    return counter;
  }

  constexpr Block operator()(std::uint64_t stream, std::uint64_t index) const {
    return (*this)(Block{static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32),
                         static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)});
  }

 private:
  static constexpr std::uint32_t kM0 = 0xD2511F53;
  static constexpr std::uint32_t kM1 = 0xCD9E8D57;
  static constexpr std::uint32_t kW0 = 0x9E3779B9;
  static constexpr std::uint32_t kW1 = 0xBB67AE85;

  static constexpr Block single_round(const Block& c, const std::array<std::uint32_t, 2>& key) {
    const std::uint64_t p0 = static_cast<std::uint64_t>(kM0) * c[0];
    const std::uint64_t p1 = static_cast<std::uint64_t>(kM1) * c[2];
    return {static_cast<std::uint32_t>(p1 >> 32) ^ c[1] ^ key[0], static_cast<std::uint32_t>(p1),
            static_cast<std::uint32_t>(p0 >> 32) ^ c[3] ^ key[1], static_cast<std::uint32_t>(p0)};
  }

  std::array<std::uint32_t, 2> key_;
};

enum class StreamDomain : std::uint64_t { brownian = 0, player1_wealth = 1, player2_wealth = 2 };

constexpr std::uint64_t stream_id(StreamDomain domain, std::uint64_t lane) {
  return (static_cast<std::uint64_t>(domain) << 56) | (lane & ((std::uint64_t{1} << 56) - 1));
}

/// Maps 64 random bits to the open interval (0, 1) on a 2^-52 grid offset by half a step.
constexpr double to_unit_open(std::uint64_t bits) {
  return (static_cast<double>(bits >> 12) + 0.5) * 0x1.0p-52;
}

/// Two uniforms in (0, 1) from one Philox block.
inline std::pair<double, double> uniform_pair(const Philox4x32::Block& block) {
  const std::uint64_t a = (static_cast<std::uint64_t>(block[1]) << 32) | block[0];
  const std::uint64_t b = (static_cast<std::uint64_t>(block[3]) << 32) | block[2];
  return {to_unit_open(a), to_unit_open(b)};
}

/// Box-Muller: two independent standard normals per block.
inline std::pair<double, double> normal_pair(const Philox4x32::Block& block) {
  const auto [u1, u2] = uniform_pair(block);
  const double radius = std::sqrt(-2.0 * std::log(u1));
  const double angle = 2.0 * std::numbers::pi * u2;
  return {radius * std::cos(angle), radius * std::sin(angle)};
}

}  // namespace kelly
