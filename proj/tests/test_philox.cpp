#include "doctest.h"

#include <cmath>

#include "kellygame/philox.hpp"

using namespace kelly;

// Known-answer vectors distributed with Random123 (philox4x32, 10 rounds).
TEST_CASE("philox4x32-10 known answers") {
  CHECK(Philox4x32(0, 0)({0, 0, 0, 0}) == Philox4x32::Block{0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8});
  CHECK(Philox4x32(0xffffffff, 0xffffffff)({0xffffffff, 0xffffffff, 0xffffffff, 0xffffffff}) ==
        Philox4x32::Block{0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd});
  CHECK(Philox4x32(0xa4093822, 0x299f31d0)({0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344}) ==
        Philox4x32::Block{0xd16cfe09, 0x94fdcceb, 0x5001e420, 0x24126ea1});
}

TEST_CASE("seed and stream packing") {
  const Philox4x32 a(0x299f31d0a4093822ULL);
  const Philox4x32 b(0xa4093822, 0x299f31d0);
  CHECK(a(0x0370734413198a2eULL, 0x85a308d3243f6a88ULL) == b({0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344}));
  CHECK(stream_id(StreamDomain::brownian, 5) != stream_id(StreamDomain::player1_wealth, 5));
  CHECK((stream_id(StreamDomain::player2_wealth, 0) >> 56) == 2);
}

TEST_CASE("uniforms stay in the open unit interval; normals have unit moments") {
  CHECK(to_unit_open(0) > 0.0);
  CHECK(to_unit_open(~std::uint64_t{0}) < 1.0);

  const Philox4x32 rng(42);
  double s1 = 0, s2 = 0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const auto [x, y] = normal_pair(rng(7, static_cast<std::uint64_t>(i)));
    s1 += x + y;
    s2 += x * x + y * y;
  }
  const double mean = s1 / (2 * n), var = s2 / (2 * n) - mean * mean;
  CHECK(std::abs(mean) < 4.0 / std::sqrt(2.0 * n));
  CHECK(std::abs(var - 1.0) < 4.0 * std::sqrt(2.0 / (2.0 * n)));
}
