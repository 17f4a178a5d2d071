#pragma once

#include <algorithm>
#include <cstdint>
#include <thread>
#include <vector>

namespace kelly::detail {

inline unsigned resolve_threads(unsigned requested) {
  if (requested != 0) return requested;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1u : hw;
}

/// Runs body(begin, end) over contiguous chunks of [0, count). Bodies must
/// write disjoint outputs.
template <typename Body>
void parallel_for(std::int64_t count, unsigned threads, Body body) {
  const std::int64_t workers =
      std::clamp<std::int64_t>(resolve_threads(threads), 1, std::max<std::int64_t>(count, 1));
  if (workers == 1) {
    body(std::int64_t{0}, count);
    return;
  }
  const std::int64_t chunk = (count + workers - 1) / workers;
  std::vector<std::jthread> pool;
  pool.reserve(static_cast<std::size_t>(workers));
  for (std::int64_t w = 0; w < workers; ++w) {
    const std::int64_t begin = w * chunk;
    const std::int64_t end = std::min(count, begin + chunk);
    if (begin >= end) break;
    pool.emplace_back([=, &body] { body(begin, end); });
  }
}

}  // namespace kelly::detail
