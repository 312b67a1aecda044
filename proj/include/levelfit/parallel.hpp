#pragma once

#include <algorithm>
#include <cstddef>
#include <thread>
#include <vector>

namespace levelfit {

/// Runs body(begin, end, chunk) over contiguous chunks of [0, count). Chunk
/// boundaries depend only on `count` and the thread count, and each chunk
/// writes only its own outputs, so results match a serial run.
template <typename Body>
void parallel_chunks(std::size_t count, Body&& body, std::size_t min_chunk = 4096) {
  const std::size_t hw = std::max(1u, std::thread::hardware_concurrency());
  const std::size_t chunks = std::max<std::size_t>(1, std::min(hw, count / std::max<std::size_t>(min_chunk, 1)));
  if (chunks == 1) {
    body(std::size_t{0}, count, std::size_t{0});
    return;
  }
  std::vector<std::jthread> workers;
  workers.reserve(chunks);
  for (std::size_t c = 0; c < chunks; ++c) {
    const std::size_t begin = count * c / chunks;
    const std::size_t end = count * (c + 1) / chunks;
    workers.emplace_back([&body, begin, end, c] { body(begin, end, c); });
  }
}

/// Upper bound on the chunk index passed by parallel_chunks.
inline std::size_t max_parallel_chunks() { return std::max(1u, std::thread::hardware_concurrency()); }

}  // namespace levelfit
