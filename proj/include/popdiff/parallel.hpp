#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <thread>
#include <vector>

namespace popdiff {

/// Number of worker threads used by parallel loops. Defaults to 1.
std::size_t worker_count();
void set_worker_count(std::size_t workers);

/// Splits [0, total) into fixed-size chunks and runs fn(chunk_index, begin,
/// end) for each. Chunk boundaries never depend on the worker count, so a
/// caller that merges per-chunk results in chunk order gets identical output
/// for any number of workers.
template <class Fn>
void for_each_chunk(std::uint64_t total, std::uint64_t chunk, Fn&& fn) {
  if (total == 0) return;
  chunk = std::max<std::uint64_t>(chunk, 1);
  const std::uint64_t chunks = (total + chunk - 1) / chunk;
  const std::size_t workers =
      std::min<std::uint64_t>(worker_count(), chunks);
  auto run = [&](std::uint64_t c) {
    const std::uint64_t begin = c * chunk;
    fn(c, begin, std::min(total, begin + chunk));
  };
  if (workers <= 1) {
    for (std::uint64_t c = 0; c < chunks; ++c) run(c);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      for (std::uint64_t c = w; c < chunks; c += workers) run(c);
    });
  }
  for (auto& t : pool) t.join();
}

inline std::uint64_t chunk_count(std::uint64_t total, std::uint64_t chunk) {
  return total == 0 ? 0 : (total + chunk - 1) / chunk;
}

}  // namespace popdiff
