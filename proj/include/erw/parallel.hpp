#pragma once

#include <atomic>
#include <cstdint>
#include <thread>
#include <vector>

namespace erw {

inline constexpr std::int64_t kDefaultChunk = 1024;

/// Runs body(chunk_index, begin, end) over [0, n) split into fixed chunks.
/// Chunk boundaries depend only on (n, chunk), never on the worker count, and
/// each chunk writes its own accumulator slot, so reducing the slots in index
/// order gives byte-identical results for any --threads value.
template <class Body>
void parallel_chunks(std::int64_t n, int threads, Body&& body,
                     std::int64_t chunk = kDefaultChunk) {
  if (n <= 0) return;
  std::int64_t num_chunks = (n + chunk - 1) / chunk;
  if (threads <= 1 || num_chunks == 1) {
    for (std::int64_t ci = 0; ci < num_chunks; ++ci) {
      std::int64_t b = ci * chunk;
      body(ci, b, std::min(n, b + chunk));
    }
    return;
  }
  std::atomic<std::int64_t> next{0};
  auto worker = [&] {
    for (;;) {
      std::int64_t ci = next.fetch_add(1);
      if (ci >= num_chunks) return;
      std::int64_t b = ci * chunk;
      body(ci, b, std::min(n, b + chunk));
    }
  };
  std::vector<std::thread> pool;
  int nw = std::min<std::int64_t>(threads, num_chunks);
  pool.reserve(nw);
  for (int t = 0; t < nw; ++t) pool.emplace_back(worker);
  for (auto& th : pool) th.join();
}

inline std::int64_t num_chunks_for(std::int64_t n, std::int64_t chunk = kDefaultChunk) {
  return n <= 0 ? 0 : (n + chunk - 1) / chunk;
}

}  // namespace erw
