#pragma once

#include <atomic>
#include <functional>
#include <thread>
#include <vector>

namespace tdr {

inline int default_threads() {
  const unsigned hc = std::thread::hardware_concurrency();
  return hc == 0 ? 1 : static_cast<int>(hc);
}

// Replica-parallel map/reduce.  Replicas [0,n) are split into fixed chunks;
// worker threads claim chunks through an atomic counter, and the chunk
// results are merged in chunk order after the join.  Output is therefore
// independent of the thread count.
template <class ChunkResult>
void run_chunked(long long n_replicas, int threads, long long chunk_size,
                 const std::function<ChunkResult(long long, long long)>& work,
                 const std::function<void(ChunkResult&&)>& merge) {
  if (n_replicas <= 0) return;
  if (chunk_size <= 0) chunk_size = 1;
  const long long n_chunks = (n_replicas + chunk_size - 1) / chunk_size;
  std::vector<ChunkResult> results(static_cast<std::size_t>(n_chunks));
  std::atomic<long long> next{0};
  auto worker = [&]() {
    for (;;) {
      const long long k = next.fetch_add(1);
      if (k >= n_chunks) return;
      const long long lo = k * chunk_size;
      const long long hi = std::min(n_replicas, lo + chunk_size);
      results[static_cast<std::size_t>(k)] = work(lo, hi);
    }
  };
  if (threads <= 1 || n_chunks == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    const int nt = std::min<long long>(threads, n_chunks);
    pool.reserve(nt);
    for (int t = 0; t < nt; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  for (auto& r : results) merge(std::move(r));
}

}  // namespace tdr
