#pragma once

#include <algorithm>
#include <cstddef>
#include <exception>
#include <thread>
#include <vector>

namespace maxent {

/// Runs body(chunk_index, begin, end) over `count` items split into contiguous chunks.
/// Chunk boundaries depend only on `count` and `chunks`, never on `workers`, so results
/// merged in chunk order are identical for any worker count.
template <typename Body>
void parallel_chunks(std::size_t count, std::size_t chunks, std::size_t workers, Body&& body) {
  if (count == 0) return;
  chunks = std::clamp<std::size_t>(chunks, 1, count);
  workers = std::clamp<std::size_t>(workers, 1, chunks);
  auto run_chunk = [&](std::size_t c) {
    const std::size_t begin = count * c / chunks;
    const std::size_t end = count * (c + 1) / chunks;
    body(c, begin, end);
  };
  if (workers == 1) {
    for (std::size_t c = 0; c < chunks; ++c) run_chunk(c);
    return;
  }
  std::vector<std::exception_ptr> errors(workers);
  std::vector<std::thread> threads;
  threads.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    threads.emplace_back([&, w] {
      try {
        for (std::size_t c = w; c < chunks; c += workers) run_chunk(c);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& t : threads) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

/// Worker count from the MAXENT_WORKERS environment variable, else hardware concurrency.
std::size_t default_workers();

}  // namespace maxent
