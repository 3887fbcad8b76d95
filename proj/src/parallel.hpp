#pragma once

#include <algorithm>
#include <cstddef>
#include <exception>
#include <thread>
#include <vector>

namespace litscape::detail {

// Splits [0, n) into contiguous shards and runs fn(shard, begin, end) on up
// to `threads` threads. Shard boundaries depend only on n and the shard
// count, and callers merge shard results in shard order.
template <class Fn>
void for_shards(std::size_t n, unsigned threads, std::size_t shards, Fn&& fn) {
  if (shards == 0) shards = 1;
  auto bounds = [&](std::size_t s) { return n * s / shards; };
  if (threads <= 1 || shards == 1) {
    for (std::size_t s = 0; s < shards; ++s) fn(s, bounds(s), bounds(s + 1));
    return;
  }
  std::vector<std::exception_ptr> errors(shards);
  std::vector<std::thread> pool;
  unsigned workers = std::min<std::size_t>(threads, shards);
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      for (std::size_t s = w; s < shards; s += workers) {
        try {
          fn(s, bounds(s), bounds(s + 1));
        } catch (...) {
          errors[s] = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

inline std::size_t shard_count(std::size_t n, unsigned threads) {
  if (threads <= 1) return 1;
  return std::max<std::size_t>(1, std::min<std::size_t>(n, std::size_t{threads} * 4));
}

}  // namespace litscape::detail
