#pragma once

// Data-parallel loops with reproducible reductions.
//
// Work is cut into fixed-size blocks whose boundaries depend only on the
// problem size. Each block is reduced sequentially and the block partials are
// combined in index order, so every result is bit-identical regardless of how
// many workers run (LNDAU_THREADS only changes wall-clock time).

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <cstdlib>
#include <functional>
#include <string>
#include <thread>
#include <vector>

namespace landau::parallel {

inline constexpr std::size_t kBlockSize = 4096;

/// Worker count: LNDAU_THREADS if set and positive, else hardware concurrency.
inline unsigned worker_count() {
  if (const char* env = std::getenv("LNDAU_THREADS")) {
    try {
      const long v = std::stol(env);
      if (v > 0) return static_cast<unsigned>(v);
    } catch (...) {
    }
  }
  // cached: the query reads sysfs on every call
  static const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  return hw;
}

/// Calls body(begin, end) for each fixed block of [0, n).
template <class Body>
void for_blocks(std::size_t n, std::size_t block, Body&& body) {
  if (n == 0) return;
  const std::size_t nblocks = (n + block - 1) / block;
  const unsigned workers = static_cast<unsigned>(std::min<std::size_t>(worker_count(), nblocks));
  if (workers <= 1) {
    for (std::size_t b = 0; b < nblocks; ++b) body(b * block, std::min(n, (b + 1) * block));
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::jthread> pool;
  pool.reserve(workers);
  // Wrapped in std::function: GCC 11 rejects jthread built from a lambda local to an unused inline function.
  const std::function<void()> worker = [&] {
    for (std::size_t b = next++; b < nblocks; b = next++) body(b * block, std::min(n, (b + 1) * block));
  };
  for (unsigned w = 0; w < workers; ++w) pool.emplace_back(worker);
}

/// Elementwise loop; fn(i) must only write to slot i.
template <class Fn>
void for_each_index(std::size_t n, Fn&& fn) {
  for_blocks(n, kBlockSize, [&](std::size_t lo, std::size_t hi) {
    for (std::size_t i = lo; i < hi; ++i) fn(i);
  });
}

/// Sum of term(i) over [0, n) with block-ordered reduction.
template <class Term>
double sum(std::size_t n, Term&& term, std::size_t block = kBlockSize) {
  if (n == 0) return 0.0;
  const std::size_t nblocks = (n + block - 1) / block;
  std::vector<double> partial(nblocks, 0.0);
  for_blocks(n, block, [&](std::size_t lo, std::size_t hi) {
    double s = 0.0;
    for (std::size_t i = lo; i < hi; ++i) s += term(i);
    partial[lo / block] = s;
  });
  double total = 0.0;
  for (double p : partial) total += p;
  return total;
}

}  // namespace landau::parallel
