#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace mignet {

namespace detail {
inline std::atomic<unsigned>& thread_cap() {
  static std::atomic<unsigned> cap{0};
  return cap;
}
}  // namespace detail

/// Caps the number of worker threads used by parallel loops. 0 = hardware.
inline void set_max_threads(unsigned n) { detail::thread_cap() = n; }

inline unsigned max_threads() {
  unsigned cap = detail::thread_cap();
  unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  return cap == 0 ? hw : std::min(cap, hw);
}

/// Runs fn(i) for i in [0, n). Work is handed out in chunks from a shared
/// counter, so fn must only write to slots owned by i. The first exception
/// thrown by any worker is rethrown on the calling thread.
template <typename Fn>
void parallel_for(std::size_t n, Fn&& fn, std::size_t chunk = 16) {
  if (n == 0) return;
  const unsigned workers =
      static_cast<unsigned>(std::min<std::size_t>(max_threads(), (n + chunk - 1) / chunk));
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mu;
  auto body = [&] {
    try {
      for (;;) {
        std::size_t start = next.fetch_add(chunk);
        if (start >= n) break;
        std::size_t stop = std::min(n, start + chunk);
        for (std::size_t i = start; i < stop; ++i) fn(i);
      }
    } catch (...) {
      std::lock_guard<std::mutex> lock(failure_mu);
      if (!failure) failure = std::current_exception();
      next = n;
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(workers - 1);
  for (unsigned t = 1; t < workers; ++t) pool.emplace_back(body);
  body();
  for (auto& th : pool) th.join();
  if (failure) std::rethrow_exception(failure);
}

/// Sums per-item contributions into a length-`width` vector.
///
/// Items are grouped into fixed blocks of `block` consecutive indices; each
/// block accumulates into its own partial vector and partials are added in
/// block order. The result is therefore bit-identical for any thread count.
/// `fn(item, partial)` adds item's contribution into `partial`; `Scratch` is
/// per-worker reusable state passed as the third argument.
template <typename Scratch, typename MakeScratch, typename Fn>
std::vector<double> blocked_reduce(std::size_t items, std::size_t width,
                                   std::size_t block, MakeScratch&& make_scratch,
                                   Fn&& fn) {
  std::vector<double> total(width, 0.0);
  if (items == 0) return total;
  const std::size_t n_blocks = (items + block - 1) / block;
  // Bound memory: process blocks in waves.
  const std::size_t wave = std::max<std::size_t>(1, std::min<std::size_t>(n_blocks, 4 * max_threads()));
  std::vector<std::vector<double>> partials(wave);
  for (std::size_t wave_start = 0; wave_start < n_blocks; wave_start += wave) {
    const std::size_t wave_len = std::min(wave, n_blocks - wave_start);
    parallel_for(
        wave_len,
        [&](std::size_t w) {
          Scratch scratch = make_scratch();
          auto& partial = partials[w];
          partial.assign(width, 0.0);
          const std::size_t b = wave_start + w;
          const std::size_t lo = b * block;
          const std::size_t hi = std::min(items, lo + block);
          for (std::size_t i = lo; i < hi; ++i) fn(i, partial, scratch);
        },
        1);
    for (std::size_t w = 0; w < wave_len; ++w)
      for (std::size_t k = 0; k < width; ++k) total[k] += partials[w][k];
  }
  return total;
}

}  // namespace mignet
