#pragma once

// Deterministic fan-out helpers. Results never depend on the thread count:
// parallel_for writes into per-index slots and first_hit returns the lowest
// index that produced a value.

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <optional>
#include <thread>
#include <vector>

namespace ssdm {

/// Threads to use when a caller passes 0.
inline unsigned resolve_threads(unsigned requested) {
  if (requested > 0) return requested;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1u : hw;
}

/// Calls fn(i) for i in [0, count). Exceptions are rethrown on the caller's
/// thread (the one from the lowest index wins).
template <class Fn>
void parallel_for(std::size_t count, unsigned threads, Fn&& fn) {
  threads = std::min<unsigned>(resolve_threads(threads), static_cast<unsigned>(std::max<std::size_t>(count, 1)));
  if (threads <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::mutex err_mu;
  std::size_t err_index = count;
  std::exception_ptr err;
  auto worker = [&] {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= count) return;
      try {
        fn(i);
      } catch (...) {
        std::lock_guard lock(err_mu);
        if (i < err_index) {
          err_index = i;
          err = std::current_exception();
        }
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (unsigned k = 0; k < threads; ++k) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  if (err) std::rethrow_exception(err);
}

/// Scans i = 0, 1, ... and returns (i, fn(i)) for the lowest i where fn
/// returns a value. Work proceeds in chunks so that a hit near the front
/// does not pay for the whole range.
template <class T, class Fn>
std::optional<std::pair<std::size_t, T>> first_hit(std::size_t count, unsigned threads, Fn&& fn) {
  threads = resolve_threads(threads);
  if (threads <= 1) {
    for (std::size_t i = 0; i < count; ++i) {
      if (auto v = fn(i)) return std::make_pair(i, std::move(*v));
    }
    return std::nullopt;
  }
  const std::size_t chunk = std::max<std::size_t>(4 * threads, 16);
  for (std::size_t begin = 0; begin < count; begin += chunk) {
    const std::size_t end = std::min(count, begin + chunk);
    std::vector<std::optional<T>> slots(end - begin);
    std::atomic<std::size_t> best{end};
    parallel_for(end - begin, threads, [&](std::size_t k) {
      if (begin + k > best.load()) return;
      slots[k] = fn(begin + k);
      if (slots[k]) {
        std::size_t cur = best.load();
        while (begin + k < cur && !best.compare_exchange_weak(cur, begin + k)) {
        }
      }
    });
    for (std::size_t k = 0; k < slots.size(); ++k) {
      if (slots[k]) return std::make_pair(begin + k, std::move(*slots[k]));
    }
  }
  return std::nullopt;
}

}  // namespace ssdm
