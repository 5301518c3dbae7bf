#pragma once

#include <cstddef>
#include <functional>
#include <vector>

namespace msl {

// Process-wide thread budget. Defaults to $MSL_THREADS, else hardware
// concurrency. Results never depend on it: work is split into a fixed number
// of chunks, each with its own seed, and reduced in chunk order.
void set_thread_budget(unsigned threads);
unsigned thread_budget();

// Runs body(i) for i in [0, n). Exceptions from any chunk are rethrown.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

// Evaluates fn(i) for every chunk and returns the results in chunk order.
template <class T, class Fn>
std::vector<T> map_chunks(std::size_t n, Fn&& fn) {
  std::vector<T> out(n);
  parallel_for(n, [&](std::size_t i) { out[i] = fn(i); });
  return out;
}

}  // namespace msl
