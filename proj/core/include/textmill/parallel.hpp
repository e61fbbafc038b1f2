#pragma once

#include <cstddef>
#include <functional>
#include <thread>
#include <vector>

namespace textmill {

// Order-preserving parallel map over [0, n): results land at their input
// index, so output is identical to the sequential run regardless of workers.
template <typename Result>
std::vector<Result> parallel_map_indexed(std::size_t n, int workers,
                                         const std::function<Result(std::size_t)>& fn) {
  std::vector<Result> out(n);
  if (workers <= 1 || n < 2) {
    for (std::size_t i = 0; i < n; ++i) out[i] = fn(i);
    return out;
  }
  std::size_t num_threads = std::min<std::size_t>(static_cast<std::size_t>(workers), n);
  std::vector<std::thread> threads;
  threads.reserve(num_threads);
  for (std::size_t t = 0; t < num_threads; ++t) {
    threads.emplace_back([&, t] {
      for (std::size_t i = t; i < n; i += num_threads) out[i] = fn(i);
    });
  }
  for (auto& th : threads) th.join();
  return out;
}

}  // namespace textmill
