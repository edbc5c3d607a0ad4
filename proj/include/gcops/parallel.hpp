#pragma once

#include <atomic>
#include <cstddef>
#include <cstdint>
#include <exception>
#include <mutex>
#include <random>
#include <thread>
#include <vector>

namespace gcops {

// Worker count: GCOPS_THREADS if set and positive, else hardware concurrency.
unsigned thread_count();

// Runs f(i) for i in [0, n) on up to thread_count() threads. The first
// exception thrown by any task is rethrown after all workers stop.
template <class F>
void parallel_for(std::size_t n, F&& f) {
  const unsigned workers = unsigned(std::min<std::size_t>(thread_count(), n));
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) f(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto worker = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      try {
        f(i);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
        next = n;
      }
    }
  };
  std::vector<std::jthread> pool;
  pool.reserve(workers);
  for (unsigned w = 0; w < workers; ++w) pool.emplace_back(worker);
  pool.clear();
  if (error) std::rethrow_exception(error);
}

// Independent stream seed for replicate `stream` of a run seeded with `base`
// (SplitMix64 finaliser over a counter).
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream);

using Rng = std::mt19937_64;

// Uniform integer in [0, bound) without libstdc++-specific distribution
// code, so seeded runs reproduce across standard libraries.
std::uint64_t uniform_index(Rng& rng, std::uint64_t bound);

// Uniform double in [0, 1).
double uniform01(Rng& rng);

// Standard normal variate (Marsaglia polar method).
double standard_normal(Rng& rng);

// Fills `out` with standard normal variates, using both polar-method outputs.
void fill_standard_normal(Rng& rng, double* out, std::size_t n);

}  // namespace gcops
