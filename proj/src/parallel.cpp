#include "gcops/parallel.hpp"

#include <cmath>
#include <cstdlib>
#include <string>

namespace gcops {

unsigned thread_count() {
  if (const char* env = std::getenv("GCOPS_THREADS")) {
    try {
      const long v = std::stol(env);
      if (v > 0) return unsigned(v);
    } catch (...) {
    }
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : hw;
}

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream) {
  std::uint64_t z = base + 0x9e3779b97f4a7c15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::uint64_t uniform_index(Rng& rng, std::uint64_t bound) {
  // Lemire's multiply-shift with rejection.
  unsigned __int128 m = (unsigned __int128)rng() * bound;
  std::uint64_t low = std::uint64_t(m);
  if (low < bound) {
    const std::uint64_t threshold = (0 - bound) % bound;
    while (low < threshold) {
      m = (unsigned __int128)rng() * bound;
      low = std::uint64_t(m);
    }
  }
  return std::uint64_t(m >> 64);
}

double uniform01(Rng& rng) { return double(rng() >> 11) * 0x1.0p-53; }

double standard_normal(Rng& rng) {
  double u, v, s;
  do {
    u = 2.0 * uniform01(rng) - 1.0;
    v = 2.0 * uniform01(rng) - 1.0;
    s = u * u + v * v;
  } while (s >= 1.0 || s == 0.0);
  return u * std::sqrt(-2.0 * std::log(s) / s);
}

void fill_standard_normal(Rng& rng, double* out, std::size_t n) {
  std::size_t i = 0;
  while (i < n) {
    double u, v, s;
    do {
      u = 2.0 * uniform01(rng) - 1.0;
      v = 2.0 * uniform01(rng) - 1.0;
      s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    const double f = std::sqrt(-2.0 * std::log(s) / s);
    out[i++] = u * f;
    if (i < n) out[i++] = v * f;
  }
}

}  // namespace gcops
