#pragma once

// Thin RAII layer over FFTW3 used by the covariance estimator and the
// Gaussian field sampler. Not part of the public headers.

#include <array>
#include <complex>
#include <cstddef>
#include <memory>
#include <span>
#include <vector>

#include "gcops/lattice.hpp"

namespace gcops::detail {

// Smallest m >= n whose only prime factors are 2, 3, 5, 7.
std::size_t next_fast_size(std::size_t n);

struct FftwFree {
  void operator()(void* p) const noexcept;
};

template <class T>
using FftwBuffer = std::unique_ptr<T[], FftwFree>;

FftwBuffer<double> alloc_real(std::size_t n);
FftwBuffer<std::complex<double>> alloc_complex(std::size_t n);

// Cube of lags [-L, L]^d stored x-fastest; 2D cubes have a single z slice.
struct LagCube {
  int dims = 2;
  int max_lag = 0;

  std::size_t side() const noexcept { return std::size_t(2 * max_lag + 1); }
  std::size_t z_side() const noexcept { return dims == 3 ? side() : 1; }
  std::size_t size() const noexcept { return side() * side() * z_side(); }
  int z_lag() const noexcept { return dims == 3 ? max_lag : 0; }
  bool contains(const Lag& h) const noexcept;
  std::size_t index(const Lag& h) const noexcept;
  Lag lag(std::size_t index) const noexcept;
};

// Linear autocorrelation sum_x f(x) f(x + h) for every h in the cube, using a
// zero-padded real transform with at least `shape + max_lag` samples per axis
// so that no circular wrap-around reaches the stored lags.
std::vector<double> autocorrelation(std::span<const double> values, const Shape& shape,
                                    const LagCube& cube);

// Complex-to-complex forward transform of an x-fastest grid of the given
// shape, reusable across calls and safe to execute concurrently.
class ComplexFft {
 public:
  explicit ComplexFft(const Shape& grid);
  ~ComplexFft();
  ComplexFft(const ComplexFft&) = delete;
  ComplexFft& operator=(const ComplexFft&) = delete;

  // In-place transform of `data` (length grid.size(), allocated with
  // alloc_complex).
  void forward(std::complex<double>* data) const;
  const Shape& grid() const noexcept { return grid_; }

 private:
  Shape grid_;
  void* plan_ = nullptr;
};

}  // namespace gcops::detail
