#include "fft.hpp"

#include <fftw3.h>

#include <mutex>

#include "gcops/error.hpp"

namespace gcops::detail {

namespace {

// FFTW's planner is not re-entrant; execution of an existing plan is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

bool is_fast(std::size_t n) {
  for (std::size_t p : {2, 3, 5, 7})
    while (n % p == 0) n /= p;
  return n == 1;
}

// FFTW wants the slowest axis first.
std::vector<int> fftw_dims(const Shape& s) {
  if (s.dims == 3) return {int(s.nz()), int(s.ny()), int(s.nx())};
  return {int(s.ny()), int(s.nx())};
}

}  // namespace

std::size_t next_fast_size(std::size_t n) {
  if (n <= 1) return 1;
  while (!is_fast(n)) ++n;
  return n;
}

void FftwFree::operator()(void* p) const noexcept { fftw_free(p); }

FftwBuffer<double> alloc_real(std::size_t n) {
  auto* p = static_cast<double*>(fftw_malloc(sizeof(double) * n));
  if (!p) throw std::bad_alloc();
  return FftwBuffer<double>(p);
}

FftwBuffer<std::complex<double>> alloc_complex(std::size_t n) {
  auto* p = static_cast<std::complex<double>*>(fftw_malloc(sizeof(fftw_complex) * n));
  if (!p) throw std::bad_alloc();
  return FftwBuffer<std::complex<double>>(p);
}

bool LagCube::contains(const Lag& h) const noexcept {
  return std::abs(h.offset[0]) <= max_lag && std::abs(h.offset[1]) <= max_lag &&
         std::abs(h.offset[2]) <= z_lag();
}

std::size_t LagCube::index(const Lag& h) const noexcept {
  const std::size_t s = side();
  return (std::size_t(h.offset[2] + z_lag()) * s + std::size_t(h.offset[1] + max_lag)) * s +
         std::size_t(h.offset[0] + max_lag);
}

Lag LagCube::lag(std::size_t index) const noexcept {
  const std::size_t s = side();
  Lag h;
  h.offset[0] = int(index % s) - max_lag;
  h.offset[1] = int((index / s) % s) - max_lag;
  h.offset[2] = int(index / (s * s)) - z_lag();
  return h;
}

std::vector<double> autocorrelation(std::span<const double> values, const Shape& shape,
                                    const LagCube& cube) {
  if (values.size() != shape.size())
    throw Error(ErrorCode::ShapeMismatch, "autocorrelation input size mismatch");

  Shape padded = shape;
  for (int a = 0; a < shape.dims; ++a)
    padded.extent[a] = next_fast_size(shape.extent[a] + std::size_t(cube.max_lag));
  const std::size_t px = padded.nx(), py = padded.ny(), pz = padded.nz();
  const std::size_t cx = px / 2 + 1;
  const std::size_t n_real = padded.size();
  const std::size_t n_complex = cx * py * pz;

  auto real = alloc_real(n_real);
  auto spec = alloc_complex(n_complex);
  std::fill_n(real.get(), n_real, 0.0);
  for (std::size_t z = 0; z < shape.nz(); ++z)
    for (std::size_t y = 0; y < shape.ny(); ++y)
      std::copy_n(values.data() + shape.index(0, y, z), shape.nx(),
                  real.get() + padded.index(0, y, z));

  const auto dims = fftw_dims(padded);
  fftw_plan fwd, inv;
  {
    std::lock_guard lock(planner_mutex());
    fwd = fftw_plan_dft_r2c(int(dims.size()), dims.data(), real.get(),
                            reinterpret_cast<fftw_complex*>(spec.get()), FFTW_ESTIMATE);
    inv = fftw_plan_dft_c2r(int(dims.size()), dims.data(),
                            reinterpret_cast<fftw_complex*>(spec.get()), real.get(),
                            FFTW_ESTIMATE);
  }
  fftw_execute(fwd);
  for (std::size_t i = 0; i < n_complex; ++i) spec[i] = std::norm(spec[i]);
  fftw_execute(inv);
  {
    std::lock_guard lock(planner_mutex());
    fftw_destroy_plan(fwd);
    fftw_destroy_plan(inv);
  }

  const double scale = 1.0 / double(n_real);
  std::vector<double> out(cube.size(), 0.0);
  auto wrap = [](int h, std::size_t p) { return h >= 0 ? std::size_t(h) : p - std::size_t(-h); };
  for (std::size_t k = 0; k < out.size(); ++k) {
    const Lag h = cube.lag(k);
    // Lags beyond the data extent have no pairs; skip rather than read aliases.
    bool outside = false;
    for (int a = 0; a < 3; ++a)
      if (std::size_t(std::abs(h.offset[a])) >= shape.extent[a]) outside = true;
    if (outside) continue;
    const std::size_t i =
        padded.index(wrap(h.offset[0], px), wrap(h.offset[1], py), wrap(h.offset[2], pz));
    out[k] = real[i] * scale;
  }
  return out;
}

ComplexFft::ComplexFft(const Shape& grid) : grid_(grid) {
  auto scratch = alloc_complex(grid.size());
  const auto dims = fftw_dims(grid);
  std::lock_guard lock(planner_mutex());
  plan_ = fftw_plan_dft(int(dims.size()), dims.data(),
                        reinterpret_cast<fftw_complex*>(scratch.get()),
                        reinterpret_cast<fftw_complex*>(scratch.get()), FFTW_FORWARD,
                        FFTW_ESTIMATE);
  if (!plan_) throw Error(ErrorCode::InvalidArgument, "FFTW could not plan grid " + grid.str());
}

ComplexFft::~ComplexFft() {
  std::lock_guard lock(planner_mutex());
  fftw_destroy_plan(static_cast<fftw_plan>(plan_));
}

void ComplexFft::forward(std::complex<double>* data) const {
  auto* p = reinterpret_cast<fftw_complex*>(data);
  fftw_execute_dft(static_cast<fftw_plan>(plan_), p, p);
}

}  // namespace gcops::detail
