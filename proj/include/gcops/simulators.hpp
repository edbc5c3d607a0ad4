#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <memory>
#include <utility>
#include <vector>

#include "gcops/lattice.hpp"
#include "gcops/parallel.hpp"

namespace gcops {

// Real-valued image on a lattice, x-fastest like BinaryField.
struct ScalarField {
  Shape shape;
  std::vector<double> values;
};

/// Stationary Gaussian random field sampler with covariance
/// sigma^2 exp(-r^2 / alpha^2), by circulant embedding.
///
/// The embedding torus pads each axis by at least 6 alpha, so the periodic
/// covariance differs from the target by at most exp(-36) on the lags the
/// output can see. Each transform yields two independent fields (real and
/// imaginary parts). The eigenvalue table is computed once per sampler.
class GaussianFieldSampler {
 public:
  GaussianFieldSampler(const Shape& shape, double sigma, double alpha);
  ~GaussianFieldSampler();
  GaussianFieldSampler(GaussianFieldSampler&&) noexcept;
  GaussianFieldSampler& operator=(GaussianFieldSampler&&) noexcept;

  std::pair<ScalarField, ScalarField> sample_pair(Rng& rng) const;
  ScalarField sample(Rng& rng) const { return sample_pair(rng).first; }

  const Shape& shape() const noexcept { return shape_; }
  const Shape& embedding() const noexcept;

 private:
  struct Impl;
  Shape shape_;
  std::unique_ptr<Impl> impl_;
};

ScalarField sample_grf(const Shape& shape, double sigma, double alpha, std::uint64_t seed);

struct LevelSetParams {
  Shape shape{250, 250};
  double alpha_x = 8.0;
  double alpha_y = 8.0;
  double alpha_eps = 8.0;
  double sigma0 = 1.0;
  // Weight of the shared component; the pointwise correlation of U and V.
  double rho0 = 0.0;
  double tau1 = 1.0;
  double tau2 = 1.0;
  std::uint64_t seed = 0;

  void validate() const;
};

struct LevelSetAnalytic {
  double p1 = 0.0;
  double p2 = 0.0;
  double rho = 0.0;
};

struct LevelSetSample {
  BinaryField first;
  BinaryField second;
  LevelSetAnalytic analytic;
};

/// Thresholded correlated Gaussian fields: U = X + eps, V = Y + eps, with
/// first = {U > tau1 sigma} and second = {V > tau2 sigma}, where
/// sigma^2 = sigma0^2 / (1 - rho0) is the common variance of U and V.
///
/// Holds one sampler per distinct scale so repeated draws skip the
/// embedding set-up. Calls with different seeds are independent.
class LevelSetGenerator {
 public:
  explicit LevelSetGenerator(LevelSetParams params);

  LevelSetSample operator()(std::uint64_t seed) const;
  LevelSetSample operator()() const { return (*this)(params_.seed); }
  const LevelSetParams& params() const noexcept { return params_; }
  const LevelSetAnalytic& analytic() const noexcept { return analytic_; }

 private:
  LevelSetParams params_;
  LevelSetAnalytic analytic_;
  std::map<double, GaussianFieldSampler> samplers_;
};

LevelSetSample simulate_level_sets(const LevelSetParams& params);

// Correlation of the indicators 1{U > tau1} and 1{V > tau2} for a standard
// bivariate normal pair with correlation rho0. The orthant probability is
// written as p1 p2 plus an integral over the correlation parameter and
// evaluated by adaptive Gauss-Kronrod quadrature.
double binary_correlation(double rho0, double tau1, double tau2);

// Inverse of binary_correlation in rho0 on [0, 1), by bisection.
double rho0_for_correlation(double target, double tau1, double tau2);

struct SpotParams {
  Shape shape{256, 256};
  int n_red = 100;
  int n_green = 100;
  // Share of green spots planted next to a distinct red spot.
  double forced_fraction = 0.0;
  double neighbor_distance = 1.0;
  // Standard deviation of the Gaussian spot profile, pixels.
  double spot_radius = 2.0;
  // Additive noise sd relative to a unit spot peak.
  double noise_sd = 0.2;
  // Integer translation applied to the green channel, border-truncated.
  std::array<int, 3> shift{0, 0, 0};
  std::uint64_t seed = 0;

  void validate() const;
};

struct SpotSample {
  ScalarField red;
  ScalarField green;
  // Noise-free spot profiles above half of the unit peak.
  BinaryField red_mask;
  BinaryField green_mask;
};

SpotSample simulate_spots(const SpotParams& params);

// i.i.d. Bernoulli(p) mask over a full rectangular region.
BinaryField simulate_bernoulli(const Shape& shape, double p, std::uint64_t seed);

}  // namespace gcops
