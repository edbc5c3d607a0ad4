#pragma once

#include <optional>
#include <string>
#include <vector>

#include "gcops/autocovariance.hpp"
#include "gcops/lattice.hpp"

namespace gcops {

struct TestOptions {
  // Radius of the stored lag ball; default_max_lag(shape) when unset.
  std::optional<int> max_lag;
  // Fixed truncation radius instead of the correlation-range rule.
  std::optional<double> delta;
  double delta_threshold = 0.1;
  DeltaRule delta_rule = DeltaRule::MaxQualifying;
  // Warn when the region is small relative to the objects in it.
  bool size_warning = true;
};

struct PValues {
  double bilateral = 1.0;
  double coloc = 0.5;
  double anticoloc = 0.5;
};

struct TestReport {
  CoverageStats stats;
  double delta = 0.0;
  double s_hat = 0.0;
  double t = 0.0;
  double p_bilateral = 1.0;
  double p_coloc = 0.5;
  double p_anticoloc = 0.5;
  int max_lag_used = 0;
  double c0_1 = 0.0;
  double c0_2 = 0.0;
  // Region smaller than 5x the average object size along each axis.
  bool undersized = false;
  std::vector<std::string> warnings;
};

// p-values of the score t: two-sided, upper (colocalisation) and lower
// (anti-colocalisation) tails of the standard normal.
PValues p_values(double t);

// Sum of c1(h) * c2(h) over every integer lag with ||h|| <= delta.
double s_hat(const CovarianceField& c1, const CovarianceField& c2, double delta);

/// Tests independence of two binary channels observed on a common region.
///
/// The score is t = sqrt(n) * d_hat / sqrt(s_hat), asymptotically standard
/// normal when the channels are independent stationary weakly dependent
/// random sets. Throws RegionMismatch, DegenerateChannel, or
/// NonPositiveVariance when s_hat <= 0.
TestReport colocalization_test(const BinaryField& a, const BinaryField& b,
                               const TestOptions& options = {});

}  // namespace gcops
