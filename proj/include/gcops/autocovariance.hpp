#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "gcops/lattice.hpp"

namespace gcops {

// Number of ordered region pairs (x, y) with x - y = h, for every h in the
// cube [-max_lag, max_lag]^d. Indexed like CovarianceField.
class LagCounts {
 public:
  LagCounts(int dims, int max_lag, std::vector<std::int64_t> counts);

  int dims() const noexcept { return dims_; }
  int max_lag() const noexcept { return max_lag_; }
  // Zero for lags outside the stored cube.
  std::int64_t at(const Lag& h) const noexcept;
  std::span<const std::int64_t> raw() const noexcept { return counts_; }

 private:
  int dims_;
  int max_lag_;
  std::vector<std::int64_t> counts_;
};

/// Empirical autocovariance of a binary field over a cube of lags, together
/// with the pair counts used to normalise it.
///
/// Values are stored for the whole cube [-max_lag, max_lag]^d, but the
/// "stored ball" used by select_delta and s_hat is the set of lags with
/// Euclidean norm <= max_lag.
class CovarianceField {
 public:
  CovarianceField(int dims, int max_lag, std::vector<double> values, LagCounts counts);

  int dims() const noexcept { return dims_; }
  int max_lag() const noexcept { return max_lag_; }
  double c0() const noexcept;
  double at(const Lag& h) const;
  std::int64_t count(const Lag& h) const noexcept { return counts_.at(h); }
  const LagCounts& lag_counts() const noexcept { return counts_; }

  // Lags h with ||h|| <= radius, all signs included, in cube order.
  // Throws LagTooLarge if radius exceeds max_lag.
  std::vector<Lag> ball(double radius) const;

  std::span<const double> raw() const noexcept { return values_; }

 private:
  int dims_;
  int max_lag_;
  std::vector<double> values_;
  LagCounts counts_;
};

// Default truncation of the lag ball: a quarter of the smallest extent,
// capped at 64 and at (largest extent - 1).
int default_max_lag(const Shape& shape);

LagCounts lag_counts(const Shape& shape, std::span<const std::uint8_t> region, int max_lag);

/// Autocovariance of the centred indicator 1_mask - p_hat inside the region,
/// each lag divided by its pair count (zero where there are no pairs).
/// Computed by zero-padded FFT correlation. `counts` may be supplied when
/// several fields share a region.
CovarianceField autocov(const BinaryField& field, int max_lag,
                        const std::optional<LagCounts>& counts = std::nullopt);

enum class DeltaRule {
  // Largest ||h|| among lags where both normalised covariances exceed the
  // threshold.
  MaxQualifying,
  // Largest r such that every lag with ||h|| <= r qualifies.
  ContiguousBall,
};

struct DeltaSelection {
  double delta = 0.0;
  // A lag on the outer shell of the stored ball qualified, so the true range
  // may exceed max_lag.
  bool saturated = false;
};

DeltaSelection choose_delta(const CovarianceField& c1, const CovarianceField& c2,
                            double threshold = 0.1, DeltaRule rule = DeltaRule::MaxQualifying);

inline double select_delta(const CovarianceField& c1, const CovarianceField& c2,
                           double threshold = 0.1, DeltaRule rule = DeltaRule::MaxQualifying) {
  return choose_delta(c1, c2, threshold, rule).delta;
}

}  // namespace gcops
