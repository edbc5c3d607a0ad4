#include "gcops/autocovariance.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "fft.hpp"
#include "gcops/error.hpp"

namespace gcops {

namespace {

detail::LagCube cube_for(int dims, int max_lag) { return detail::LagCube{dims, max_lag}; }

void check_max_lag(const Shape& shape, int max_lag) {
  if (max_lag < 0) throw Error(ErrorCode::InvalidArgument, "max_lag must be non-negative");
  if (std::size_t(max_lag) + 1 > shape.max_extent())
    throw Error(ErrorCode::LagTooLarge, "max_lag " + std::to_string(max_lag) +
                                            " exceeds largest extent - 1 of " + shape.str());
}

}  // namespace

LagCounts::LagCounts(int dims, int max_lag, std::vector<std::int64_t> counts)
    : dims_(dims), max_lag_(max_lag), counts_(std::move(counts)) {
  if (counts_.size() != cube_for(dims, max_lag).size())
    throw Error(ErrorCode::ShapeMismatch, "lag count table has the wrong size");
}

std::int64_t LagCounts::at(const Lag& h) const noexcept {
  const auto cube = cube_for(dims_, max_lag_);
  return cube.contains(h) ? counts_[cube.index(h)] : 0;
}

CovarianceField::CovarianceField(int dims, int max_lag, std::vector<double> values,
                                 LagCounts counts)
    : dims_(dims), max_lag_(max_lag), values_(std::move(values)), counts_(std::move(counts)) {
  if (values_.size() != cube_for(dims, max_lag).size())
    throw Error(ErrorCode::ShapeMismatch, "covariance table has the wrong size");
  if (counts_.dims() != dims || counts_.max_lag() != max_lag)
    throw Error(ErrorCode::ShapeMismatch, "lag counts do not match covariance table");
}

double CovarianceField::c0() const noexcept { return values_[cube_for(dims_, max_lag_).index(Lag{})]; }

double CovarianceField::at(const Lag& h) const {
  const auto cube = cube_for(dims_, max_lag_);
  if (!cube.contains(h)) throw Error(ErrorCode::LagTooLarge, "lag outside stored cube");
  return values_[cube.index(h)];
}

std::vector<Lag> CovarianceField::ball(double radius) const {
  if (radius < 0) throw Error(ErrorCode::InvalidArgument, "negative radius");
  if (radius > double(max_lag_) + 1e-9)
    throw Error(ErrorCode::LagTooLarge, "radius " + std::to_string(radius) +
                                            " exceeds stored max_lag " + std::to_string(max_lag_));
  const auto cube = cube_for(dims_, max_lag_);
  const double r2 = radius * radius + 1e-9;
  std::vector<Lag> out;
  for (std::size_t k = 0; k < cube.size(); ++k) {
    const Lag h = cube.lag(k);
    if (double(h.norm2()) <= r2) out.push_back(h);
  }
  return out;
}

int default_max_lag(const Shape& shape) {
  int lag = int(std::min<std::size_t>(shape.min_extent() / 4, 64));
  return std::min(lag, int(shape.max_extent()) - 1);
}

LagCounts lag_counts(const Shape& shape, std::span<const std::uint8_t> region, int max_lag) {
  check_max_lag(shape, max_lag);
  if (region.size() != shape.size()) throw Error(ErrorCode::ShapeMismatch, "region size mismatch");
  std::vector<double> indicator(region.begin(), region.end());
  const auto cube = cube_for(shape.dims, max_lag);
  const auto corr = detail::autocorrelation(indicator, shape, cube);
  std::vector<std::int64_t> counts(corr.size());
  for (std::size_t k = 0; k < corr.size(); ++k) counts[k] = std::llround(corr[k]);
  return LagCounts(shape.dims, max_lag, std::move(counts));
}

CovarianceField autocov(const BinaryField& field, int max_lag,
                        const std::optional<LagCounts>& counts) {
  const Shape& shape = field.shape();
  check_max_lag(shape, max_lag);
  LagCounts n_pairs = counts ? *counts : lag_counts(shape, field.region(), max_lag);
  if (n_pairs.dims() != shape.dims || n_pairs.max_lag() != max_lag)
    throw Error(ErrorCode::ShapeMismatch, "supplied lag counts do not match request");

  const double p = coverage(field);
  const auto mask = field.mask();
  const auto region = field.region();
  std::vector<double> centred(shape.size());
  for (std::size_t i = 0; i < centred.size(); ++i)
    centred[i] = region[i] ? double(mask[i]) - p : 0.0;

  const auto cube = cube_for(shape.dims, max_lag);
  auto sums = detail::autocorrelation(centred, shape, cube);
  std::vector<double> values(cube.size(), 0.0);
  const auto raw_counts = n_pairs.raw();
  for (std::size_t k = 0; k < values.size(); ++k) {
    if (raw_counts[k] <= 0) continue;
    // Average the two transform outputs for h and -h so symmetry is exact.
    const std::size_t mirror = cube.index(-cube.lag(k));
    values[k] = 0.5 * (sums[k] + sums[mirror]) / double(raw_counts[k]);
  }
  // Mean of the squared centred indicator, exact.
  values[cube.index(Lag{})] = p * (1.0 - p);
  return CovarianceField(shape.dims, max_lag, std::move(values), std::move(n_pairs));
}

DeltaSelection choose_delta(const CovarianceField& c1, const CovarianceField& c2,
                            double threshold, DeltaRule rule) {
  if (c1.c0() <= 0 || c2.c0() <= 0)
    throw Error(ErrorCode::ZeroVariance, "zero-lag covariance must be positive (c0_1=" +
                                             std::to_string(c1.c0()) +
                                             ", c0_2=" + std::to_string(c2.c0()) + ")");
  if (c1.dims() != c2.dims() || c1.max_lag() != c2.max_lag())
    throw Error(ErrorCode::ShapeMismatch, "covariance fields cover different lag sets");

  const int max_lag = c1.max_lag();
  // Per squared norm: does any lag qualify, do all of them?
  std::map<long, std::pair<bool, bool>> shells;
  for (const Lag& h : c1.ball(double(max_lag))) {
    if (h.norm2() == 0) continue;
    const bool ok = c1.at(h) / c1.c0() > threshold && c2.at(h) / c2.c0() > threshold;
    auto [it, inserted] = shells.try_emplace(h.norm2(), ok, ok);
    if (!inserted) {
      it->second.first = it->second.first || ok;
      it->second.second = it->second.second && ok;
    }
  }

  DeltaSelection sel;
  long best = 0;
  for (const auto& [n2, flags] : shells) {
    const auto [any, all] = flags;
    if (rule == DeltaRule::MaxQualifying) {
      if (any) best = n2;
    } else {
      if (!all) break;
      best = n2;
    }
  }
  sel.delta = std::sqrt(double(best));
  sel.saturated = best > 0 && sel.delta > double(max_lag) - 1.0;
  return sel;
}

}  // namespace gcops
