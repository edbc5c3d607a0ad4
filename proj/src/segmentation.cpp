#include "gcops/segmentation.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

#include "gcops/error.hpp"

namespace gcops {

namespace {

std::vector<std::uint8_t> region_or_full(const ScalarField& image,
                                         std::span<const std::uint8_t> region) {
  if (region.empty()) return std::vector<std::uint8_t>(image.values.size(), 1);
  if (region.size() != image.values.size())
    throw Error(ErrorCode::ShapeMismatch, "region does not match image size");
  return {region.begin(), region.end()};
}

}  // namespace

Segmentation threshold(const ScalarField& image, double tau,
                       std::span<const std::uint8_t> region) {
  if (image.values.size() != image.shape.size())
    throw Error(ErrorCode::ShapeMismatch, "image data does not match its shape");
  auto r = region_or_full(image, region);
  std::vector<std::uint8_t> m(image.values.size());
  for (std::size_t i = 0; i < m.size(); ++i) m[i] = r[i] && image.values[i] > tau;

  Segmentation out{BinaryField(image.shape, std::move(m), std::move(r)), {}};
  if (out.field.foreground_count() == 0) out.warnings.emplace_back("EmptyForeground");
  if (out.field.foreground_count() == out.field.region_size())
    out.warnings.emplace_back("EmptyBackground");
  return out;
}

double otsu(const ScalarField& image, std::span<const std::uint8_t> region) {
  const auto r = region_or_full(image, region);
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (std::size_t i = 0; i < r.size(); ++i)
    if (r[i]) {
      lo = std::min(lo, image.values[i]);
      hi = std::max(hi, image.values[i]);
    }
  if (!(hi > lo)) throw Error(ErrorCode::DegenerateHistogram, "image has a single intensity level");

  constexpr int bins = 256;
  const double width = (hi - lo) / bins;
  std::array<double, bins> count{}, sum{};
  std::array<double, bins> bin_min, bin_max;
  bin_min.fill(std::numeric_limits<double>::infinity());
  bin_max.fill(-std::numeric_limits<double>::infinity());
  for (std::size_t i = 0; i < r.size(); ++i) {
    if (!r[i]) continue;
    const double v = image.values[i];
    const int b = std::min(bins - 1, int((v - lo) / width));
    count[b] += 1;
    sum[b] += v;
    bin_min[b] = std::min(bin_min[b], v);
    bin_max[b] = std::max(bin_max[b], v);
  }

  double total = 0, total_sum = 0;
  for (int b = 0; b < bins; ++b) {
    total += count[b];
    total_sum += sum[b];
  }
  double w0 = 0, s0 = 0, best = -1;
  int split = 0;
  for (int k = 0; k < bins - 1; ++k) {
    w0 += count[k];
    s0 += sum[k];
    const double w1 = total - w0;
    if (w0 == 0 || w1 == 0) continue;
    const double mu0 = s0 / w0, mu1 = (total_sum - s0) / w1;
    const double between = w0 * w1 * (mu0 - mu1) * (mu0 - mu1);
    if (between > best) {
      best = between;
      split = k;
    }
  }
  // Midway between the brightest background sample and the dimmest
  // foreground sample, so `> tau` reproduces the histogram split.
  double below = -std::numeric_limits<double>::infinity();
  double above = std::numeric_limits<double>::infinity();
  for (int b = 0; b <= split; ++b) below = std::max(below, bin_max[b]);
  for (int b = split + 1; b < bins; ++b) above = std::min(above, bin_min[b]);
  return 0.5 * (below + above);
}

}  // namespace gcops
