#include "gcops/window_scan.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "gcops/error.hpp"
#include "gcops/parallel.hpp"

namespace gcops {

WindowSpec WindowSpec::defaults(int dims) {
  WindowSpec spec;
  spec.size = dims == 3 ? Shape(50, 50, 10) : Shape(50, 50);
  return spec;
}

void WindowSpec::validate(const Shape& image) const {
  if (size.dims != image.dims)
    throw Error(ErrorCode::InvalidArgument, "window " + size.str() + " and image " +
                                                image.str() + " differ in dimension");
  for (int a = 0; a < 3; ++a)
    if (size.extent[a] > image.extent[a])
      throw Error(ErrorCode::WindowLargerThanImage,
                  "window " + size.str() + " exceeds image " + image.str());
  if (stride < 1) throw Error(ErrorCode::InvalidArgument, "stride must be >= 1");
  if (placement == Placement::Random && count == 0)
    throw Error(ErrorCode::InvalidArgument, "random placement needs a positive window count");
}

std::vector<Site> window_origins(const Shape& image, const WindowSpec& spec,
                                 std::span<const std::uint8_t> region) {
  spec.validate(image);
  std::vector<Site> out;
  if (spec.placement == Placement::Grid) {
    std::array<std::vector<std::size_t>, 3> axis;
    for (int a = 0; a < 3; ++a) {
      const std::size_t room = image.extent[a] - spec.size.extent[a];
      const std::size_t n = room / spec.stride + 1;
      const std::size_t margin = (room - (n - 1) * spec.stride) / 2;
      for (std::size_t i = 0; i < n; ++i) axis[a].push_back(margin + i * spec.stride);
    }
    for (std::size_t z : axis[2])
      for (std::size_t y : axis[1])
        for (std::size_t x : axis[0]) out.push_back({x, y, z});
    return out;
  }

  Rng rng(spec.seed);
  constexpr int max_redraws = 1000;
  for (std::size_t w = 0; w < spec.count; ++w) {
    Site o{};
    for (int attempt = 0; attempt < max_redraws; ++attempt) {
      for (int a = 0; a < 3; ++a)
        o[a] = std::size_t(uniform_index(rng, image.extent[a] - spec.size.extent[a] + 1));
      if (region.empty()) break;
      const std::size_t c = image.index(o[0] + spec.size.nx() / 2, o[1] + spec.size.ny() / 2,
                                        o[2] + spec.size.nz() / 2);
      if (region[c]) break;
    }
    out.push_back(o);
  }
  return out;
}

ScanResult scan(const BinaryField& a, const BinaryField& b, const WindowSpec& spec, double level,
                const TestOptions& options) {
  if (!a.same_region(b))
    throw Error(ErrorCode::RegionMismatch, "channels must share shape and observation region");
  const auto origins = window_origins(a.shape(), spec, a.region());

  ScanResult result;
  result.image_shape = a.shape();
  result.level = level;
  result.entries.resize(origins.size());

  parallel_for(origins.size(), [&](std::size_t i) {
    WindowEntry& e = result.entries[i];
    e.origin = origins[i];
    for (int ax = 0; ax < 3; ++ax)
      e.centre[ax] = double(e.origin[ax]) + 0.5 * double(spec.size.extent[ax] - 1);
    try {
      const BinaryField wa = a.crop(e.origin, spec.size);
      const BinaryField wb = b.crop(e.origin, spec.size);
      e.report = colocalization_test(wa, wb, options);
    } catch (const Error& err) {
      switch (err.code()) {
        case ErrorCode::EmptyRegion:
        case ErrorCode::DegenerateChannel:
        case ErrorCode::NonPositiveVariance:
        case ErrorCode::ZeroVariance:
          e.skip_reason = std::string(to_string(err.code()));
          break;
        default:
          throw;
      }
    }
  });

  for (const auto& e : result.entries) {
    if (!e.report) continue;
    if (e.report->p_coloc < level) result.hits.push_back(e.centre);
    if (e.report->undersized) ++result.undersized_windows;
  }
  return result;
}

ScalarField smooth_scores(const ScanResult& result, double bandwidth) {
  if (!(bandwidth > 0)) throw Error(ErrorCode::InvalidArgument, "bandwidth must be positive");
  std::vector<Point3> centres;
  std::vector<double> scores;
  for (const auto& e : result.entries)
    if (e.report) {
      centres.push_back(e.centre);
      scores.push_back(e.report->t);
    }
  if (scores.empty()) throw Error(ErrorCode::NoScores, "no window produced a score");

  const Shape& shape = result.image_shape;
  ScalarField out{shape, std::vector<double>(shape.size(), 0.0)};
  const double inv = 1.0 / (2.0 * bandwidth * bandwidth);
  const std::size_t planes = shape.nz();

  parallel_for(planes * shape.ny(), [&](std::size_t row) {
    const std::size_t y = row % shape.ny(), z = row / shape.ny();
    std::vector<double> d2(centres.size());
    for (std::size_t x = 0; x < shape.nx(); ++x) {
      double nearest = std::numeric_limits<double>::infinity();
      for (std::size_t i = 0; i < centres.size(); ++i) {
        const double dx = double(x) - centres[i][0], dy = double(y) - centres[i][1],
                     dz = double(z) - centres[i][2];
        d2[i] = dx * dx + dy * dy + dz * dz;
        nearest = std::min(nearest, d2[i]);
      }
      // Weights relative to the nearest window keep far sites finite.
      double num = 0.0, den = 0.0;
      for (std::size_t i = 0; i < centres.size(); ++i) {
        const double w = std::exp(-(d2[i] - nearest) * inv);
        num += w * scores[i];
        den += w;
      }
      out.values[shape.index(x, y, z)] = num / den;
    }
  });
  return out;
}

ShiftCurve shift_scan(std::span<const BinaryField> a, std::span<const BinaryField> b,
                      int max_shift, const TestOptions& options) {
  if (a.size() != b.size() || a.empty())
    throw Error(ErrorCode::LengthMismatch, "sequences must be non-empty and of equal length (" +
                                               std::to_string(a.size()) + " vs " +
                                               std::to_string(b.size()) + ")");
  const int frames = int(a.size());
  if (max_shift < 0 || max_shift >= frames)
    throw Error(ErrorCode::InvalidArgument, "max_shift must lie in [0, frames - 1]");

  ShiftCurve curve;
  for (int d = -max_shift; d <= max_shift; ++d) curve.shifts.push_back(d);
  curve.scores.resize(curve.shifts.size());
  curve.means.assign(curve.shifts.size(), std::numeric_limits<double>::quiet_NaN());

  parallel_for(curve.shifts.size(), [&](std::size_t s) {
    const int d = curve.shifts[s];
    for (int t = 0; t < frames; ++t) {
      const int u = t - d;
      if (u < 0 || u >= frames) continue;
      try {
        curve.scores[s].push_back(colocalization_test(a[t], b[u], options).t);
      } catch (const Error& err) {
        if (err.code() != ErrorCode::DegenerateChannel &&
            err.code() != ErrorCode::NonPositiveVariance)
          throw;
      }
    }
    const auto& v = curve.scores[s];
    if (!v.empty()) {
      double sum = 0.0;
      for (double x : v) sum += x;
      curve.means[s] = sum / double(v.size());
    }
  });
  return curve;
}

}  // namespace gcops
