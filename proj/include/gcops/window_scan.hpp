#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "gcops/colocalization.hpp"
#include "gcops/lattice.hpp"
#include "gcops/simulators.hpp"

namespace gcops {

enum class Placement { Grid, Random };

struct WindowSpec {
  Shape size{50, 50};
  std::size_t stride = 25;
  Placement placement = Placement::Grid;
  // Random placement only.
  std::size_t count = 0;
  std::uint64_t seed = 0;

  // 50x50 in 2D, 50x50x10 in 3D, stride 25, grid.
  static WindowSpec defaults(int dims);
  // Throws WindowLargerThanImage or InvalidArgument.
  void validate(const Shape& image) const;
};

using Site = std::array<std::size_t, 3>;
using Point3 = std::array<double, 3>;

struct WindowEntry {
  Site origin{};
  Point3 centre{};
  std::optional<TestReport> report;
  // Error code name when the window could not be scored.
  std::string skip_reason;
};

struct ScanResult {
  Shape image_shape;
  double level = 0.05;
  std::vector<WindowEntry> entries;
  // Centres of windows whose one-sided colocalisation p-value is < level.
  std::vector<Point3> hits;
  std::optional<ScalarField> smoothed;
  // Number of scored windows that carried a size warning.
  std::size_t undersized_windows = 0;
};

/// Window origins for a placement, in scan order.
///
/// Grid windows never cross the image border; along each axis there are
/// floor((extent - size) / stride) + 1 positions, centred so the unused
/// margin is split between both ends (a single 3D slab therefore sits on the
/// middle planes). Random windows are drawn uniformly among fully contained
/// positions; a draw whose centre falls outside the region is redrawn.
std::vector<Site> window_origins(const Shape& image, const WindowSpec& spec,
                                 std::span<const std::uint8_t> region = {});

/// Runs the colocalisation test in every window, restricted to the region.
/// Windows whose test cannot be computed (empty region, degenerate channel,
/// non-positive variance) are recorded as skipped. Windows are processed in
/// parallel and stored in origin order.
ScanResult scan(const BinaryField& a, const BinaryField& b, const WindowSpec& spec,
                double level = 0.05, const TestOptions& options = {});

/// Gaussian-kernel (Nadaraya-Watson) average of window scores at every
/// image site, bandwidth in pixels. Skipped windows do not contribute.
/// Throws NoScores when no window was scored.
ScalarField smooth_scores(const ScanResult& result, double bandwidth = 5.0);

struct ShiftCurve {
  std::vector<int> shifts;
  // Per shift: scores of every paired frame that could be tested.
  std::vector<std::vector<double>> scores;
  std::vector<double> means;
};

/// Scores over temporal shifts. Shift d pairs frame t of `a` with frame
/// t - d of `b`, dropping pairs outside the sequence; if `b` lags `a` by k
/// frames the mean score peaks at d = -k.
ShiftCurve shift_scan(std::span<const BinaryField> a, std::span<const BinaryField> b,
                      int max_shift = 20, const TestOptions& options = {});

}  // namespace gcops
