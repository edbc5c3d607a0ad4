#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "gcops/lattice.hpp"
#include "gcops/simulators.hpp"

namespace gcops {

struct Segmentation {
  BinaryField field;
  // "EmptyForeground" / "EmptyBackground" when the threshold leaves one
  // class empty; the independence test will reject such a channel.
  std::vector<std::string> warnings;
};

// Foreground = {intensity > tau} within the region (full image if empty).
Segmentation threshold(const ScalarField& image, double tau,
                       std::span<const std::uint8_t> region = {});

// Otsu threshold on a 256-bin histogram spanning the intensity range of the
// region. The returned value separates bins: sites above it are foreground.
// Throws DegenerateHistogram for constant images.
double otsu(const ScalarField& image, std::span<const std::uint8_t> region = {});

}  // namespace gcops
