#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace gcops {

// Extents of a 2D or 3D lattice. 2D shapes keep z = 1 so that all loops can
// run over three axes; `dims` records which axes are real.
struct Shape {
  int dims = 2;
  std::array<std::size_t, 3> extent{1, 1, 1};

  Shape() = default;
  Shape(std::size_t nx, std::size_t ny) : dims(2), extent{nx, ny, 1} {}
  Shape(std::size_t nx, std::size_t ny, std::size_t nz) : dims(3), extent{nx, ny, nz} {}

  std::size_t nx() const noexcept { return extent[0]; }
  std::size_t ny() const noexcept { return extent[1]; }
  std::size_t nz() const noexcept { return extent[2]; }
  std::size_t size() const noexcept { return extent[0] * extent[1] * extent[2]; }
  std::size_t index(std::size_t x, std::size_t y, std::size_t z = 0) const noexcept {
    return (z * extent[1] + y) * extent[0] + x;
  }
  std::size_t min_extent() const noexcept;
  std::size_t max_extent() const noexcept;

  bool operator==(const Shape&) const = default;

  // "256x256" or "250x250x60".
  std::string str() const;
  static Shape parse(const std::string& text);
};

// Integer translation vector h. Unused axes are zero.
struct Lag {
  std::array<int, 3> offset{0, 0, 0};

  long norm2() const noexcept {
    return long(offset[0]) * offset[0] + long(offset[1]) * offset[1] + long(offset[2]) * offset[2];
  }
  double norm() const noexcept;
  Lag operator-() const noexcept { return Lag{{-offset[0], -offset[1], -offset[2]}}; }
  bool operator==(const Lag&) const = default;
};

/// Binary image restricted to an observation region.
///
/// `mask` is the foreground (set membership) and `region` the observation
/// window; both are stored one byte per site in x-fastest order. The
/// constructor intersects mask with region, so a site outside the region is
/// never foreground, and rejects an empty region.
class BinaryField {
 public:
  BinaryField(Shape shape, std::vector<std::uint8_t> mask, std::vector<std::uint8_t> region);
  // Full rectangular region.
  BinaryField(Shape shape, std::vector<std::uint8_t> mask);

  const Shape& shape() const noexcept { return shape_; }
  int dims() const noexcept { return shape_.dims; }
  std::span<const std::uint8_t> mask() const noexcept { return mask_; }
  std::span<const std::uint8_t> region() const noexcept { return region_; }
  bool foreground(std::size_t i) const noexcept { return mask_[i] != 0; }
  bool in_region(std::size_t i) const noexcept { return region_[i] != 0; }

  // n = |region|.
  std::size_t region_size() const noexcept { return region_count_; }
  std::size_t foreground_count() const noexcept { return foreground_count_; }
  bool full_region() const noexcept { return region_count_ == shape_.size(); }

  // Foreground count is 0 or equal to the region size.
  bool degenerate() const noexcept {
    return foreground_count_ == 0 || foreground_count_ == region_count_;
  }

  bool same_region(const BinaryField& other) const noexcept {
    return shape_ == other.shape_ && region_ == other.region_;
  }

  // Sub-block [origin, origin + size) with the region cropped accordingly.
  BinaryField crop(const std::array<std::size_t, 3>& origin, const Shape& size) const;

  // Region sites that are not foreground.
  BinaryField complement() const;

 private:
  Shape shape_;
  std::vector<std::uint8_t> mask_;
  std::vector<std::uint8_t> region_;
  std::size_t region_count_ = 0;
  std::size_t foreground_count_ = 0;
};

struct CoverageStats {
  double p1_hat = 0.0;
  double p2_hat = 0.0;
  double p12_hat = 0.0;
  double d_hat = 0.0;
  std::size_t n = 0;
};

// Fraction of region sites that are foreground.
double coverage(const BinaryField& field);

// Coverage proportions of both channels, their joint coverage, and the
// departure from independence d_hat = p12_hat - p1_hat * p2_hat.
// Throws RegionMismatch or DegenerateChannel.
CoverageStats empirical_d(const BinaryField& a, const BinaryField& b);

// Component labelling with 2*d-neighbour connectivity, restricted to
// foreground sites. Returns the number of components.
std::size_t count_components(const BinaryField& field);

// Mean foreground volume per connected component; 0 for empty masks.
double average_object_volume(const BinaryField& field);

}  // namespace gcops
