#include "gcops/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "gcops/error.hpp"

namespace gcops {

std::size_t Shape::min_extent() const noexcept {
  std::size_t m = extent[0];
  for (int a = 1; a < dims; ++a) m = std::min(m, extent[a]);
  return m;
}

std::size_t Shape::max_extent() const noexcept {
  std::size_t m = extent[0];
  for (int a = 1; a < dims; ++a) m = std::max(m, extent[a]);
  return m;
}

std::string Shape::str() const {
  std::ostringstream os;
  os << extent[0] << 'x' << extent[1];
  if (dims == 3) os << 'x' << extent[2];
  return os.str();
}

Shape Shape::parse(const std::string& text) {
  std::vector<std::size_t> parts;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, 'x')) {
    if (item.empty() || item.find_first_not_of("0123456789") != std::string::npos)
      throw Error(ErrorCode::InvalidArgument, "bad shape '" + text + "'");
    parts.push_back(std::stoul(item));
  }
  if (parts.size() < 2 || parts.size() > 3 ||
      std::any_of(parts.begin(), parts.end(), [](std::size_t v) { return v == 0; }))
    throw Error(ErrorCode::InvalidArgument, "bad shape '" + text + "', expected WxH or WxHxD");
  return parts.size() == 2 ? Shape(parts[0], parts[1]) : Shape(parts[0], parts[1], parts[2]);
}

double Lag::norm() const noexcept { return std::sqrt(double(norm2())); }

BinaryField::BinaryField(Shape shape, std::vector<std::uint8_t> mask,
                         std::vector<std::uint8_t> region)
    : shape_(shape), mask_(std::move(mask)), region_(std::move(region)) {
  if (shape_.dims != 2 && shape_.dims != 3)
    throw Error(ErrorCode::InvalidArgument, "only 2D and 3D fields are supported");
  if (shape_.dims == 2 && shape_.nz() != 1)
    throw Error(ErrorCode::InvalidArgument, "2D shape with depth != 1");
  if (mask_.size() != shape_.size() || region_.size() != shape_.size())
    throw Error(ErrorCode::ShapeMismatch, "mask/region size does not match shape " + shape_.str());
  for (std::size_t i = 0; i < mask_.size(); ++i) {
    region_[i] = region_[i] ? 1 : 0;
    mask_[i] = (mask_[i] && region_[i]) ? 1 : 0;
    region_count_ += region_[i];
    foreground_count_ += mask_[i];
  }
  if (region_count_ == 0) throw Error(ErrorCode::EmptyRegion, "observation region is empty");
}

BinaryField::BinaryField(Shape shape, std::vector<std::uint8_t> mask)
    : BinaryField(shape, std::move(mask), std::vector<std::uint8_t>(shape.size(), 1)) {}

BinaryField BinaryField::crop(const std::array<std::size_t, 3>& origin, const Shape& size) const {
  if (size.dims != shape_.dims)
    throw Error(ErrorCode::ShapeMismatch, "crop dimensionality differs from field");
  for (int a = 0; a < 3; ++a)
    if (origin[a] + size.extent[a] > shape_.extent[a])
      throw Error(ErrorCode::WindowLargerThanImage,
                  "crop " + size.str() + " does not fit in " + shape_.str());
  std::vector<std::uint8_t> m(size.size()), r(size.size());
  for (std::size_t z = 0; z < size.nz(); ++z)
    for (std::size_t y = 0; y < size.ny(); ++y) {
      const std::size_t src = shape_.index(origin[0], origin[1] + y, origin[2] + z);
      const std::size_t dst = size.index(0, y, z);
      std::copy_n(mask_.begin() + src, size.nx(), m.begin() + dst);
      std::copy_n(region_.begin() + src, size.nx(), r.begin() + dst);
    }
  return BinaryField(size, std::move(m), std::move(r));
}

BinaryField BinaryField::complement() const {
  std::vector<std::uint8_t> m(mask_.size());
  for (std::size_t i = 0; i < m.size(); ++i) m[i] = region_[i] && !mask_[i];
  return BinaryField(shape_, std::move(m), region_);
}

double coverage(const BinaryField& field) {
  return double(field.foreground_count()) / double(field.region_size());
}

CoverageStats empirical_d(const BinaryField& a, const BinaryField& b) {
  if (!a.same_region(b))
    throw Error(ErrorCode::RegionMismatch, "channels must share shape and observation region");
  if (a.degenerate() || b.degenerate())
    throw Error(ErrorCode::DegenerateChannel,
                "a channel is entirely foreground or entirely background within the region");
  const auto ma = a.mask();
  const auto mb = b.mask();
  std::size_t both = 0;
  for (std::size_t i = 0; i < ma.size(); ++i) both += ma[i] & mb[i];

  CoverageStats s;
  s.n = a.region_size();
  s.p1_hat = coverage(a);
  s.p2_hat = coverage(b);
  s.p12_hat = double(both) / double(s.n);
  s.d_hat = s.p12_hat - s.p1_hat * s.p2_hat;
  return s;
}

std::size_t count_components(const BinaryField& field) {
  // Horizontal runs joined by union-find with the runs of the row below and
  // of the plane below.
  const Shape& sh = field.shape();
  const auto mask = field.mask();
  const std::size_t nx = sh.nx(), rows = sh.ny() * sh.nz();

  struct Run {
    std::size_t begin, end;
  };
  std::vector<Run> runs;
  std::vector<std::size_t> row_start(rows + 1, 0);
  for (std::size_t r = 0; r < rows; ++r) {
    row_start[r] = runs.size();
    const std::uint8_t* row = mask.data() + r * nx;
    for (std::size_t x = 0; x < nx;) {
      if (!row[x]) {
        ++x;
        continue;
      }
      const std::size_t b = x;
      while (x < nx && row[x]) ++x;
      runs.push_back({b, x});
    }
  }
  row_start[rows] = runs.size();

  std::vector<std::size_t> parent(runs.size());
  for (std::size_t i = 0; i < parent.size(); ++i) parent[i] = i;
  auto find = [&](std::size_t i) {
    while (parent[i] != i) i = parent[i] = parent[parent[i]];
    return i;
  };
  std::size_t unions = 0;
  auto join_rows = [&](std::size_t r, std::size_t q) {
    std::size_t i = row_start[r], j = row_start[q];
    while (i < row_start[r + 1] && j < row_start[q + 1]) {
      if (runs[i].begin < runs[j].end && runs[j].begin < runs[i].end) {
        const std::size_t a = find(i), b = find(j);
        if (a != b) {
          parent[a] = b;
          ++unions;
        }
      }
      if (runs[i].end < runs[j].end)
        ++i;
      else
        ++j;
    }
  };
  const std::size_t ny = sh.ny();
  for (std::size_t r = 0; r < rows; ++r) {
    if (r % ny > 0) join_rows(r, r - 1);
    if (r >= ny) join_rows(r, r - ny);
  }
  return runs.size() - unions;
}

double average_object_volume(const BinaryField& field) {
  const std::size_t c = count_components(field);
  return c == 0 ? 0.0 : double(field.foreground_count()) / double(c);
}

}  // namespace gcops
