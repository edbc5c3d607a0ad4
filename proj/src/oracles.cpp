#include "gcops/oracles.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>

#include "gcops/error.hpp"
#include "gcops/parallel.hpp"

namespace gcops {

CovarianceField autocov_bruteforce(const BinaryField& field, int max_lag) {
  const Shape& s = field.shape();
  if (max_lag < 0) throw Error(ErrorCode::InvalidArgument, "max_lag must be non-negative");
  if (std::size_t(max_lag) + 1 > s.max_extent())
    throw Error(ErrorCode::LagTooLarge, "max_lag exceeds largest extent - 1");

  const double p = coverage(field);
  const auto mask = field.mask();
  const auto region = field.region();
  const int L = max_lag, Lz = s.dims == 3 ? max_lag : 0;
  const std::size_t side = std::size_t(2 * L + 1);
  const std::size_t total = side * side * std::size_t(2 * Lz + 1);
  std::vector<double> values(total, 0.0);
  std::vector<std::int64_t> counts(total, 0);

  std::size_t k = 0;
  for (int hz = -Lz; hz <= Lz; ++hz)
    for (int hy = -L; hy <= L; ++hy)
      for (int hx = -L; hx <= L; ++hx, ++k) {
        double sum = 0.0;
        std::int64_t pairs = 0;
        // Pairs (x, y) with x - y = h.
        for (long z = 0; z < long(s.nz()); ++z) {
          const long yz = z - hz;
          if (yz < 0 || yz >= long(s.nz())) continue;
          for (long y = 0; y < long(s.ny()); ++y) {
            const long yy = y - hy;
            if (yy < 0 || yy >= long(s.ny())) continue;
            for (long x = 0; x < long(s.nx()); ++x) {
              const long yx = x - hx;
              if (yx < 0 || yx >= long(s.nx())) continue;
              const std::size_t i = s.index(x, y, z), j = s.index(yx, yy, yz);
              if (!region[i] || !region[j]) continue;
              ++pairs;
              sum += (double(mask[i]) - p) * (double(mask[j]) - p);
            }
          }
        }
        counts[k] = pairs;
        values[k] = pairs > 0 ? sum / double(pairs) : 0.0;
      }
  return CovarianceField(s.dims, max_lag, std::move(values),
                         LagCounts(s.dims, max_lag, std::move(counts)));
}

double pearson(const BinaryField& a, const BinaryField& b) {
  if (!a.same_region(b))
    throw Error(ErrorCode::RegionMismatch, "channels must share shape and observation region");
  const auto ma = a.mask(), mb = b.mask();
  double both = 0;
  for (std::size_t i = 0; i < ma.size(); ++i) both += ma[i] & mb[i];
  const double n = double(a.region_size());
  const double sa = double(a.foreground_count()), sb = double(b.foreground_count());
  const double den = std::sqrt((n * sa - sa * sa) * (n * sb - sb * sb));
  return den > 0 ? (n * both - sa * sb) / den : 0.0;
}

namespace {

// Block contents packed 64 sites per word.
struct PackedBlocks {
  std::size_t words = 0;
  std::vector<std::uint64_t> a, b, region;
  std::size_t count = 0;
  bool full_region = true;
};

PackedBlocks pack(const BinaryField& a, const BinaryField& b, const Shape& block) {
  const Shape& s = a.shape();
  const auto region = a.region();
  std::array<std::size_t, 3> lo{s.nx(), s.ny(), s.nz()}, hi{0, 0, 0};
  for (std::size_t z = 0; z < s.nz(); ++z)
    for (std::size_t y = 0; y < s.ny(); ++y)
      for (std::size_t x = 0; x < s.nx(); ++x)
        if (region[s.index(x, y, z)]) {
          const std::array<std::size_t, 3> c{x, y, z};
          for (int ax = 0; ax < 3; ++ax) {
            lo[ax] = std::min(lo[ax], c[ax]);
            hi[ax] = std::max(hi[ax], c[ax] + 1);
          }
        }

  std::array<std::size_t, 3> tiles{};
  for (int ax = 0; ax < 3; ++ax) tiles[ax] = (hi[ax] - lo[ax]) / block.extent[ax];

  PackedBlocks out;
  out.count = tiles[0] * tiles[1] * tiles[2];
  if (out.count < 20)
    throw Error(ErrorCode::TooFewBlocks, "only " + std::to_string(out.count) + " blocks of " +
                                             block.str() + " fit in the region");
  const std::size_t volume = block.size();
  out.words = (volume + 63) / 64;
  out.a.assign(out.count * out.words, 0);
  out.b.assign(out.count * out.words, 0);
  out.region.assign(out.count * out.words, 0);
  const auto ma = a.mask(), mb = b.mask();

  std::size_t k = 0;
  for (std::size_t tz = 0; tz < tiles[2]; ++tz)
    for (std::size_t ty = 0; ty < tiles[1]; ++ty)
      for (std::size_t tx = 0; tx < tiles[0]; ++tx, ++k) {
        std::size_t bit = 0;
        for (std::size_t z = 0; z < block.nz(); ++z)
          for (std::size_t y = 0; y < block.ny(); ++y)
            for (std::size_t x = 0; x < block.nx(); ++x, ++bit) {
              const std::size_t i = s.index(lo[0] + tx * block.nx() + x,
                                            lo[1] + ty * block.ny() + y,
                                            lo[2] + tz * block.nz() + z);
              const std::size_t w = k * out.words + bit / 64;
              const std::uint64_t m = std::uint64_t(1) << (bit % 64);
              if (ma[i]) out.a[w] |= m;
              if (mb[i]) out.b[w] |= m;
              if (region[i]) out.region[w] |= m;
              else out.full_region = false;
            }
      }
  return out;
}

double correlation(double n, double sa, double sb, double sab) {
  const double den = std::sqrt((n * sa - sa * sa) * (n * sb - sb * sb));
  return den > 0 ? (n * sab - sa * sb) / den : 0.0;
}

}  // namespace

PermutationResult permutation_test(const BinaryField& a, const BinaryField& b, const Shape& block,
                                   std::size_t reps, std::uint64_t seed) {
  if (!a.same_region(b))
    throw Error(ErrorCode::RegionMismatch, "channels must share shape and observation region");
  if (block.dims != a.dims() || block.size() == 0)
    throw Error(ErrorCode::InvalidArgument, "block must match the field dimension");
  if (reps == 0) throw Error(ErrorCode::InvalidArgument, "reps must be positive");

  const PackedBlocks pb = pack(a, b, block);
  const std::size_t W = pb.words;
  auto pop = [](std::uint64_t v) { return double(std::popcount(v)); };

  double n = 0, sa = 0, sb = 0, sab = 0;
  for (std::size_t w = 0; w < pb.count * W; ++w) {
    n += pop(pb.region[w]);
    sa += pop(pb.a[w]);
    sb += pop(pb.b[w]);
    sab += pop(pb.a[w] & pb.b[w]);
  }
  PermutationResult result;
  result.blocks = pb.count;
  result.reps = reps;
  result.observed_r = correlation(n, sa, sb, sab);

  Rng rng(seed);
  std::vector<std::size_t> perm(pb.count);
  std::iota(perm.begin(), perm.end(), 0);
  std::size_t exceed = 0;
  for (std::size_t r = 0; r < reps; ++r) {
    for (std::size_t i = pb.count - 1; i > 0; --i)
      std::swap(perm[i], perm[uniform_index(rng, i + 1)]);
    double s_ab = 0, s_b = pb.full_region ? sb : 0.0;
    for (std::size_t i = 0; i < pb.count; ++i) {
      const std::uint64_t* ai = &pb.a[i * W];
      const std::uint64_t* bj = &pb.b[perm[i] * W];
      for (std::size_t w = 0; w < W; ++w) s_ab += pop(ai[w] & bj[w]);
      if (!pb.full_region) {
        const std::uint64_t* ri = &pb.region[i * W];
        for (std::size_t w = 0; w < W; ++w) s_b += pop(bj[w] & ri[w]);
      }
    }
    if (correlation(n, sa, s_b, s_ab) >= result.observed_r - 1e-12) ++exceed;
  }
  result.p_value = double(1 + exceed) / double(reps + 1);
  return result;
}

VarianceReport variance_check(const PairGenerator& generator, std::size_t reps,
                              std::uint64_t seed, const TestOptions& options) {
  if (reps < 2) throw Error(ErrorCode::InvalidArgument, "variance check needs >= 2 replicates");
  std::vector<double> d(reps), s(reps);
  std::vector<std::size_t> n(reps);
  parallel_for(reps, [&](std::size_t i) {
    const auto [a, b] = generator(derive_seed(seed, i));
    const TestReport r = colocalization_test(a, b, options);
    d[i] = r.stats.d_hat;
    s[i] = r.s_hat;
    n[i] = r.stats.n;
  });
  if (std::any_of(n.begin(), n.end(), [&](std::size_t v) { return v != n[0]; }))
    throw Error(ErrorCode::InvalidArgument, "generator produced regions of different sizes");

  VarianceReport rep;
  rep.reps = reps;
  rep.n = n[0];
  const double mean_d = std::accumulate(d.begin(), d.end(), 0.0) / double(reps);
  double ss = 0;
  for (double v : d) ss += (v - mean_d) * (v - mean_d);
  rep.mc_variance = ss / double(reps - 1);
  rep.mean_s_hat = std::accumulate(s.begin(), s.end(), 0.0) / double(reps);
  rep.predicted = rep.mean_s_hat / double(rep.n);
  rep.ratio = rep.mc_variance / rep.predicted;
  return rep;
}

}  // namespace gcops
