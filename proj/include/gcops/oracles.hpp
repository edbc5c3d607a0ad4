#pragma once

#include <cstdint>
#include <functional>
#include <utility>

#include "gcops/autocovariance.hpp"
#include "gcops/colocalization.hpp"
#include "gcops/lattice.hpp"

namespace gcops {

// Literal double sum over site pairs; same contract as autocov, no FFT.
CovarianceField autocov_bruteforce(const BinaryField& field, int max_lag);

// Pearson correlation of the two indicators over the common region.
double pearson(const BinaryField& a, const BinaryField& b);

struct PermutationResult {
  double p_value = 1.0;
  double observed_r = 0.0;
  std::size_t blocks = 0;
  std::size_t reps = 0;
};

/// Costes-style block-permutation baseline (faithful in spirit only; block
/// geometry and tiling are this library's own).
///
/// The region's bounding box is tiled with whole blocks from its low corner;
/// leftover sites along each axis are dropped from both the observed and the
/// permuted statistics. Blocks of `b` are shuffled uniformly across tile
/// positions, keeping only sites inside the region at the destination. The
/// p-value is (1 + #{permuted r >= observed r}) / (reps + 1).
/// Throws TooFewBlocks when fewer than 20 blocks fit.
PermutationResult permutation_test(const BinaryField& a, const BinaryField& b, const Shape& block,
                                   std::size_t reps = 1000, std::uint64_t seed = 0);

using PairGenerator = std::function<std::pair<BinaryField, BinaryField>(std::uint64_t seed)>;

struct VarianceReport {
  std::size_t reps = 0;
  std::size_t n = 0;
  double mc_variance = 0.0;   // sample variance of d_hat across replicates
  double mean_s_hat = 0.0;
  double predicted = 0.0;     // mean_s_hat / n
  double ratio = 0.0;         // mc_variance / predicted
};

// Monte Carlo check of Var(d_hat) ~ S / n on independent channel pairs.
// Replicate i uses derive_seed(seed, i).
VarianceReport variance_check(const PairGenerator& generator, std::size_t reps,
                              std::uint64_t seed = 0, const TestOptions& options = {});

}  // namespace gcops
