#include <doctest.h>

#include <random>

#include "gcops/error.hpp"
#include "gcops/oracles.hpp"
#include "gcops/simulators.hpp"
#include "support/reference.hpp"

using namespace gcops;

TEST_SUITE("oracles") {
  TEST_CASE("brute-force autocovariance trivial values") {
    std::mt19937_64 rng(1);
    const auto f = ref::random_mask(Shape(20, 20), 0.25, rng);
    const double p = coverage(f);
    CHECK(autocov_bruteforce(f, 3).c0() == doctest::Approx(p * (1 - p)).epsilon(1e-14));
    const BinaryField full(Shape(10, 10), std::vector<std::uint8_t>(100, 1));
    const auto c = autocov_bruteforce(full, 3);
    for (double v : c.raw()) CHECK(v == 0.0);
    CHECK_THROWS_AS(autocov_bruteforce(full, 10), Error);
  }

  TEST_CASE("pearson of identical and complementary masks") {
    const auto a = simulate_bernoulli(Shape(50, 50), 0.4, 2);
    CHECK(pearson(a, a) == doctest::Approx(1.0));
    CHECK(pearson(a, a.complement()) == doctest::Approx(-1.0));
  }

  TEST_CASE("permutation test on identical masks") {
    const auto a = simulate_bernoulli(Shape(64, 64), 0.3, 3);
    const auto r = permutation_test(a, a, Shape(4, 4), 999, 1);
    CHECK(r.p_value <= 1.0 / 1000.0 + 1e-15);
    CHECK(r.blocks == 256);
  }

  TEST_CASE("permutation test needs enough blocks") {
    const auto a = simulate_bernoulli(Shape(20, 20), 0.3, 3);
    try {
      permutation_test(a, a, Shape(5, 5), 10);
      FAIL("expected TooFewBlocks");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::TooFewBlocks);
    }
  }

  TEST_CASE("permutation p-values are uniform under exchangeable nulls") {
    const int runs = 200;
    std::vector<double> p(runs);
    parallel_for(runs, [&](std::size_t i) {
      const auto a = simulate_bernoulli(Shape(128, 128), 0.3, derive_seed(8, 2 * i));
      const auto b = simulate_bernoulli(Shape(128, 128), 0.3, derive_seed(8, 2 * i + 1));
      p[i] = permutation_test(a, b, Shape(2, 2), 199, derive_seed(9, i)).p_value;
    });
    // Discrete p-values on a grid of 1/200; allow for that in the KS distance.
    CHECK(ref::ks_p_value(std::max(0.0, ref::ks_uniform(p) - 1.0 / 200.0), runs) > 0.01);
  }

  TEST_CASE("permutation test masks sites outside the region") {
    const Shape s(64, 64);
    std::vector<std::uint8_t> region(s.size(), 1);
    for (long y = 0; y < 64; ++y)
      for (long x = 0; x < 64; ++x)
        if ((x - 32) * (x - 32) + (y - 32) * (y - 32) > 900) region[s.index(x, y)] = 0;
    const auto base = simulate_bernoulli(s, 0.4, 5);
    const BinaryField a(s, {base.mask().begin(), base.mask().end()}, region);
    const auto r = permutation_test(a, a, Shape(4, 4), 199, 2);
    CHECK(r.observed_r == doctest::Approx(1.0));
    CHECK(r.p_value <= 0.01);
  }

  TEST_CASE("variance law on Bernoulli pairs") {
    const PairGenerator gen = [](std::uint64_t seed) {
      return std::pair{simulate_bernoulli(Shape(128, 128), 0.3, derive_seed(seed, 0)),
                       simulate_bernoulli(Shape(128, 128), 0.3, derive_seed(seed, 1))};
    };
    TestOptions o;
    const auto r = variance_check(gen, 2000, 17, o);
    CHECK(r.n == 128 * 128);
    CHECK(r.ratio >= 0.8);
    CHECK(r.ratio <= 1.2);
    CHECK(r.mean_s_hat == doctest::Approx(0.21 * 0.21).epsilon(0.05));
  }
}
