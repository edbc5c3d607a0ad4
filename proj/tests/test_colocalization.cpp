#include <doctest.h>

#include <cmath>
#include <numeric>
#include <random>

#include "gcops/colocalization.hpp"
#include "gcops/error.hpp"
#include "gcops/normal.hpp"
#include "gcops/oracles.hpp"
#include "gcops/simulators.hpp"
#include "support/reference.hpp"

using namespace gcops;

TEST_SUITE("colocalization") {
  TEST_CASE("p-values at t = 0 and their identities") {
    const auto p0 = p_values(0.0);
    CHECK(p0.bilateral == 1.0);
    CHECK(p0.coloc == 0.5);
    for (double t : {-6.0, -1.7, -0.2, 0.4, 2.5, 9.0}) {
      const auto p = p_values(t);
      CHECK(std::abs(p.coloc + p.anticoloc - 1.0) < 1e-15);
      CHECK(p.bilateral == 2.0 * std::min(p.coloc, p.anticoloc));
      CHECK(std::abs(p.bilateral - 2.0 * (1.0 - phi(std::abs(t)))) < 1e-15);
    }
  }

  TEST_CASE("s_hat at delta 0 and against a white second channel") {
    std::mt19937_64 rng(4);
    const Shape s(64, 64);
    const auto a = ref::random_mask(s, 0.3, rng), b = ref::random_mask(s, 0.6, rng);
    const auto c1 = autocov(a, 6), c2 = autocov(b, 6);
    const double pa = coverage(a), pb = coverage(b);
    CHECK(s_hat(c1, c2, 0.0) == doctest::Approx(pa * (1 - pa) * pb * (1 - pb)).epsilon(1e-14));

    std::vector<double> w(c2.raw().size(), 0.0);
    const std::size_t centre = w.size() / 2;
    w[centre] = 0.7;
    const CovarianceField white(2, 6, w, c2.lag_counts());
    for (double d : {0.0, 1.0, 2.5, 6.0})
      CHECK(s_hat(c1, white, d) == doctest::Approx(c1.c0() * 0.7).epsilon(1e-14));
    CHECK_THROWS_AS(s_hat(c1, c2, 6.5), Error);
  }

  TEST_CASE("s_hat equals the sum over the 29 lags of norm <= 3") {
    std::mt19937_64 rng(9);
    const Shape s(64, 64);
    const auto a = ref::random_mask(s, 0.4, rng), b = ref::random_mask(s, 0.2, rng);
    const auto c1 = autocov_bruteforce(a, 5), c2 = autocov_bruteforce(b, 5);
    const auto ball = ref::lag_ball(2, 3.0);
    REQUIRE(ball.size() == 29);
    double direct = 0;
    for (const Lag& h : ball) direct += c1.at(h) * c2.at(h);
    CHECK(s_hat(c1, c2, 3.0) == direct);
    CHECK(s_hat(autocov(a, 5), autocov(b, 5), 3.0) == doctest::Approx(direct).epsilon(1e-12));
  }

  TEST_CASE("identical channels are strongly colocalised") {
    const auto a = simulate_bernoulli(Shape(128, 128), 0.5, 77);
    const auto r = colocalization_test(a, a);
    CHECK(r.stats.d_hat == doctest::Approx(0.25).epsilon(1e-3));
    CHECK(r.t > 20.0);
    CHECK(r.p_coloc < 1e-6);
    CHECK(r.t == doctest::Approx(std::sqrt(double(r.stats.n)) * r.stats.d_hat /
                                 std::sqrt(r.s_hat)));
  }

  TEST_CASE("exact anti-colocalisation has a tiny lower-tail p-value") {
    const auto a = simulate_bernoulli(Shape(128, 128), 0.5, 78);
    const auto r = colocalization_test(a, a.complement());
    CHECK(r.t < -20.0);
    CHECK(r.p_anticoloc < 1e-6);
    CHECK(r.p_coloc > 1.0 - 1e-6);
  }

  TEST_CASE("swapping channels leaves |t| and the bilateral p-value unchanged") {
    LevelSetParams p;
    p.shape = Shape(100, 100);
    p.alpha_x = 3.0;
    p.alpha_y = 6.0;
    p.alpha_eps = 4.0;
    p.rho0 = 0.3;
    p.tau2 = 0.5;
    const auto pair = simulate_level_sets(p);
    const auto ab = colocalization_test(pair.first, pair.second);
    const auto ba = colocalization_test(pair.second, pair.first);
    CHECK(ab.t == doctest::Approx(ba.t).epsilon(1e-13));
    CHECK(ab.p_bilateral == doctest::Approx(ba.p_bilateral).epsilon(1e-12));
    CHECK(ab.s_hat == doctest::Approx(ba.s_hat).epsilon(1e-13));
    CHECK(ab.delta == ba.delta);
  }

  TEST_CASE("fixed delta override") {
    const auto a = simulate_bernoulli(Shape(64, 64), 0.3, 1);
    const auto b = simulate_bernoulli(Shape(64, 64), 0.4, 2);
    TestOptions o;
    o.delta = 0.0;
    const auto r = colocalization_test(a, b, o);
    CHECK(r.delta == 0.0);
    CHECK(r.s_hat == doctest::Approx(r.c0_1 * r.c0_2).epsilon(1e-15));
    o.delta = 20.0;
    const auto wide = colocalization_test(a, b, o);
    CHECK(wide.max_lag_used >= 20);
    CHECK(wide.delta == 20.0);
  }

  TEST_CASE("error paths") {
    const Shape s(16, 16);
    const auto a = simulate_bernoulli(s, 0.5, 3);
    const BinaryField empty(s, std::vector<std::uint8_t>(s.size(), 0));
    try {
      colocalization_test(a, empty);
      FAIL("expected DegenerateChannel");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::DegenerateChannel);
    }
    // Checkerboard against period-4 stripes: at delta 1 the vertical lags
    // contribute -c0_1 * c0_2 twice and the horizontal ones nothing.
    std::vector<std::uint8_t> cb(s.size()), stripes(s.size());
    for (std::size_t y = 0; y < 16; ++y)
      for (std::size_t x = 0; x < 16; ++x) {
        cb[s.index(x, y)] = (x + y) % 2;
        stripes[s.index(x, y)] = (x / 2) % 2;
      }
    TestOptions o;
    o.delta = 1.0;
    try {
      colocalization_test(BinaryField(s, cb), BinaryField(s, stripes), o);
      FAIL("expected NonPositiveVariance");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::NonPositiveVariance);
      CHECK(std::string(e.what()).find("c0_1=") != std::string::npos);
    }
  }

  TEST_CASE("size warning when objects are large relative to the region") {
    const Shape s(40, 40);
    std::vector<std::uint8_t> a(s.size(), 0), b(s.size(), 0);
    for (std::size_t y = 0; y < 40; ++y)
      for (std::size_t x = 0; x < 40; ++x) {
        a[s.index(x, y)] = x < 15 && y < 15;
        b[s.index(x, y)] = x >= 20 && y >= 22;
      }
    const auto r = colocalization_test(BinaryField(s, a), BinaryField(s, b));
    CHECK(r.undersized);
    CHECK_FALSE(r.warnings.empty());
    const auto small = colocalization_test(simulate_bernoulli(s, 0.2, 1),
                                           simulate_bernoulli(s, 0.2, 2));
    CHECK_FALSE(small.undersized);
  }

  TEST_CASE("Bernoulli null keeps the rejection rate near 0.05") {
    const int reps = 1000;
    std::vector<int> reject(reps);
    parallel_for(reps, [&](std::size_t i) {
      const auto a = simulate_bernoulli(Shape(64, 64), 0.3, derive_seed(123, 2 * i));
      const auto b = simulate_bernoulli(Shape(64, 64), 0.3, derive_seed(123, 2 * i + 1));
      reject[i] = colocalization_test(a, b).p_bilateral < 0.05;
    });
    const double rate = double(std::accumulate(reject.begin(), reject.end(), 0)) / reps;
    CHECK(ref::binomial_band(0.05, reps).contains(rate));
  }
}
