#include <doctest.h>

#include <cmath>

#include "gcops/error.hpp"
#include "gcops/normal.hpp"

using namespace gcops;

TEST_SUITE("normal") {
  TEST_CASE("known values") {
    CHECK(phi(0.0) == 0.5);
    CHECK(std::abs(phi(1.959964) - 0.975) < 1e-6);
    CHECK(std::abs(phi(-1.0) - 0.15865525393145707) < 1e-15);
    CHECK(std::abs(phi_upper(8.0) - 6.22096057427178e-16) < 1e-28);
  }

  TEST_CASE("symmetry") {
    for (double x : {0.5, 1.0, 3.7}) CHECK(std::abs(phi(-x) + phi(x) - 1.0) < 1e-15);
    for (double x : {-4.0, -0.3, 0.0, 2.2, 9.0}) CHECK(phi_upper(x) == phi(-x));
  }

  TEST_CASE("inverse") {
    for (double q : {1e-12, 1e-6, 0.001, 0.025, 0.3, 0.5, 0.77, 0.975, 0.999999})
      CHECK(std::abs(phi(phi_inv(q)) - q) <= 1e-12 * std::max(q, 1e-3));
    CHECK(std::abs(phi_inv(0.975) - 1.959963984540054) < 1e-9);
    CHECK(phi_inv(0.5) == doctest::Approx(0.0).scale(1e-15));
    for (double bad : {0.0, 1.0, -0.2, 1.5, std::nan("")}) CHECK_THROWS_AS(phi_inv(bad), Error);
  }

  TEST_CASE("two-sided decision matches the quantile rule") {
    for (double level : {0.001, 0.01, 0.05, 0.2, 0.9}) {
      const double crit = phi_inv(1.0 - level / 2.0);
      for (double t = -5.0; t <= 5.0; t += 0.01237) {
        const double p = 2.0 * std::min(phi_upper(t), phi(t));
        CHECK((std::abs(t) > crit) == (p < level));
      }
    }
  }
}
