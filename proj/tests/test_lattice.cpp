#include <doctest.h>

#include <random>

#include "gcops/error.hpp"
#include "gcops/lattice.hpp"
#include "gcops/simulators.hpp"
#include "support/reference.hpp"

using namespace gcops;

namespace {

ErrorCode code_of(auto&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("expected gcops::Error");
  return ErrorCode::Io;
}

BinaryField field_from(const Shape& s, std::initializer_list<int> bits) {
  return BinaryField(s, std::vector<std::uint8_t>(bits.begin(), bits.end()));
}

}  // namespace

TEST_SUITE("lattice") {
  TEST_CASE("shape parsing and printing") {
    CHECK(Shape::parse("256x128") == Shape(256, 128));
    CHECK(Shape::parse("250x250x60") == Shape(250, 250, 60));
    CHECK(Shape(250, 250, 60).str() == "250x250x60");
    CHECK(code_of([] { Shape::parse("12"); }) == ErrorCode::InvalidArgument);
    CHECK(code_of([] { Shape::parse("0x5"); }) == ErrorCode::InvalidArgument);
    CHECK(code_of([] { Shape::parse("4xax3"); }) == ErrorCode::InvalidArgument);
  }

  TEST_CASE("coverage of trivial masks") {
    const Shape s(4, 4);
    CHECK(coverage(BinaryField(s, std::vector<std::uint8_t>(16, 1))) == 1.0);
    CHECK(coverage(BinaryField(s, std::vector<std::uint8_t>(16, 0))) == 0.0);
    std::vector<std::uint8_t> half(16, 0);
    for (int i = 0; i < 8; ++i) half[std::size_t(2 * i)] = 1;
    CHECK(coverage(BinaryField(s, half)) == 0.5);
  }

  TEST_CASE("mask is clipped to the region and empty regions are rejected") {
    const Shape s(2, 2);
    BinaryField f(s, {1, 1, 1, 0}, {1, 0, 1, 1});
    CHECK(f.region_size() == 3);
    CHECK(f.foreground_count() == 2);
    CHECK_FALSE(f.foreground(1));
    CHECK(code_of([&] { BinaryField(s, {1, 0, 0, 0}, {0, 0, 0, 0}); }) == ErrorCode::EmptyRegion);
    CHECK(code_of([&] { BinaryField(s, {1, 0, 0}); }) == ErrorCode::ShapeMismatch);
  }

  TEST_CASE("empirical_d on identical and disjoint channels") {
    const Shape s(4, 2);
    auto a = field_from(s, {1, 1, 1, 1, 0, 0, 0, 0});
    auto b = field_from(s, {0, 0, 0, 0, 1, 1, 1, 1});
    const auto same = empirical_d(a, a);
    CHECK(same.d_hat == doctest::Approx(0.25).epsilon(1e-15));
    CHECK(same.p12_hat == 0.5);
    CHECK(same.n == 8);
    const auto dis = empirical_d(a, b);
    CHECK(dis.d_hat == doctest::Approx(-0.25).epsilon(1e-15));
    CHECK(dis.p12_hat == 0.0);
  }

  TEST_CASE("empirical_d errors") {
    const Shape s(2, 2);
    auto a = field_from(s, {1, 0, 1, 0});
    auto full = field_from(s, {1, 1, 1, 1});
    auto empty = field_from(s, {0, 0, 0, 0});
    BinaryField other_region(s, {1, 0, 1, 0}, {1, 1, 1, 0});
    CHECK(code_of([&] { empirical_d(a, full); }) == ErrorCode::DegenerateChannel);
    CHECK(code_of([&] { empirical_d(empty, a); }) == ErrorCode::DegenerateChannel);
    CHECK(code_of([&] { empirical_d(a, other_region); }) == ErrorCode::RegionMismatch);
    CHECK(code_of([&] { empirical_d(a, field_from(Shape(4, 1), {1, 0, 1, 0})); }) ==
          ErrorCode::RegionMismatch);
  }

  TEST_CASE("coverage statistics satisfy the Frechet bounds and symmetry") {
    std::mt19937_64 rng(11);
    for (int rep = 0; rep < 50; ++rep) {
      const Shape s(17 + rep % 5, 23);
      const auto a = ref::random_mask(s, 0.1 + 0.015 * rep, rng);
      const auto b = ref::random_mask(s, 0.8 - 0.01 * rep, rng);
      const auto ab = empirical_d(a, b), ba = empirical_d(b, a);
      CHECK(ab.p12_hat >= std::max(0.0, ab.p1_hat + ab.p2_hat - 1.0));
      CHECK(ab.p12_hat <= std::min(ab.p1_hat, ab.p2_hat));
      CHECK(ab.d_hat == ab.p12_hat - ab.p1_hat * ab.p2_hat);
      CHECK(ab.d_hat == ba.d_hat);
      CHECK(ab.p12_hat == ba.p12_hat);
      CHECK(empirical_d(a, a.complement()).p12_hat == 0.0);
    }
  }

  TEST_CASE("coverage is invariant under joint translation of mask and region") {
    std::mt19937_64 rng(3);
    const Shape s(20, 20);
    std::vector<std::uint8_t> mask(s.size()), region(s.size(), 0);
    std::bernoulli_distribution coin(0.4);
    for (std::size_t y = 2; y < 12; ++y)
      for (std::size_t x = 3; x < 10; ++x) {
        region[s.index(x, y)] = 1;
        mask[s.index(x, y)] = coin(rng);
      }
    std::vector<std::uint8_t> m2(s.size(), 0), r2(s.size(), 0);
    for (std::size_t y = 0; y + 5 < 20; ++y)
      for (std::size_t x = 0; x + 7 < 20; ++x) {
        m2[s.index(x + 7, y + 5)] = mask[s.index(x, y)];
        r2[s.index(x + 7, y + 5)] = region[s.index(x, y)];
      }
    CHECK(coverage(BinaryField(s, mask, region)) == coverage(BinaryField(s, m2, r2)));
  }

  TEST_CASE("independent Bernoulli pairs have d_hat centred on zero") {
    const int reps = 1000;
    const Shape s(128, 128);
    double sum = 0, sum2 = 0;
    for (int i = 0; i < reps; ++i) {
      const auto a = simulate_bernoulli(s, 0.2, derive_seed(5, 2 * std::uint64_t(i)));
      const auto b = simulate_bernoulli(s, 0.2, derive_seed(5, 2 * std::uint64_t(i) + 1));
      const double d = empirical_d(a, b).d_hat;
      sum += d;
      sum2 += d * d;
    }
    const double mean = sum / reps;
    const double se = std::sqrt((sum2 / reps - mean * mean) / reps);
    CHECK(std::abs(mean) <= 3 * se);
  }

  TEST_CASE("crop keeps the region and rejects windows that do not fit") {
    const Shape s(5, 4);
    std::vector<std::uint8_t> mask(s.size(), 0), region(s.size(), 1);
    mask[s.index(2, 1)] = 1;
    region[s.index(3, 2)] = 0;
    BinaryField f(s, mask, region);
    const auto c = f.crop({1, 1, 0}, Shape(3, 2));
    CHECK(c.shape() == Shape(3, 2));
    CHECK(c.foreground(c.shape().index(1, 0)));
    CHECK_FALSE(c.in_region(c.shape().index(2, 1)));
    CHECK(c.region_size() == 5);
    CHECK(code_of([&] { f.crop({3, 0, 0}, Shape(3, 2)); }) == ErrorCode::WindowLargerThanImage);
  }

  TEST_CASE("connected components use face neighbours only") {
    const Shape s(4, 3);
    // Two isolated diagonal pixels and an L-shaped group of four.
    auto f = field_from(s, {1, 0, 0, 1,
                            0, 1, 0, 1,
                            0, 0, 1, 1});
    CHECK(count_components(f) == 3);
    CHECK(average_object_volume(f) == doctest::Approx(2.0));
    const Shape v(2, 2, 2);
    auto g = field_from(v, {1, 0, 0, 0, 1, 0, 0, 1});
    CHECK(count_components(g) == 2);
    CHECK(average_object_volume(field_from(Shape(2, 1), {0, 0})) == 0.0);
  }

  TEST_CASE("component counts agree with a flood fill on random masks") {
    std::mt19937_64 rng(17);
    for (int rep = 0; rep < 40; ++rep) {
      const Shape s = rep % 2 ? Shape(23, 19, 1 + rep % 7) : Shape(41, 37);
      const auto f = ref::random_mask(s, 0.2 + 0.015 * rep, rng);
      CHECK(count_components(f) == ref::count_components(f));
    }
  }
}
