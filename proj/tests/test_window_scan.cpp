#include <doctest.h>

#include <cmath>
#include <numeric>

#include "gcops/error.hpp"
#include "gcops/simulators.hpp"
#include "gcops/window_scan.hpp"

using namespace gcops;

namespace {

TestReport fake_report(double t) {
  TestReport r;
  r.t = t;
  return r;
}

ScanResult scores_at(const Shape& shape, std::vector<std::pair<Point3, double>> windows) {
  ScanResult r;
  r.image_shape = shape;
  for (auto& [c, t] : windows) {
    WindowEntry e;
    e.centre = c;
    e.report = fake_report(t);
    r.entries.push_back(e);
  }
  return r;
}

}  // namespace

TEST_SUITE("window_scan") {
  TEST_CASE("grid origins count, containment and centring") {
    WindowSpec spec;
    const Shape img(256, 256);
    const auto o = window_origins(img, spec);
    // floor((256 - 50) / 25) + 1 = 9 per axis.
    CHECK(o.size() == 81);
    for (const Site& s : o) {
      CHECK(s[0] + 50 <= 256);
      CHECK(s[1] + 50 <= 256);
    }
    CHECK(o.front()[0] == 3);  // (206 - 200) / 2

    const auto v = window_origins(Shape(250, 250, 60), WindowSpec::defaults(3));
    CHECK(v.size() == 9 * 9 * 3);
    const auto slab = window_origins(Shape(120, 120, 10), WindowSpec::defaults(3));
    CHECK(slab.size() == 9);
    for (const Site& s : slab) CHECK(s[2] == 0);

    WindowSpec odd;
    odd.size = Shape(7, 5);
    odd.stride = 3;
    CHECK(window_origins(Shape(31, 17), odd).size() == std::size_t((24 / 3 + 1) * (12 / 3 + 1)));
  }

  TEST_CASE("window validation") {
    WindowSpec spec;
    spec.size = Shape(300, 50);
    try {
      window_origins(Shape(256, 256), spec);
      FAIL("expected WindowLargerThanImage");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::WindowLargerThanImage);
    }
    spec.size = Shape(50, 50);
    spec.stride = 0;
    CHECK_THROWS_AS(spec.validate(Shape(256, 256)), Error);
    spec.stride = 25;
    spec.placement = Placement::Random;
    CHECK_THROWS_AS(spec.validate(Shape(256, 256)), Error);
  }

  TEST_CASE("random placement is reproducible and respects the region") {
    WindowSpec spec;
    spec.placement = Placement::Random;
    spec.count = 500;
    spec.seed = 7;
    const Shape img(200, 150);
    std::vector<std::uint8_t> region(img.size(), 0);
    for (std::size_t y = 0; y < 150; ++y)
      for (std::size_t x = 0; x < 100; ++x) region[img.index(x, y)] = 1;
    const auto a = window_origins(img, spec, region), b = window_origins(img, spec, region);
    CHECK(a == b);
    for (const Site& s : a) {
      CHECK(s[0] + 50 <= 200);
      CHECK(s[1] + 50 <= 150);
      CHECK(region[img.index(s[0] + 25, s[1] + 25)]);
    }
    spec.seed = 8;
    CHECK(window_origins(img, spec, region) != a);
  }

  TEST_CASE("degenerate windows are skipped") {
    const Shape img(100, 100);
    std::vector<std::uint8_t> m(img.size(), 0);
    // Foreground only in the left half.
    auto bern = simulate_bernoulli(img, 0.3, 4);
    for (std::size_t y = 0; y < 100; ++y)
      for (std::size_t x = 0; x < 50; ++x) m[img.index(x, y)] = bern.foreground(img.index(x, y));
    const BinaryField a(img, m);
    const auto r = scan(a, a, WindowSpec{});
    REQUIRE(r.entries.size() == 9);
    std::size_t skipped = 0;
    for (const auto& e : r.entries)
      if (!e.report) {
        CHECK(e.skip_reason == "DegenerateChannel");
        ++skipped;
      }
    CHECK(skipped == 3);
  }

  TEST_CASE("identical channels: every scored window is a hit") {
    const auto a = simulate_bernoulli(Shape(256, 256), 0.3, 10);
    const auto r = scan(a, a, WindowSpec{});
    CHECK(r.entries.size() == 81);
    CHECK(r.hits.size() == 81);
  }

  TEST_CASE("independent Bernoulli grid scans produce about level * windows hits") {
    const Shape img(256, 256);
    WindowSpec spec;
    spec.stride = 34;  // 7 x 7 = 49 windows
    REQUIRE(window_origins(img, spec).size() == 49);
    const int runs = 200;
    std::vector<std::size_t> hits(runs);
    for (int i = 0; i < runs; ++i) {
      const auto a = simulate_bernoulli(img, 0.2, derive_seed(3, 2 * std::uint64_t(i)));
      const auto b = simulate_bernoulli(img, 0.2, derive_seed(3, 2 * std::uint64_t(i) + 1));
      hits[std::size_t(i)] = scan(a, b, spec).hits.size();
    }
    CHECK(hits[0] <= 8);
    const double mean = double(std::accumulate(hits.begin(), hits.end(), std::size_t(0))) / runs;
    CHECK(std::abs(mean - 2.45) <= 0.3 * 2.45);
  }

  TEST_CASE("smoothing: constant inputs, locality and bounds") {
    const Shape img(120, 40);
    const auto one = smooth_scores(scores_at(img, {{{30, 20, 0}, 1.7}}), 5.0);
    for (double v : one.values) CHECK(v == doctest::Approx(1.7));
    const auto two = smooth_scores(scores_at(img, {{{30, 20, 0}, 2.0}, {{90, 5, 0}, 2.0}}));
    for (double v : two.values) CHECK(v == doctest::Approx(2.0));

    const auto far = smooth_scores(scores_at(img, {{{10, 20, 0}, 0.0}, {{110, 20, 0}, 10.0}}), 5.0);
    CHECK(std::abs(far.values[img.index(10, 20)]) < 1e-6);
    CHECK(std::abs(far.values[img.index(110, 20)] - 10.0) < 1e-6);
    for (double v : far.values) {
      CHECK(v >= 0.0);
      CHECK(v <= 10.0);
    }

    ScanResult none;
    none.image_shape = img;
    none.entries.resize(3);
    CHECK_THROWS_AS(smooth_scores(none), Error);
  }

  TEST_CASE("smoothing a real scan stays within the window score range") {
    LevelSetParams p;
    p.shape = Shape(150, 150);
    p.rho0 = 0.4;
    const auto s = simulate_level_sets(p);
    const auto r = scan(s.first, s.second, WindowSpec{});
    double lo = 1e300, hi = -1e300;
    for (const auto& e : r.entries)
      if (e.report) {
        lo = std::min(lo, e.report->t);
        hi = std::max(hi, e.report->t);
      }
    const auto sm = smooth_scores(r);
    CHECK(sm.shape == p.shape);
    for (double v : sm.values) {
      CHECK(v >= lo - 1e-9);
      CHECK(v <= hi + 1e-9);
    }
  }

  TEST_CASE("shift scan: identity, length mismatch and a constructed delay") {
    const Shape img(64, 64);
    LevelSetParams p;
    p.shape = img;
    p.alpha_x = p.alpha_y = 3.0;
    const LevelSetGenerator gen(p);
    std::vector<BinaryField> seq;
    for (std::uint64_t t = 0; t < 30; ++t) seq.push_back(gen(derive_seed(50, t)).first);

    const auto self = shift_scan(seq, seq, 5);
    REQUIRE(self.shifts.size() == 11);
    CHECK(self.shifts[5] == 0);
    REQUIRE(self.scores[5].size() == 30);
    for (std::size_t t = 0; t < 30; ++t)
      CHECK(self.scores[5][t] == colocalization_test(seq[t], seq[t]).t);

    // b shows a's frames 3 steps later: b[t] = a[t - 3].
    std::vector<BinaryField> delayed;
    for (int t = 0; t < 30; ++t) delayed.push_back(seq[std::size_t(std::max(0, t - 3))]);
    const auto curve = shift_scan(seq, delayed, 5);
    const auto peak = std::max_element(curve.means.begin(), curve.means.end());
    CHECK(curve.shifts[std::size_t(peak - curve.means.begin())] == -3);

    std::vector<BinaryField> shorter(seq.begin(), seq.end() - 1);
    try {
      shift_scan(seq, shorter, 5);
      FAIL("expected LengthMismatch");
    } catch (const Error& e) {
      CHECK(e.code() == ErrorCode::LengthMismatch);
    }
  }

  TEST_CASE("shift scan of independent sequences is flat around zero") {
    const Shape img(64, 64);
    LevelSetParams p;
    p.shape = img;
    p.alpha_x = p.alpha_y = 3.0;
    const LevelSetGenerator gen(p);
    std::vector<BinaryField> a, b;
    for (std::uint64_t t = 0; t < 100; ++t) {
      const auto s = gen(derive_seed(60, t));
      a.push_back(s.first);
      b.push_back(s.second);
    }
    const auto curve = shift_scan(a, b, 20);
    CHECK(curve.shifts.size() == 41);
    for (std::size_t i = 0; i < curve.means.size(); ++i) {
      const double se = 1.0 / std::sqrt(double(curve.scores[i].size()));
      CHECK(std::abs(curve.means[i]) < 4.0 * se);
    }
  }
}
