#include "gcops/simulators.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <numbers>
#include <numeric>

#include "fft.hpp"
#include "gcops/error.hpp"
#include "gcops/normal.hpp"

namespace gcops {

namespace {

// Gauss-Kronrod 7/15 on [a, b]; returns {kronrod estimate, |kronrod - gauss|}.
std::pair<double, double> gk15(const std::function<double(double)>& f, double a, double b) {
  static constexpr double xgk[8] = {0.991455371120812639206854697526329,
                                    0.949107912342758524526189684047851,
                                    0.864864423359769072789712788640926,
                                    0.741531185599394439863864773280788,
                                    0.586087235467691130294144845693013,
                                    0.405845151377397166906606412076961,
                                    0.207784955007898467600689403773245,
                                    0.0};
  static constexpr double wgk[8] = {0.022935322010529224963732008058970,
                                    0.063092092629978553290700663189204,
                                    0.104790010322250183839876322541518,
                                    0.140653259715525918745189590510238,
                                    0.169004726639267902826583426598550,
                                    0.190350578064785409913256402421014,
                                    0.204432940075298892414161999234649,
                                    0.209482141084727828012999174891714};
  static constexpr double wg[4] = {0.129484966168869693270611432679082,
                                   0.279705391489276667901467771423780,
                                   0.381830050505118944950369775488975,
                                   0.417959183673469387755102040816327};
  const double c = 0.5 * (a + b), h = 0.5 * (b - a);
  const double fc = f(c);
  double kronrod = fc * wgk[7];
  double gauss = fc * wg[3];
  for (int j = 0; j < 7; ++j) {
    const double x = h * xgk[j];
    const double s = f(c - x) + f(c + x);
    kronrod += wgk[j] * s;
    if (j % 2 == 1) gauss += wg[j / 2] * s;
  }
  return {kronrod * h, std::abs((kronrod - gauss) * h)};
}

double integrate(const std::function<double(double)>& f, double a, double b, double tol,
                 int depth = 0) {
  const auto [value, err] = gk15(f, a, b);
  if (err <= tol || depth >= 40) return value;
  const double m = 0.5 * (a + b);
  return integrate(f, a, m, 0.5 * tol, depth + 1) + integrate(f, m, b, 0.5 * tol, depth + 1);
}

}  // namespace

// ---------------------------------------------------------------------------
// Gaussian random fields

struct GaussianFieldSampler::Impl {
  Shape embedding;
  std::vector<double> scale;  // sqrt(eigenvalue / N)
  std::unique_ptr<detail::ComplexFft> fft;
};

GaussianFieldSampler::GaussianFieldSampler(const Shape& shape, double sigma, double alpha)
    : shape_(shape), impl_(std::make_unique<Impl>()) {
  if (!(alpha > 0)) throw Error(ErrorCode::InvalidArgument, "alpha must be positive");
  if (!(sigma >= 0)) throw Error(ErrorCode::InvalidArgument, "sigma must be non-negative");

  double pad = std::ceil(6.0 * alpha);
  for (int attempt = 0; attempt < 4; ++attempt, pad *= 2) {
    Shape grid = shape;
    for (int a = 0; a < shape.dims; ++a)
      grid.extent[a] = detail::next_fast_size(shape.extent[a] + std::size_t(pad));
    const std::size_t n = grid.size();

    auto buf = detail::alloc_complex(n);
    const double inv_a2 = 1.0 / (alpha * alpha);
    for (std::size_t z = 0; z < grid.nz(); ++z) {
      const double dz = double(std::min(z, grid.nz() - z));
      for (std::size_t y = 0; y < grid.ny(); ++y) {
        const double dy = double(std::min(y, grid.ny() - y));
        for (std::size_t x = 0; x < grid.nx(); ++x) {
          const double dx = double(std::min(x, grid.nx() - x));
          buf[grid.index(x, y, z)] = sigma * sigma * std::exp(-(dx * dx + dy * dy + dz * dz) * inv_a2);
        }
      }
    }
    auto fft = std::make_unique<detail::ComplexFft>(grid);
    fft->forward(buf.get());

    double negative = 0.0, total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double lambda = buf[i].real();
      total += std::abs(lambda);
      if (lambda < 0) negative -= lambda;
    }
    if (total > 0 && negative / total > 1e-8) continue;

    impl_->embedding = grid;
    impl_->scale.resize(n);
    for (std::size_t i = 0; i < n; ++i)
      impl_->scale[i] = std::sqrt(std::max(buf[i].real(), 0.0) / double(n));
    impl_->fft = std::move(fft);
    return;
  }
  throw Error(ErrorCode::EmbeddingFailure,
              "circulant embedding has negative spectrum for alpha=" + std::to_string(alpha));
}

GaussianFieldSampler::~GaussianFieldSampler() = default;
GaussianFieldSampler::GaussianFieldSampler(GaussianFieldSampler&&) noexcept = default;
GaussianFieldSampler& GaussianFieldSampler::operator=(GaussianFieldSampler&&) noexcept = default;

const Shape& GaussianFieldSampler::embedding() const noexcept { return impl_->embedding; }

std::pair<ScalarField, ScalarField> GaussianFieldSampler::sample_pair(Rng& rng) const {
  const Shape& grid = impl_->embedding;
  const std::size_t n = grid.size();
  auto buf = detail::alloc_complex(n);
  auto* raw = reinterpret_cast<double*>(buf.get());
  fill_standard_normal(rng, raw, 2 * n);
  for (std::size_t i = 0; i < n; ++i) buf[i] *= impl_->scale[i];
  impl_->fft->forward(buf.get());

  ScalarField re{shape_, std::vector<double>(shape_.size())};
  ScalarField im{shape_, std::vector<double>(shape_.size())};
  for (std::size_t z = 0; z < shape_.nz(); ++z)
    for (std::size_t y = 0; y < shape_.ny(); ++y) {
      const std::size_t src = grid.index(0, y, z);
      const std::size_t dst = shape_.index(0, y, z);
      for (std::size_t x = 0; x < shape_.nx(); ++x) {
        re.values[dst + x] = buf[src + x].real();
        im.values[dst + x] = buf[src + x].imag();
      }
    }
  return {std::move(re), std::move(im)};
}

ScalarField sample_grf(const Shape& shape, double sigma, double alpha, std::uint64_t seed) {
  Rng rng(seed);
  return GaussianFieldSampler(shape, sigma, alpha).sample(rng);
}

// ---------------------------------------------------------------------------
// Level sets

void LevelSetParams::validate() const {
  if (!(rho0 >= 0.0 && rho0 < 1.0))
    throw Error(ErrorCode::InvalidArgument, "rho0 must lie in [0, 1)");
  if (!(alpha_x > 0 && alpha_y > 0 && alpha_eps > 0))
    throw Error(ErrorCode::InvalidArgument, "scale parameters must be positive");
  if (!(sigma0 > 0)) throw Error(ErrorCode::InvalidArgument, "sigma0 must be positive");
  if (shape.dims != 2 && shape.dims != 3)
    throw Error(ErrorCode::InvalidArgument, "level sets need a 2D or 3D shape");
}

LevelSetGenerator::LevelSetGenerator(LevelSetParams params) : params_(params) {
  params_.validate();
  analytic_.p1 = phi_upper(params_.tau1);
  analytic_.p2 = phi_upper(params_.tau2);
  analytic_.rho = binary_correlation(params_.rho0, params_.tau1, params_.tau2);
  // Unit-variance samplers; components are scaled on use.
  std::vector<double> alphas = {params_.alpha_x, params_.alpha_y};
  if (params_.rho0 > 0.0) alphas.push_back(params_.alpha_eps);
  for (double a : alphas)
    if (!samplers_.contains(a)) samplers_.emplace(a, GaussianFieldSampler(params_.shape, 1.0, a));
}

LevelSetSample LevelSetGenerator::operator()(std::uint64_t seed) const {
  const auto& p = params_;
  const bool shared = p.rho0 > 0.0;
  const double sd0 = p.sigma0;
  const double sd_eps = std::sqrt(p.rho0 / (1.0 - p.rho0)) * p.sigma0;
  const double sd_total = p.sigma0 / std::sqrt(1.0 - p.rho0);

  // Components in a fixed order (X, Y, eps); each transform feeds two
  // components of equal scale.
  std::vector<double> alphas = {p.alpha_x, p.alpha_y};
  if (shared) alphas.push_back(p.alpha_eps);

  Rng rng(seed);
  std::vector<ScalarField> parts(alphas.size());
  std::vector<bool> done(alphas.size(), false);
  for (std::size_t i = 0; i < alphas.size(); ++i) {
    if (done[i]) continue;
    auto [f1, f2] = samplers_.at(alphas[i]).sample_pair(rng);
    parts[i] = std::move(f1);
    done[i] = true;
    for (std::size_t j = i + 1; j < alphas.size(); ++j)
      if (!done[j] && alphas[j] == alphas[i]) {
        parts[j] = std::move(f2);
        done[j] = true;
        break;
      }
  }

  const std::size_t n = p.shape.size();
  std::vector<std::uint8_t> m1(n), m2(n);
  const double t1 = p.tau1 * sd_total, t2 = p.tau2 * sd_total;
  for (std::size_t i = 0; i < n; ++i) {
    const double e = shared ? sd_eps * parts[2].values[i] : 0.0;
    m1[i] = sd0 * parts[0].values[i] + e > t1;
    m2[i] = sd0 * parts[1].values[i] + e > t2;
  }
  return LevelSetSample{BinaryField(p.shape, std::move(m1)), BinaryField(p.shape, std::move(m2)),
                        analytic_};
}

LevelSetSample simulate_level_sets(const LevelSetParams& params) {
  return LevelSetGenerator(params)();
}

double binary_correlation(double rho0, double tau1, double tau2) {
  if (!(rho0 >= -1.0 && rho0 <= 1.0))
    throw Error(ErrorCode::DomainError, "rho0 must lie in [-1, 1]");
  if (rho0 == 0.0) return 0.0;
  const double p1 = phi_upper(tau1), p2 = phi_upper(tau2);
  const double norm = std::sqrt(p1 * (1 - p1) * p2 * (1 - p2));
  if (!(norm > 0)) throw Error(ErrorCode::DomainError, "thresholds give a degenerate coverage");

  // P(U > h, V > k) - p1 p2 = (1 / 2pi) int_0^rho0 exp(-q(r)) / sqrt(1 - r^2) dr with
  // q(r) = (h^2 - 2 r h k + k^2) / (2 (1 - r^2)). Substituting r = sin(theta)
  // removes the endpoint singularity at |rho0| = 1, and q is split so that
  // neither term is 0/0 or inf - inf near r = +-1.
  const double h = tau1, k = tau2;
  auto integrand = [h, k](double theta) {
    const double s = std::sin(theta);
    const double d = s >= 0 ? h - k : h + k;
    const double cross = s >= 0 ? h * k / (1.0 + s) : -h * k / (1.0 - s);
    const double one_minus_s2 = (1.0 - s) * (1.0 + s);
    double q = cross;
    if (d != 0.0) {
      if (one_minus_s2 <= 0.0) return 0.0;
      q += d * d / (2.0 * one_minus_s2);
    }
    return std::exp(-q);
  };
  const double upper = std::asin(rho0);
  const double sign = upper < 0 ? -1.0 : 1.0;
  const double lo = std::min(0.0, upper), hi = std::max(0.0, upper);
  const double integral = sign * integrate(integrand, lo, hi, 1e-13);
  return integral / (2.0 * std::numbers::pi * norm);
}

double rho0_for_correlation(double target, double tau1, double tau2) {
  if (target <= 0.0) return 0.0;
  const double top = binary_correlation(1.0 - 1e-12, tau1, tau2);
  if (target >= top)
    throw Error(ErrorCode::DomainError,
                "binary correlation " + std::to_string(target) + " is unreachable (max " +
                    std::to_string(top) + ")");
  double lo = 0.0, hi = 1.0 - 1e-12;
  for (int i = 0; i < 100 && hi - lo > 1e-14; ++i) {
    const double mid = 0.5 * (lo + hi);
    (binary_correlation(mid, tau1, tau2) < target ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

// ---------------------------------------------------------------------------
// Spots

void SpotParams::validate() const {
  if (n_red < 0 || n_green < 0) throw Error(ErrorCode::InvalidArgument, "spot counts must be >= 0");
  if (!(forced_fraction >= 0.0 && forced_fraction <= 1.0))
    throw Error(ErrorCode::InvalidArgument, "forced fraction must lie in [0, 1]");
  if (!(spot_radius > 0)) throw Error(ErrorCode::InvalidArgument, "spot radius must be positive");
  if (!(neighbor_distance >= 0) || !(noise_sd >= 0))
    throw Error(ErrorCode::InvalidArgument, "distances and noise must be non-negative");
}

namespace {

using Point = std::array<double, 3>;

Point uniform_point(Rng& rng, const Shape& shape) {
  Point p{0, 0, 0};
  for (int a = 0; a < shape.dims; ++a) p[a] = uniform01(rng) * double(shape.extent[a]);
  return p;
}

// Uniform in the d-ball of the given radius, by rejection.
Point uniform_in_ball(Rng& rng, int dims, double radius) {
  for (;;) {
    Point p{0, 0, 0};
    double r2 = 0;
    for (int a = 0; a < dims; ++a) {
      p[a] = 2.0 * uniform01(rng) - 1.0;
      r2 += p[a] * p[a];
    }
    if (r2 <= 1.0) {
      for (double& v : p) v *= radius;
      return p;
    }
  }
}

std::vector<double> render(const Shape& shape, const std::vector<Point>& centres, double sd) {
  std::vector<double> img(shape.size(), 0.0);
  const double reach = 4.0 * sd;
  const double inv = 1.0 / (2.0 * sd * sd);
  for (const Point& c : centres) {
    std::array<long, 3> lo{0, 0, 0}, hi{0, 0, 0};
    for (int a = 0; a < 3; ++a) {
      if (a >= shape.dims) continue;
      lo[a] = std::max(0L, long(std::floor(c[a] - reach)));
      hi[a] = std::min(long(shape.extent[a]) - 1, long(std::ceil(c[a] + reach)));
    }
    for (long z = lo[2]; z <= hi[2]; ++z)
      for (long y = lo[1]; y <= hi[1]; ++y)
        for (long x = lo[0]; x <= hi[0]; ++x) {
          const double dx = double(x) - c[0], dy = double(y) - c[1];
          const double dz = shape.dims == 3 ? double(z) - c[2] : 0.0;
          img[shape.index(x, y, z)] += std::exp(-(dx * dx + dy * dy + dz * dz) * inv);
        }
  }
  return img;
}

std::vector<double> translate(const Shape& shape, const std::vector<double>& img,
                              const std::array<int, 3>& shift) {
  if (shift == std::array<int, 3>{0, 0, 0}) return img;
  std::vector<double> out(img.size(), 0.0);
  for (std::size_t z = 0; z < shape.nz(); ++z)
    for (std::size_t y = 0; y < shape.ny(); ++y)
      for (std::size_t x = 0; x < shape.nx(); ++x) {
        const long sx = long(x) - shift[0], sy = long(y) - shift[1], sz = long(z) - shift[2];
        if (sx < 0 || sy < 0 || sz < 0 || sx >= long(shape.nx()) || sy >= long(shape.ny()) ||
            sz >= long(shape.nz()))
          continue;
        out[shape.index(x, y, z)] = img[shape.index(sx, sy, sz)];
      }
  return out;
}

BinaryField half_peak_mask(const Shape& shape, const std::vector<double>& img) {
  std::vector<std::uint8_t> m(img.size());
  for (std::size_t i = 0; i < img.size(); ++i) m[i] = img[i] > 0.5;
  return BinaryField(shape, std::move(m));
}

}  // namespace

SpotSample simulate_spots(const SpotParams& params) {
  params.validate();
  const Shape& shape = params.shape;
  Rng rng(params.seed);

  std::vector<Point> red(std::size_t(params.n_red));
  for (auto& c : red) c = uniform_point(rng, shape);

  int forced = int(std::lround(params.forced_fraction * params.n_green));
  forced = std::min(forced, params.n_red);
  // Distinct red anchors: partial Fisher-Yates over red indices.
  std::vector<std::size_t> order(red.size());
  std::iota(order.begin(), order.end(), 0);
  std::vector<Point> green;
  green.reserve(std::size_t(params.n_green));
  for (int i = 0; i < forced; ++i) {
    const std::size_t j = std::size_t(i) + uniform_index(rng, order.size() - std::size_t(i));
    std::swap(order[std::size_t(i)], order[j]);
    const Point& anchor = red[order[std::size_t(i)]];
    const Point off = uniform_in_ball(rng, shape.dims, params.neighbor_distance);
    green.push_back({anchor[0] + off[0], anchor[1] + off[1], anchor[2] + off[2]});
  }
  for (int i = forced; i < params.n_green; ++i) green.push_back(uniform_point(rng, shape));

  std::vector<double> red_img = render(shape, red, params.spot_radius);
  std::vector<double> green_img = translate(shape, render(shape, green, params.spot_radius),
                                            params.shift);

  SpotSample out{ScalarField{shape, {}}, ScalarField{shape, {}}, half_peak_mask(shape, red_img),
                 half_peak_mask(shape, green_img)};
  if (params.noise_sd > 0) {
    std::vector<double> noise(shape.size());
    for (auto* img : {&red_img, &green_img}) {
      fill_standard_normal(rng, noise.data(), noise.size());
      for (std::size_t i = 0; i < noise.size(); ++i) (*img)[i] += params.noise_sd * noise[i];
    }
  }
  out.red.values = std::move(red_img);
  out.green.values = std::move(green_img);
  return out;
}

BinaryField simulate_bernoulli(const Shape& shape, double p, std::uint64_t seed) {
  if (!(p >= 0.0 && p <= 1.0)) throw Error(ErrorCode::InvalidArgument, "p must lie in [0, 1]");
  Rng rng(seed);
  std::vector<std::uint8_t> m(shape.size());
  for (auto& v : m) v = uniform01(rng) < p;
  return BinaryField(shape, std::move(m));
}

}  // namespace gcops
