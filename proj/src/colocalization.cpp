#include "gcops/colocalization.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "gcops/error.hpp"
#include "gcops/normal.hpp"

namespace gcops {

PValues p_values(double t) {
  PValues p;
  p.coloc = phi_upper(t);
  p.anticoloc = phi(t);
  p.bilateral = 2.0 * std::min(p.coloc, p.anticoloc);
  return p;
}

double s_hat(const CovarianceField& c1, const CovarianceField& c2, double delta) {
  if (c1.dims() != c2.dims() || c1.max_lag() != c2.max_lag())
    throw Error(ErrorCode::ShapeMismatch, "covariance fields cover different lag sets");
  double sum = 0.0;
  for (const Lag& h : c1.ball(delta)) sum += c1.at(h) * c2.at(h);
  return sum;
}

TestReport colocalization_test(const BinaryField& a, const BinaryField& b,
                               const TestOptions& options) {
  TestReport report;
  report.stats = empirical_d(a, b);

  const Shape& shape = a.shape();
  int max_lag = options.max_lag.value_or(default_max_lag(shape));
  if (options.delta) {
    if (*options.delta < 0) throw Error(ErrorCode::InvalidArgument, "delta must be >= 0");
    max_lag = std::max(max_lag, int(std::ceil(*options.delta - 1e-9)));
  }
  report.max_lag_used = max_lag;

  const auto counts = lag_counts(shape, a.region(), max_lag);
  const auto c1 = autocov(a, max_lag, counts);
  const auto c2 = autocov(b, max_lag, counts);
  report.c0_1 = c1.c0();
  report.c0_2 = c2.c0();

  if (options.delta) {
    report.delta = *options.delta;
  } else {
    const auto sel = choose_delta(c1, c2, options.delta_threshold, options.delta_rule);
    report.delta = sel.delta;
    if (sel.saturated)
      report.warnings.push_back("delta saturated at max_lag=" + std::to_string(max_lag) +
                                "; correlation range may be larger");
  }

  report.s_hat = s_hat(c1, c2, report.delta);
  if (!(report.s_hat > 0.0)) {
    std::ostringstream os;
    os << "s_hat=" << report.s_hat << " <= 0 (delta=" << report.delta << ", c0_1=" << report.c0_1
       << ", c0_2=" << report.c0_2 << ")";
    throw Error(ErrorCode::NonPositiveVariance, os.str());
  }

  report.t = std::sqrt(double(report.stats.n)) * report.stats.d_hat / std::sqrt(report.s_hat);
  const PValues p = p_values(report.t);
  report.p_bilateral = p.bilateral;
  report.p_coloc = p.coloc;
  report.p_anticoloc = p.anticoloc;

  if (options.size_warning) {
    const double object = std::max(average_object_volume(a), average_object_volume(b));
    const double needed = std::pow(5.0, shape.dims) * object;
    if (double(report.stats.n) < needed) {
      report.undersized = true;
      std::ostringstream os;
      os << "region of " << report.stats.n << " sites is less than 5x the average object size ("
         << object << " sites per object)";
      report.warnings.push_back(os.str());
    }
  }
  return report;
}

}  // namespace gcops
