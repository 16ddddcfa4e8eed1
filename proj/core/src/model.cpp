#include "fairrelay/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include <boost/math/special_functions/gamma.hpp>
#include <boost/math/tools/minima.hpp>
#include <boost/math/tools/roots.hpp>

#include "fairrelay/quadrature.hpp"

namespace fairrelay {

std::vector<std::string> SystemParams::validate() const {
  auto require = [](bool ok, const char* what) {
    if (!ok) throw std::invalid_argument(what);
  };
  require(std::isfinite(gamma_sr) && gamma_sr > 0.0, "gamma_sr must be positive");
  require(std::isfinite(gamma_rd) && gamma_rd > 0.0, "gamma_rd must be positive");
  require(std::isfinite(theta_r) && theta_r > 0.0, "theta_r must be positive");
  require(std::isfinite(theta_d) && theta_d > 0.0, "theta_d must be positive");
  require(std::isfinite(relay_power) && relay_power > 0.0, "relay_power must be positive");
  require(std::isfinite(alpha) && alpha > 0.0, "alpha must be positive");
  require(std::isfinite(nbar) && nbar >= 0.0, "nbar must be nonnegative");

  std::vector<std::string> warnings;
  if (alpha < 2.0 || alpha > 7.0) {
    std::ostringstream os;
    os << "path-loss exponent " << alpha << " lies outside [2, 7]";
    warnings.push_back(os.str());
  }
  return warnings;
}

double FadingModel::neg_log_survival(double x) const {
  const double s = survival(x);
  return s > 0.0 ? -std::log(s) : std::numeric_limits<double>::infinity();
}

double FadingModel::quantile(double p) const {
  if (!(p > 0.0 && p < 1.0)) throw std::domain_error("quantile needs p in (0, 1)");
  double hi = 1.0;
  while (cdf(hi) < p && hi < 1e300) hi *= 2.0;
  double lo = 0.0;
  for (int it = 0; it < 200 && hi - lo > 1e-15 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    (cdf(mid) < p ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

double FadingModel::moment(double s) const {
  if (!(s > 0.0)) throw std::domain_error("moment order must be positive");
  // E[X^s] = int_0^inf P(X^s > u) du, with u = v / (1 - v).
  auto integrand = [&](double v) {
    const double u = v / (1.0 - v);
    return survival(std::pow(u, 1.0 / s)) / ((1.0 - v) * (1.0 - v));
  };
  return integrate_adaptive(integrand, 0.0, 1.0, QuadOptions{1e-10, 1e-14, 400}).value;
}

RayleighFading::RayleighFading() { validate_fading(*this); }

double RayleighFading::cdf(double x) const { return x <= 0.0 ? 0.0 : -std::expm1(-x); }
double RayleighFading::pdf(double x) const { return x < 0.0 ? 0.0 : std::exp(-x); }
double RayleighFading::survival(double x) const { return x <= 0.0 ? 1.0 : std::exp(-x); }
double RayleighFading::neg_log_survival(double x) const { return x <= 0.0 ? 0.0 : x; }

double RayleighFading::quantile(double p) const {
  if (!(p > 0.0 && p < 1.0)) throw std::domain_error("quantile needs p in (0, 1)");
  return -std::log1p(-p);
}

double RayleighFading::moment(double s) const { return std::tgamma(1.0 + s); }

NakagamiFading::NakagamiFading(double m) : m_(m) {
  if (!(m >= 0.5)) throw std::invalid_argument("Nakagami shape must be at least 0.5");
  validate_fading(*this);
}

double NakagamiFading::cdf(double x) const {
  return x <= 0.0 ? 0.0 : boost::math::gamma_p(m_, m_ * x);
}

double NakagamiFading::pdf(double x) const {
  if (x <= 0.0) return 0.0;
  return m_ * boost::math::gamma_p_derivative(m_, m_ * x);
}

double NakagamiFading::survival(double x) const {
  return x <= 0.0 ? 1.0 : boost::math::gamma_q(m_, m_ * x);
}

double NakagamiFading::quantile(double p) const {
  if (!(p > 0.0 && p < 1.0)) throw std::domain_error("quantile needs p in (0, 1)");
  return boost::math::gamma_p_inv(m_, p) / m_;
}

double NakagamiFading::moment(double s) const {
  return std::exp(std::lgamma(m_ + s) - std::lgamma(m_) - s * std::log(m_));
}

std::string NakagamiFading::name() const {
  std::ostringstream os;
  os << "nakagami(m=" << m_ << ")";
  return os.str();
}

void validate_fading(const FadingModel& fading) {
  if (std::abs(fading.cdf(0.0)) > 1e-12) throw std::invalid_argument("fading CDF must vanish at 0");
  const double top = fading.quantile(1.0 - 1e-9);
  double previous = 0.0;
  for (int k = 0; k <= 200; ++k) {
    const double x = top * k / 200.0;
    const double f = fading.cdf(x);
    if (f < previous - 1e-14 || f < -1e-14 || f > 1.0 + 1e-14) {
      throw std::invalid_argument("fading CDF must be a nondecreasing probability");
    }
    previous = f;
  }
  if (fading.survival(2.0 * top) > 1e-8) throw std::invalid_argument("fading CDF must saturate");

  auto tail = [&](double v) {
    const double x = v / (1.0 - v);
    return fading.survival(x) / ((1.0 - v) * (1.0 - v));
  };
  const QuadResult mean = integrate_adaptive(tail, 0.0, 1.0, QuadOptions{1e-10, 1e-13, 400});
  if (std::abs(mean.value - 1.0) > 1e-6) {
    std::ostringstream os;
    os << "fading power must have unit mean (got " << mean.value << ")";
    throw std::invalid_argument(os.str());
  }
}

std::shared_ptr<const FadingModel> make_rayleigh() {
  static const auto shared = std::make_shared<const RayleighFading>();
  return shared;
}

void NormalizedLocation::validate() const {
  if (!(a > 0.0 && b > 0.0 && std::isfinite(a) && std::isfinite(b))) {
    throw std::invalid_argument("relay distances must be positive");
  }
  const double slack = 1e-12 * (1.0 + a + b);
  if (std::abs(a - b) > 1.0 + slack || a + b < 1.0 - slack) {
    throw std::invalid_argument("relay distances violate the triangle inequality");
  }
}

double y_joint(double u, double v, const FadingModel& fading) {
  if (u < 0.0 || v < 0.0 || std::isnan(u) || std::isnan(v)) {
    throw std::domain_error("y_joint arguments must be nonnegative");
  }
  return fading.survival(u) * fading.survival(v);
}

double qualification_prob(const SystemParams& params, const FadingModel& fading,
                          const NormalizedLocation& loc) {
  return y_joint(params.source_coefficient() * std::pow(loc.a, params.alpha),
                 params.destination_coefficient() * std::pow(loc.b, params.alpha), fading);
}

namespace {

void check_biangular(const BiangularPoint& p) {
  const double sum = p.theta1 + p.theta2;
  if (!(p.theta1 >= 0.0 && p.theta2 >= 0.0) || !(sum >= kAngularGuard && sum <= M_PI - kAngularGuard)) {
    throw DegeneratePointError("biangular point lies on the S-D axis");
  }
}

}  // namespace

NormalizedLocation biangular_to_distances(const BiangularPoint& p) {
  check_biangular(p);
  if (p.theta1 < kAngularGuard || p.theta2 < kAngularGuard) {
    throw DegeneratePointError("biangular point coincides with S or D");
  }
  const double s = std::sin(p.theta1 + p.theta2);
  return {std::sin(p.theta2) / s, std::sin(p.theta1) / s};
}

double jacobian(const BiangularPoint& p) {
  check_biangular(p);
  const double s = std::sin(p.theta1 + p.theta2);
  return std::abs(std::sin(p.theta1) * std::sin(p.theta2) / (s * s * s));
}

double link_snr(double mean_snr, double distance_ratio, double alpha, double fading_draw) {
  if (mean_snr < 0.0 || distance_ratio < 0.0 || fading_draw < 0.0) {
    throw std::domain_error("link_snr arguments must be nonnegative");
  }
  if (distance_ratio == 0.0) throw std::domain_error("link_snr at zero distance is unbounded");
  return mean_snr * std::pow(distance_ratio, -alpha) * fading_draw;
}

NormalizedLocation to_location(const CartesianPoint& p) {
  return {std::hypot(p.x, p.y), std::hypot(p.x - 1.0, p.y)};
}

CartesianPoint to_cartesian(const NormalizedLocation& loc) {
  const double x = 0.5 * (loc.a * loc.a - loc.b * loc.b + 1.0);
  return {x, std::sqrt(std::max(0.0, loc.a * loc.a - x * x))};
}

BiangularPoint to_biangular(const CartesianPoint& p) {
  const double y = std::abs(p.y);
  return {std::atan2(y, p.x), std::atan2(y, 1.0 - p.x)};
}

namespace {

double level(const SystemParams& params, const FadingModel& fading, double a, double b) {
  return fading.neg_log_survival(params.source_coefficient() * std::pow(a, params.alpha)) +
         fading.neg_log_survival(params.destination_coefficient() * std::pow(b, params.alpha));
}

template <class F>
double bracketed_root(F&& f, double lo, double hi) {
  boost::uintmax_t iters = 200;
  const auto r = boost::math::tools::toms748_solve(f, lo, hi, boost::math::tools::eps_tolerance<double>(50), iters);
  return 0.5 * (r.first + r.second);
}

}  // namespace

QualificationPeak peak_qualification(const SystemParams& params, const FadingModel& fading) {
  auto on_segment = [&](double s) { return level(params, fading, s, 1.0 - s); };
  constexpr int kGrid = 256;
  int best = 0;
  for (int k = 1; k <= kGrid; ++k) {
    if (on_segment(static_cast<double>(k) / kGrid) < on_segment(static_cast<double>(best) / kGrid)) best = k;
  }
  const double lo = std::max(0, best - 1) / static_cast<double>(kGrid);
  const double hi = std::min(kGrid, best + 1) / static_cast<double>(kGrid);
  const auto r = boost::math::tools::brent_find_minima(on_segment, lo, hi, 52);
  const double s = r.second <= on_segment(static_cast<double>(best) / kGrid) ? r.first : best / double(kGrid);
  return {{s, 1.0 - s}, std::exp(-on_segment(s))};
}

std::optional<NormalizedLocation> location_with_qualification(const SystemParams& params,
                                                              const FadingModel& fading, double z) {
  if (!(z > 0.0 && z <= 1.0)) throw std::invalid_argument("qualification probability must lie in (0, 1]");
  const double target = -std::log(z);
  const double mid_level = level(params, fading, 0.5, 0.5);
  if (target >= mid_level) {
    auto f = [&](double r) { return level(params, fading, r, r) - target; };
    double hi = 1.0;
    while (f(hi) < 0.0) {
      hi *= 2.0;
      if (hi > 1e12) return std::nullopt;
    }
    if (f(0.5) == 0.0) return NormalizedLocation{0.5, 0.5};
    const double r = bracketed_root(f, 0.5, hi);
    return NormalizedLocation{r, r};
  }
  const QualificationPeak peak = peak_qualification(params, fading);
  if (z > peak.z) return std::nullopt;
  if (z == peak.z) return peak.loc;
  auto f = [&](double s) { return level(params, fading, s, 1.0 - s) - target; };
  const double s = bracketed_root(f, std::min(0.5, peak.loc.a), std::max(0.5, peak.loc.a));
  return NormalizedLocation{s, 1.0 - s};
}

}  // namespace fairrelay
