#pragma once

// Plane integration over the relay region in biangular ray coordinates.
//
// The upper half-plane is swept by rays theta1 = rho t, theta2 = rho (1 - t)
// with t in (0, 1) and rho in (0, pi). Along every ray both distances a and b
// are nondecreasing, so any integrand that is a function of the level
// L = -ln Z crosses each level exactly once per ray. Kinks of the integrand
// sit on level sets and become explicit breakpoints of the inner integral.
//
// The inner coordinate tau equals rho on [0, pi/2]. Beyond that it runs
// along v = 1/(pi - rho) = tau - pi/2 + 2/pi, which turns the 1/(pi-rho)^3
// growth of the area element into a near-polynomial integrand.

#include <algorithm>
#include <cmath>
#include <vector>

#include "fairrelay/model.hpp"
#include "fairrelay/quadrature.hpp"

namespace fairrelay::detail {

/// x^alpha with a fast path for the common integer exponents.
inline double pow_alpha(double x, double alpha) {
  if (alpha == 4.0) {
    const double x2 = x * x;
    return x2 * x2;
  }
  if (alpha == 2.0) return x * x;
  if (alpha == 3.0) return x * x * x;
  return std::pow(x, alpha);
}

/// L(a, b) = l(ca1 a^alpha) + l(ca2 a^alpha) + l(cb b^alpha), l = -ln(1 - F).
/// A zero coefficient drops its term.
struct LevelModel {
  const FadingModel* fading = nullptr;
  double alpha = 4.0;
  double ca1 = 0.0;
  double ca2 = 0.0;
  double cb = 0.0;

  double operator()(double a, double b) const {
    const double pa = pow_alpha(a, alpha);
    double level = 0.0;
    if (ca1 > 0.0) level += fading->neg_log_survival(ca1 * pa);
    if (ca2 > 0.0) level += fading->neg_log_survival(ca2 * pa);
    if (cb > 0.0) level += fading->neg_log_survival(cb * pow_alpha(b, alpha));
    return std::min(level, 1e300);
  }
};

struct RayPoint {
  double a = 0.0;
  double b = 0.0;
  double weight = 0.0;  ///< area element per dtau dt
};

inline constexpr double kPiLow = 1.2246467991473532e-16;  // pi - M_PI

/// A ray of fixed t; both t and 1 - t are stored so either may be tiny.
struct Ray {
  double t = 0.5;
  double tc = 0.5;

  static double v_of(double tau) { return tau - M_PI_2 + M_2_PI; }
  static double tau_of_v(double v) { return v - M_2_PI + M_PI_2; }

  RayPoint at(double tau) const {
    if (tau <= 0.0) return {tc, t, t * tc};
    if (tau <= M_PI_2) {
      const double s1 = std::sin(tau * t);
      const double s2 = std::sin(tau * tc);
      const double s = std::sin(tau);
      return {s2 / s, s1 / s, tau * s1 * s2 / (s * s * s)};
    }
    const double psi = 1.0 / v_of(tau);
    const double rho = (M_PI - psi) + kPiLow;
    const double th1 = rho * t;
    const double th2 = rho * tc;
    const double s1 = th1 <= M_PI_2 ? std::sin(th1) : std::sin(psi + rho * tc);
    const double s2 = th2 <= M_PI_2 ? std::sin(th2) : std::sin(psi + rho * t);
    const double s = std::sin(psi);
    return {s2 / s, s1 / s, rho * s1 * s2 / (s * s * s) * psi * psi};
  }
};

struct PlaneOptions {
  double rel_tol = 1e-6;
  double abs_tol = 1e-12;
  int max_refinements = 200;
  double margin = 1e-4;  ///< collar width near rho = 0 and rho = pi
};

struct PlaneResult {
  Estimate estimate;
  bool converged = true;
};

/// Full-plane integrals of f(point, L) dA.
class PlaneIntegrator {
 public:
  PlaneIntegrator(LevelModel level, PlaneOptions options);

  const LevelModel& level() const { return level_; }
  const PlaneOptions& options() const { return options_; }

  /// min L over the plane (attained on the S-D segment).
  double zeta_min() const { return zeta_min_; }
  /// L at S and at D.
  double zeta_source() const { return level_(0.0, 1.0); }
  double zeta_destination() const { return level_(1.0, 0.0); }

  double level_at(const Ray& ray, double tau) const {
    const RayPoint p = ray.at(tau);
    return level_(p.a, p.b);
  }

  /// tau at which the ray reaches level zeta; 0 if it starts above it.
  double crossing(const Ray& ray, double zeta) const;

  /// Points s in (0, 1/2) of one half of the outer range where the
  /// segment level crosses one of `levels`, plus the segment minimizer.
  std::vector<double> outer_breakpoints(int half, const std::vector<double>& levels) const;

  /// 2 * integral of f(p, L) over {L < end_level}. `kink_levels` are levels
  /// across which f is not smooth.
  template <class F>
  PlaneResult integrate(F&& f, std::vector<double> kink_levels, double end_level) const;

  /// Area of {L < zeta}.
  PlaneResult area_below(double zeta) const {
    return integrate([](const RayPoint&, double) { return 1.0; }, {}, zeta);
  }

 private:
  static Ray ray_for(int half, double s) {
    return half == 0 ? Ray{s, 1.0 - s} : Ray{1.0 - s, s};
  }
  double segment_level(int half, double s) const {
    return half == 0 ? level_(1.0 - s, s) : level_(s, 1.0 - s);
  }

  LevelModel level_;
  PlaneOptions options_;
  double zeta_min_ = 0.0;
  double segment_argmin_[2] = {0.0, 0.0};
};

template <class F>
PlaneResult PlaneIntegrator::integrate(F&& f, std::vector<double> kink_levels, double end_level) const {
  std::sort(kink_levels.begin(), kink_levels.end());
  if (!(end_level > zeta_min_)) return {};

  std::vector<double> levels;
  for (double k : kink_levels) {
    if (k > zeta_min_ && k < end_level) levels.push_back(k);
  }
  std::vector<double> guide = levels;
  guide.push_back(end_level);
  for (double step : {1.0, 4.0, 16.0}) {
    if (zeta_min_ + step < end_level) guide.push_back(zeta_min_ + step);
  }

  const QuadOptions inner_opt{0.1 * options_.rel_tol, 0.1 * options_.abs_tol, options_.max_refinements};
  const double collar_lo = options_.margin;
  const double collar_hi = Ray::tau_of_v(1.0 / options_.margin);

  auto inner = [&](const Ray& ray) -> Estimate {
    const double tau_end = crossing(ray, end_level);
    if (tau_end <= 0.0) return {};
    std::vector<double> cuts{0.0, collar_lo, M_PI_2, collar_hi};
    for (double k : levels) cuts.push_back(crossing(ray, k));
    std::erase_if(cuts, [&](double c) { return c > tau_end; });
    cuts.push_back(tau_end);
    std::sort(cuts.begin(), cuts.end());
    auto integrand = [&](double tau) {
      const RayPoint p = ray.at(tau);
      return f(p, level_(p.a, p.b)) * p.weight;
    };
    return integrate_adaptive(integrand, std::span<const double>(cuts), inner_opt).estimate();
  };

  PlaneResult out;
  for (int half = 0; half < 2; ++half) {
    const std::vector<double> bp = outer_breakpoints(half, guide);
    std::vector<double> pieces(bp.size());
    for (std::size_t k = 0; k < bp.size(); ++k) pieces[k] = static_cast<double>(k);
    // Each piece [bp_k, bp_k+1] is mapped by a smoothstep, which flattens
    // square-root behavior where a level set touches the segment.
    auto outer = [&](double u) -> Estimate {
      const std::size_t k = std::min<std::size_t>(static_cast<std::size_t>(u), bp.size() - 2);
      const double w = u - static_cast<double>(k);
      const double lo = bp[k];
      const double len = bp[k + 1] - lo;
      const double s = lo + len * w * w * (3.0 - 2.0 * w);
      const double ds = len * 6.0 * w * (1.0 - w);
      if (ds <= 0.0 || s <= 0.0) return {};
      const Estimate e = inner(ray_for(half, s));
      return {e.value * ds, e.error * ds};
    };
    const QuadOptions outer_opt{options_.rel_tol, 0.5 * options_.abs_tol, options_.max_refinements};
    const QuadResult r = integrate_adaptive(outer, std::span<const double>(pieces), outer_opt);
    out.estimate.value += 2.0 * r.value;
    out.estimate.error += 2.0 * r.error;
    out.converged = out.converged && r.converged;
  }
  return out;
}

}  // namespace fairrelay::detail
