#pragma once

// Adaptive 1-D Gauss-Kronrod integration and Chebyshev panel interpolation.
//
// The integrators accept callables returning either a plain double or an
// Estimate. The latter is how nested (iterated) integrals carry their inner
// error upwards: the inner error is integrated with the same Kronrod weights
// and added to the interval's own error.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <queue>
#include <span>
#include <stdexcept>
#include <string>
#include <type_traits>
#include <vector>

namespace fairrelay {

/// A value with an absolute error estimate.
struct Estimate {
  double value = 0.0;
  double error = 0.0;
};

struct QuadOptions {
  double rel_tol = 1e-8;
  double abs_tol = 0.0;
  int max_subdivisions = 200;
};

struct QuadResult {
  double value = 0.0;
  double error = 0.0;
  std::size_t evaluations = 0;
  int subdivisions = 0;
  bool converged = true;

  Estimate estimate() const { return {value, error}; }
};

/// Thrown when an adaptive scheme exhausts its refinement budget.
class NonConvergenceError : public std::runtime_error {
 public:
  NonConvergenceError(const std::string& what, double estimate, double error)
      : std::runtime_error(what + " (estimate " + std::to_string(estimate) + ", error " +
                           std::to_string(error) + ")"),
        estimate_(estimate),
        error_(error) {}

  double estimate() const noexcept { return estimate_; }
  double error() const noexcept { return error_; }

 private:
  double estimate_;
  double error_;
};

namespace detail {

inline constexpr std::array<double, 8> kKronrodNodes = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};

inline constexpr std::array<double, 8> kKronrodWeights = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};

// Gauss weights for Kronrod nodes 1, 3, 5, 7.
inline constexpr std::array<double, 4> kGaussWeights = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
  double value = 0.0;
  double error = 0.0;        ///< discretization error of this rule
  double inner_error = 0.0;  ///< propagated error of the integrand values
  bool splittable = true;
};

struct IntervalOrder {
  bool operator()(const Interval& lhs, const Interval& rhs) const { return lhs.error < rhs.error; }
};

template <class T>
inline Estimate as_estimate(const T& v) {
  if constexpr (std::is_same_v<std::decay_t<T>, Estimate>) {
    return v;
  } else {
    return Estimate{static_cast<double>(v), 0.0};
  }
}

template <class F>
Interval apply_gk15(F& f, double lo, double hi, std::size_t& evaluations) {
  constexpr double eps = std::numeric_limits<double>::epsilon();
  constexpr double tiny = std::numeric_limits<double>::min();
  const double center = 0.5 * (lo + hi);
  const double half = 0.5 * (hi - lo);

  std::array<double, 15> fv{};
  double inner_error = 0.0;
  auto eval = [&](int slot, double x, double weight) {
    const Estimate e = as_estimate(f(x));
    fv[slot] = e.value;
    inner_error += weight * e.error;
  };

  eval(0, center, kKronrodWeights[7]);
  for (int j = 0; j < 7; ++j) {
    const double dx = half * kKronrodNodes[j];
    eval(1 + 2 * j, center - dx, kKronrodWeights[j]);
    eval(2 + 2 * j, center + dx, kKronrodWeights[j]);
  }
  evaluations += 15;

  double resk = fv[0] * kKronrodWeights[7];
  double resg = fv[0] * kGaussWeights[3];
  double resabs = std::abs(resk);
  for (int j = 0; j < 7; ++j) {
    const double pair = fv[1 + 2 * j] + fv[2 + 2 * j];
    resk += kKronrodWeights[j] * pair;
    resabs += kKronrodWeights[j] * (std::abs(fv[1 + 2 * j]) + std::abs(fv[2 + 2 * j]));
    if (j % 2 == 1) resg += kGaussWeights[j / 2] * pair;
  }
  const double mean = 0.5 * resk;
  double resasc = kKronrodWeights[7] * std::abs(fv[0] - mean);
  for (int j = 0; j < 7; ++j) {
    resasc += kKronrodWeights[j] * (std::abs(fv[1 + 2 * j] - mean) + std::abs(fv[2 + 2 * j] - mean));
  }

  const double scale = std::abs(half);
  resabs *= scale;
  resasc *= scale;
  double err = std::abs((resk - resg) * half);
  if (resasc != 0.0 && err != 0.0) err = resasc * std::min(1.0, std::pow(200.0 * err / resasc, 1.5));
  if (resabs > tiny / (50.0 * eps)) err = std::max(50.0 * eps * resabs, err);

  Interval out;
  out.lo = lo;
  out.hi = hi;
  out.value = resk * half;
  out.error = err;
  out.inner_error = inner_error * scale;
  out.splittable = !(center <= lo || center >= hi);
  return out;
}

}  // namespace detail

/// Globally adaptive G7/K15 integration over the union of [b_k, b_{k+1}].
/// Breakpoints must be nondecreasing; zero-width pieces are skipped.
///
/// Refinement stops once the discretization error meets the tolerance. The
/// propagated error of Estimate-valued integrands cannot be reduced by
/// subdividing, so it is reported on top but does not drive convergence.
template <class F>
QuadResult integrate_adaptive(F&& f, std::span<const double> breakpoints, const QuadOptions& opt) {
  QuadResult result;
  std::priority_queue<detail::Interval, std::vector<detail::Interval>, detail::IntervalOrder> heap;
  double total = 0.0;
  double total_err = 0.0;
  for (std::size_t k = 0; k + 1 < breakpoints.size(); ++k) {
    if (!(breakpoints[k + 1] > breakpoints[k])) continue;
    auto piece = detail::apply_gk15(f, breakpoints[k], breakpoints[k + 1], result.evaluations);
    total += piece.value;
    total_err += piece.error;
    heap.push(piece);
  }

  std::vector<detail::Interval> frozen;
  auto tolerance = [&] { return std::max(opt.abs_tol, opt.rel_tol * std::abs(total)); };
  while (!heap.empty() && total_err > tolerance()) {
    if (result.subdivisions >= opt.max_subdivisions) break;
    detail::Interval worst = heap.top();
    heap.pop();
    if (!worst.splittable) {
      frozen.push_back(worst);
      continue;
    }
    const double mid = 0.5 * (worst.lo + worst.hi);
    auto left = detail::apply_gk15(f, worst.lo, mid, result.evaluations);
    auto right = detail::apply_gk15(f, mid, worst.hi, result.evaluations);
    ++result.subdivisions;
    total += left.value + right.value - worst.value;
    total_err += left.error + right.error - worst.error;
    heap.push(left);
    heap.push(right);
  }

  // Re-sum to shed the drift of the incremental updates.
  double value = 0.0;
  double comp = 0.0;
  double err = 0.0;
  double inner = 0.0;
  auto accumulate = [&](const detail::Interval& iv) {
    const double y = iv.value - comp;
    const double t = value + y;
    comp = (t - value) - y;
    value = t;
    err += iv.error;
    inner += iv.inner_error;
  };
  for (const auto& iv : frozen) accumulate(iv);
  while (!heap.empty()) {
    accumulate(heap.top());
    heap.pop();
  }
  result.value = value;
  result.error = err + inner;
  result.converged = err <= std::max(opt.abs_tol, opt.rel_tol * std::abs(value));
  return result;
}

template <class F>
QuadResult integrate_adaptive(F&& f, double lo, double hi, const QuadOptions& opt) {
  const std::array<double, 2> bp{lo, hi};
  return integrate_adaptive(std::forward<F>(f), std::span<const double>(bp), opt);
}

/// Degree-n Chebyshev interpolant on [lo, hi] (Chebyshev-Lobatto nodes,
/// barycentric evaluation).
class ChebyshevPanel {
 public:
  static constexpr int kDegree = 16;
  static constexpr int kNodes = kDegree + 1;

  ChebyshevPanel() = default;

  template <class F>
    requires std::is_invocable_r_v<double, F, double>
  ChebyshevPanel(double lo, double hi, F&& f) : lo_(lo), hi_(hi) {
    for (int j = 0; j < kNodes; ++j) values_[j] = f(node(j));
  }

  ChebyshevPanel(double lo, double hi, const std::array<double, kNodes>& values)
      : lo_(lo), hi_(hi), values_(values) {}

  /// Node j in [lo, hi]; node 0 is hi and node kDegree is lo.
  double node(int j) const { return node(lo_, hi_, j); }

  static double node(double lo, double hi, int j) {
    if (j == 0) return hi;
    if (j == kDegree) return lo;
    return 0.5 * (lo + hi) + 0.5 * (hi - lo) * std::cos(M_PI * j / kDegree);
  }

  double lo() const { return lo_; }
  double hi() const { return hi_; }
  const std::array<double, kNodes>& values() const { return values_; }

  double operator()(double x) const {
    const double s = (2.0 * x - lo_ - hi_) / (hi_ - lo_);
    double num = 0.0;
    double den = 0.0;
    for (int j = 0; j < kNodes; ++j) {
      const double xj = std::cos(M_PI * j / kDegree);
      const double diff = s - xj;
      if (diff == 0.0) return values_[j];
      double w = (j % 2 == 0) ? 1.0 : -1.0;
      if (j == 0 || j == kDegree) w *= 0.5;
      w /= diff;
      num += w * values_[j];
      den += w;
    }
    return num / den;
  }

  /// Magnitude of the two highest Chebyshev coefficients; a proxy for the
  /// interpolation error.
  double tail() const {
    double tail_sum = 0.0;
    for (int k = kDegree - 1; k <= kDegree; ++k) {
      double c = 0.0;
      for (int j = 0; j < kNodes; ++j) {
        double term = values_[j] * std::cos(M_PI * j * k / kDegree);
        if (j == 0 || j == kDegree) term *= 0.5;
        c += term;
      }
      c *= 2.0 / kDegree;
      if (k == kDegree) c *= 0.5;
      tail_sum += std::abs(c);
    }
    return tail_sum;
  }

  double max_abs() const {
    double m = 0.0;
    for (double v : values_) m = std::max(m, std::abs(v));
    return m;
  }

 private:
  double lo_ = 0.0;
  double hi_ = 1.0;
  std::array<double, kNodes> values_{};
};

}  // namespace fairrelay
