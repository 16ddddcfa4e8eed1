#pragma once

// Independent statistical oracles for the tests. They use the standard
// library generator, not the library's own streams.

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

namespace oracle {

struct Sample {
  double mean = 0.0;
  double std_error = 0.0;
};

/// Plain Monte Carlo of the full-plane integral of f(a, b), sampling
/// Cartesian points uniformly in a disc around the S-D midpoint.
template <class F>
Sample plane_integral(F&& f, double radius, std::size_t n, unsigned seed) {
  std::mt19937_64 gen(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const double area = M_PI * radius * radius;
  double sum = 0.0;
  double sum2 = 0.0;
  for (std::size_t k = 0; k < n;) {
    const double x = u(gen);
    const double y = u(gen);
    if (x * x + y * y > 1.0) continue;
    const double px = 0.5 + radius * x;
    const double py = radius * y;
    const double v = f(std::hypot(px, py), std::hypot(px - 1.0, py));
    sum += v;
    sum2 += v * v;
    ++k;
  }
  const double m = sum / n;
  const double var = std::max(0.0, sum2 / n - m * m);
  return {area * m, area * std::sqrt(var / (n - 1))};
}

/// Kolmogorov-Smirnov statistic of samples against the uniform law on [0, 1].
inline double ks_uniform(std::vector<double> x) {
  std::sort(x.begin(), x.end());
  const double n = static_cast<double>(x.size());
  double d = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    d = std::max({d, (i + 1) / n - x[i], x[i] - i / n});
  }
  return d;
}

/// 1% critical value of the KS statistic for large n.
inline double ks_critical_1pct(std::size_t n) { return 1.628 / std::sqrt(static_cast<double>(n)); }

}  // namespace oracle
