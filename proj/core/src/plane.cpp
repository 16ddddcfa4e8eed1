#include "fairrelay/detail/plane.hpp"

#include <boost/math/tools/minima.hpp>
#include <boost/math/tools/roots.hpp>

namespace fairrelay::detail {

namespace {

// Sample points of s in [0, 1/2]: geometric toward 0 (where supports near S
// or D become thin slivers) merged with a uniform grid.
std::vector<double> scan_grid() {
  std::vector<double> grid{0.0};
  for (int k = 60; k >= 1; --k) grid.push_back(std::ldexp(0.5, -k));
  for (int j = 1; j <= 64; ++j) grid.push_back(0.5 * j / 64.0);
  std::sort(grid.begin(), grid.end());
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
  return grid;
}

const std::vector<double>& grid() {
  static const std::vector<double> g = scan_grid();
  return g;
}

template <class G>
double solve(G&& g, double lo, double hi, double glo, double ghi) {
  boost::uintmax_t iters = 200;
  const auto r = boost::math::tools::toms748_solve(g, lo, hi, glo, ghi,
                                                   boost::math::tools::eps_tolerance<double>(50), iters);
  return 0.5 * (r.first + r.second);
}

}  // namespace

PlaneIntegrator::PlaneIntegrator(LevelModel level, PlaneOptions options)
    : level_(level), options_(options) {
  const auto& g = grid();
  zeta_min_ = std::numeric_limits<double>::infinity();
  for (int half = 0; half < 2; ++half) {
    std::size_t best = 0;
    double best_value = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < g.size(); ++j) {
      const double v = segment_level(half, g[j]);
      if (v < best_value) {
        best_value = v;
        best = j;
      }
    }
    double arg = g[best];
    if (best > 0 && best + 1 < g.size()) {
      const auto r = boost::math::tools::brent_find_minima(
          [&](double s) { return segment_level(half, s); }, g[best - 1], g[best + 1], 52);
      if (r.second < best_value) {
        arg = r.first;
        best_value = r.second;
      }
    }
    segment_argmin_[half] = arg;
    zeta_min_ = std::min(zeta_min_, best_value);
  }
}

double PlaneIntegrator::crossing(const Ray& ray, double zeta) const {
  auto g = [&](double tau) { return level_at(ray, tau) - zeta; };
  const double g0 = g(0.0);
  if (g0 >= 0.0) return 0.0;
  const double g_mid = g(M_PI_2);
  if (g_mid >= 0.0) return solve(g, 0.0, M_PI_2, g0, g_mid);
  double lo = M_PI_2;
  double glo = g_mid;
  double span = 2.0;
  for (int it = 0; it < 2000; ++it) {
    const double hi = M_PI_2 + span;
    const double ghi = g(hi);
    if (ghi >= 0.0) return solve(g, lo, hi, glo, ghi);
    lo = hi;
    glo = ghi;
    span *= 2.0;
  }
  return lo;
}

std::vector<double> PlaneIntegrator::outer_breakpoints(int half, const std::vector<double>& levels) const {
  const auto& g = grid();
  std::vector<double> values(g.size());
  for (std::size_t j = 0; j < g.size(); ++j) values[j] = segment_level(half, g[j]);

  std::vector<double> bp{0.0, 0.5};
  const double arg = segment_argmin_[half];
  if (arg > 0.0 && arg < 0.5) bp.push_back(arg);
  for (double level : levels) {
    auto h = [&](double s) { return segment_level(half, s) - level; };
    for (std::size_t j = 0; j + 1 < g.size(); ++j) {
      const double h0 = values[j] - level;
      const double h1 = values[j + 1] - level;
      if ((h0 < 0.0) == (h1 < 0.0) || h0 == 0.0 || h1 == 0.0) continue;
      bp.push_back(solve(h, g[j], g[j + 1], h0, h1));
    }
    // The minimizer may dip below the level between two grid samples.
    if (arg > 0.0 && arg < 0.5 && segment_level(half, arg) < level) {
      const auto it = std::upper_bound(g.begin(), g.end(), arg);
      const std::size_t j = static_cast<std::size_t>(it - g.begin());
      if (j > 0 && j < g.size()) {
        const double hm = segment_level(half, arg) - level;
        if (values[j - 1] - level > 0.0) bp.push_back(solve(h, g[j - 1], arg, values[j - 1] - level, hm));
        if (values[j] - level > 0.0) bp.push_back(solve(h, arg, g[j], hm, values[j] - level));
      }
    }
  }
  std::sort(bp.begin(), bp.end());
  std::vector<double> out;
  for (double s : bp) {
    if (out.empty() || s - out.back() > 1e-15) out.push_back(s);
  }
  if (out.back() < 0.5) out.back() = 0.5;
  return out;
}

}  // namespace fairrelay::detail
