#include "fairrelay/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "fairrelay/parallel.hpp"

namespace fairrelay {

std::vector<double> BetaSearchConfig::default_z_grid() {
  std::vector<double> grid(101);
  for (int k = 0; k <= 100; ++k) grid[k] = 0.01 + 0.99 * k / 100.0;
  grid.back() = 1.0;
  return grid;
}

void BetaSearchConfig::validate() const {
  if (!(beta_lo >= 0.0 && beta_hi > beta_lo && std::isfinite(beta_hi))) {
    throw std::invalid_argument("beta range must satisfy 0 <= lo < hi");
  }
  if (z_grid.empty()) throw std::invalid_argument("z grid is empty");
  for (double z : z_grid) {
    if (!(z > 0.0 && z <= 1.0)) throw std::invalid_argument("z grid values must lie in (0, 1]");
  }
  if (!(beta_tol > 0.0)) throw std::invalid_argument("beta_tol must be positive");
  if (coarse_points < 3) throw std::invalid_argument("coarse scan needs at least 3 points");
}

double max_unfairness(const ProposedModel& model, double beta, const BetaSearchConfig& config) {
  const std::vector<Estimate> values = model.pavg_grid(config.z_grid, beta);
  double hi = -std::numeric_limits<double>::infinity();
  double lo = std::numeric_limits<double>::infinity();
  for (const Estimate& e : values) {
    hi = std::max(hi, e.value);
    lo = std::min(lo, e.value);
  }
  return config.include_min_term ? hi - lo : hi;
}

double max_unfairness(const SystemParams& params, std::shared_ptr<const FadingModel> fading, double beta,
                      const BetaSearchConfig& config, const QuadratureConfig& q) {
  config.validate();
  return max_unfairness(ProposedModel(params, std::move(fading), q), beta, config);
}

BetaResult optimize_beta(const ProposedModel& model, const BetaSearchConfig& config) {
  config.validate();
  BetaResult result;
  const int n = config.coarse_points;
  std::vector<double> betas(static_cast<std::size_t>(n));
  std::vector<double> objective(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k) {
    betas[k] = config.beta_lo + (config.beta_hi - config.beta_lo) * k / (n - 1);
  }
  betas.back() = config.beta_hi;
  parallel_for(betas.size(), config.workers,
               [&](std::size_t k) { objective[k] = max_unfairness(model, betas[k], config); });
  result.evaluations = betas.size();
  for (std::size_t k = 0; k < betas.size(); ++k) result.coarse_scan.emplace_back(betas[k], objective[k]);

  const auto [min_it, max_it] = std::minmax_element(objective.begin(), objective.end());
  if (*max_it - *min_it <= 1e-12 * std::max(1e-300, std::abs(*max_it))) {
    result.degenerate = true;
    result.beta_opt = config.beta_lo;
    result.max_unfairness = objective.front();
    result.profile_at_opt = model.profile_at(config.z_grid, result.beta_opt);
    result.warnings.push_back("objective is constant in beta; returning the lower end of the range");
    return result;
  }

  int local_minima = 0;
  for (std::size_t k = 0; k < objective.size(); ++k) {
    const bool left = k == 0 || objective[k] < objective[k - 1];
    const bool right = k + 1 == objective.size() || objective[k] < objective[k + 1];
    if (left && right) ++local_minima;
  }
  if (local_minima > 1) {
    std::ostringstream os;
    os << "coarse scan shows " << local_minima << " local minima; refined around the lowest";
    result.warnings.push_back(os.str());
  }

  const std::size_t best = static_cast<std::size_t>(min_it - objective.begin());
  double a = betas[best == 0 ? 0 : best - 1];
  double b = betas[std::min(best + 1, betas.size() - 1)];
  double best_beta = betas[best];
  double best_value = objective[best];

  // Golden-section search on the bracketing cell pair.
  const double ratio = 0.5 * (std::sqrt(5.0) - 1.0);
  auto eval = [&](double beta) {
    ++result.evaluations;
    const double v = max_unfairness(model, beta, config);
    if (v < best_value) {
      best_value = v;
      best_beta = beta;
    }
    return v;
  };
  double c = b - ratio * (b - a);
  double d = a + ratio * (b - a);
  double fc = eval(c);
  double fd = eval(d);
  while (b - a > config.beta_tol) {
    if (fc <= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - ratio * (b - a);
      fc = eval(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + ratio * (b - a);
      fd = eval(d);
    }
  }

  result.beta_opt = best_beta;
  result.max_unfairness = best_value;
  result.profile_at_opt = model.profile_at(config.z_grid, best_beta);
  return result;
}

BetaResult optimize_beta(const SystemParams& params, std::shared_ptr<const FadingModel> fading,
                         const BetaSearchConfig& config, const QuadratureConfig& q) {
  config.validate();
  return optimize_beta(ProposedModel(params, std::move(fading), q), config);
}

}  // namespace fairrelay
