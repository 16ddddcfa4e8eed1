#pragma once

// Minimax choice of the fairness exponent beta.
//
// The objective is the largest cooperation probability over a grid of
// qualification values z_x. Its minimum over locations is close to zero
// and is dropped by default; `include_min_term` restores max - min.

#include <string>
#include <utility>
#include <vector>

#include "fairrelay/analytic.hpp"

namespace fairrelay {

struct BetaSearchConfig {
  double beta_lo = 0.0;
  double beta_hi = 10.0;
  std::vector<double> z_grid = default_z_grid();
  double beta_tol = 1e-3;
  int coarse_points = 33;
  bool include_min_term = false;
  int workers = 1;  ///< concurrent coarse-scan evaluations

  /// 101 points uniform on [0.01, 1].
  static std::vector<double> default_z_grid();
  void validate() const;
};

struct BetaResult {
  double beta_opt = 0.0;
  double max_unfairness = 0.0;
  PowerProfile profile_at_opt;
  std::size_t evaluations = 0;
  bool degenerate = false;  ///< objective constant in beta (e.g. nbar = 0)
  std::vector<std::string> warnings;
  std::vector<std::pair<double, double>> coarse_scan;  ///< (beta, objective)
};

double max_unfairness(const ProposedModel& model, double beta, const BetaSearchConfig& config);
double max_unfairness(const SystemParams& params, std::shared_ptr<const FadingModel> fading, double beta,
                      const BetaSearchConfig& config, const QuadratureConfig& q = {});

BetaResult optimize_beta(const ProposedModel& model, const BetaSearchConfig& config);
BetaResult optimize_beta(const SystemParams& params, std::shared_ptr<const FadingModel> fading,
                         const BetaSearchConfig& config, const QuadratureConfig& q = {});

}  // namespace fairrelay
