#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "fairrelay/experiments.hpp"
#include "fairrelay/optimizer.hpp"

namespace fairrelay::experiments::detail {

/// One cooperation-probability evaluation. `loc` is empty when no location
/// has the requested qualification probability; such rows get no MC value.
struct PavgRequest {
  SystemParams params;
  Scheme scheme;
  std::optional<NormalizedLocation> loc;
  double z = 0.0;
};

bool same_params(const SystemParams& x, const SystemParams& y);

/// Index of each item's params among the distinct ones, in first-seen order.
std::vector<std::size_t> group_by_params(const std::vector<SystemParams>& params,
                                         std::vector<SystemParams>& distinct);

std::vector<std::optional<Estimate>> analytic_pavg(const std::vector<PavgRequest>& requests,
                                                   const std::shared_ptr<const FadingModel>& fading,
                                                   const QuadratureConfig& q, int workers);

std::vector<std::optional<McEstimate>> mc_pavg(const std::vector<PavgRequest>& requests, const FadingModel& fading,
                                               std::uint64_t trials, std::uint64_t seed, const SimOptions& options);

BetaResult search_beta(const ProposedModel& model, int workers);

nlohmann::ordered_json base_sidecar(const std::string& command, const ExperimentConfig& cfg,
                                    const Scenario& scenario, Engine engine, std::optional<std::uint64_t> trials);

Cell opt(const std::optional<double>& v);

Table contour_table(const ContourGrid& grid, const std::vector<std::optional<Estimate>>& analytic);

/// Analytic values for every lattice cell; empty optionals for cells whose
/// location is not a valid probe.
std::vector<std::optional<Estimate>> contour_analytic(const SystemParams& params, const Scheme& scheme,
                                                      const Lattice& lattice,
                                                      const std::shared_ptr<const FadingModel>& fading,
                                                      const QuadratureConfig& q, int workers);

}  // namespace fairrelay::experiments::detail
