#include <algorithm>
#include <cmath>

#include "fairrelay/parallel.hpp"
#include "internal.hpp"

namespace fairrelay::experiments::detail {

bool same_params(const SystemParams& x, const SystemParams& y) {
  return x.gamma_sr == y.gamma_sr && x.gamma_rd == y.gamma_rd && x.theta_r == y.theta_r &&
         x.theta_d == y.theta_d && x.alpha == y.alpha && x.nbar == y.nbar && x.relay_power == y.relay_power;
}

std::vector<std::size_t> group_by_params(const std::vector<SystemParams>& params,
                                         std::vector<SystemParams>& distinct) {
  std::vector<std::size_t> index;
  index.reserve(params.size());
  for (const auto& p : params) {
    auto it = std::find_if(distinct.begin(), distinct.end(), [&](const SystemParams& d) { return same_params(d, p); });
    if (it == distinct.end()) {
      distinct.push_back(p);
      it = distinct.end() - 1;
    }
    index.push_back(static_cast<std::size_t>(it - distinct.begin()));
  }
  return index;
}

std::vector<std::optional<Estimate>> analytic_pavg(const std::vector<PavgRequest>& requests,
                                                   const std::shared_ptr<const FadingModel>& fading,
                                                   const QuadratureConfig& q, int workers) {
  // Timer-based and opportunistic requests need different models.
  std::vector<SystemParams> keys;
  std::vector<bool> family;
  std::vector<std::size_t> slot(requests.size());
  for (std::size_t i = 0; i < requests.size(); ++i) {
    const bool timers = requests[i].scheme.uses_timers();
    std::size_t k = 0;
    while (k < keys.size() && !(family[k] == timers && same_params(keys[k], requests[i].params))) ++k;
    if (k == keys.size()) {
      keys.push_back(requests[i].params);
      family.push_back(timers);
    }
    slot[i] = k;
  }
  std::vector<std::unique_ptr<ProposedModel>> proposed(keys.size());
  std::vector<std::unique_ptr<OpportunisticModel>> opportunistic(keys.size());
  parallel_for(keys.size(), workers, [&](std::size_t k) {
    if (family[k]) {
      proposed[k] = std::make_unique<ProposedModel>(keys[k], fading, q);
    } else {
      opportunistic[k] = std::make_unique<OpportunisticModel>(keys[k], fading, q);
    }
  });
  std::vector<std::optional<Estimate>> out(requests.size());
  parallel_for(requests.size(), workers, [&](std::size_t i) {
    const PavgRequest& r = requests[i];
    if (r.scheme.uses_timers()) {
      out[i] = proposed[slot[i]]->pavg(r.z, r.scheme.timer_exponent());
    } else if (r.loc) {
      out[i] = opportunistic[slot[i]]->pavg(*r.loc);
    }
  });
  return out;
}

std::vector<std::optional<McEstimate>> mc_pavg(const std::vector<PavgRequest>& requests, const FadingModel& fading,
                                               std::uint64_t trials, std::uint64_t seed,
                                               const SimOptions& options) {
  std::vector<SystemParams> params;
  for (const auto& r : requests) params.push_back(r.params);
  std::vector<SystemParams> distinct;
  const std::vector<std::size_t> group = group_by_params(params, distinct);

  std::vector<std::optional<McEstimate>> out(requests.size());
  for (std::size_t g = 0; g < distinct.size(); ++g) {
    std::vector<Scheme> schemes;
    std::vector<ProbeSpec> probes;
    std::vector<std::pair<std::size_t, std::size_t>> where(requests.size());
    for (std::size_t i = 0; i < requests.size(); ++i) {
      if (group[i] != g || !requests[i].loc) continue;
      const Scheme& sc = requests[i].scheme;
      auto s = std::find_if(schemes.begin(), schemes.end(),
                            [&](const Scheme& x) { return x.kind == sc.kind && x.beta == sc.beta; });
      if (s == schemes.end()) s = schemes.insert(schemes.end(), sc);
      const NormalizedLocation& loc = *requests[i].loc;
      auto p = std::find_if(probes.begin(), probes.end(),
                            [&](const ProbeSpec& x) { return x.loc.a == loc.a && x.loc.b == loc.b; });
      if (p == probes.end()) p = probes.insert(probes.end(), ProbeSpec{loc});
      where[i] = {static_cast<std::size_t>(s - schemes.begin()), static_cast<std::size_t>(p - probes.begin())};
    }
    if (probes.empty()) continue;
    const BatchResult batch = estimate_batch(distinct[g], fading, schemes, probes, trials, seed, options);
    for (std::size_t i = 0; i < requests.size(); ++i) {
      if (group[i] != g || !requests[i].loc) continue;
      out[i] = batch.cooperation[where[i].first][where[i].second];
    }
  }
  return out;
}

BetaResult search_beta(const ProposedModel& model, int workers) {
  BetaSearchConfig config;
  config.workers = workers;
  return optimize_beta(model, config);
}

nlohmann::ordered_json base_sidecar(const std::string& command, const ExperimentConfig& cfg,
                                    const Scenario& scenario, Engine engine, std::optional<std::uint64_t> trials) {
  nlohmann::ordered_json j;
  j["command"] = command;
  j["scenario"] = scenario.to_json();
  j["fading"] = "rayleigh";
  j["engine"] = engine_name(engine);
  if (uses_mc(engine) && trials) {
    j["trials"] = *trials;
    j["seed"] = cfg.seed;
    if (cfg.region_radius) {
      j["region_radius"] = *cfg.region_radius;
    } else {
      j["region_radius"] = SimRegion::for_params(scenario.params(), *make_rayleigh()).radius;
    }
  }
  if (uses_analytic(engine)) {
    j["rel_tol"] = cfg.rel_tol;
    j["singularity_margin"] = cfg.singularity_margin;
  }
  j["paper_literal"] = cfg.paper_literal;
  if (!cfg.sweep.empty()) j["sweep"] = {{"variable", cfg.sweep}, {"values", cfg.values}};
  return j;
}

Cell opt(const std::optional<double>& v) { return v ? Cell{*v} : Cell{}; }

Table contour_table(const ContourGrid& grid, const std::vector<std::optional<Estimate>>& analytic) {
  Table t;
  t.columns = {"x", "y", "a", "b"};
  const bool with_analytic = !analytic.empty();
  if (with_analytic) {
    t.columns.push_back("analytic");
    t.columns.push_back("analytic_error");
  }
  const bool with_mc = !grid.cells.empty();
  if (with_mc) {
    t.columns.push_back("mc_mean");
    t.columns.push_back("mc_stderr");
  }
  const Lattice& l = grid.lattice;
  for (std::size_t j = 0; j < l.ny; ++j) {
    for (std::size_t i = 0; i < l.nx; ++i) {
      const std::size_t k = j * l.nx + i;
      const NormalizedLocation loc = to_location({l.x(i), l.y(j)});
      std::vector<Cell> row{l.x(i), l.y(j), loc.a, loc.b};
      if (with_analytic) {
        row.push_back(analytic[k] ? Cell{analytic[k]->value} : Cell{});
        row.push_back(analytic[k] ? Cell{analytic[k]->error} : Cell{});
      }
      if (with_mc) {
        row.push_back(grid.cells[k].mean);
        row.push_back(grid.cells[k].std_error);
      }
      t.rows.push_back(std::move(row));
    }
  }
  return t;
}

std::vector<std::optional<Estimate>> contour_analytic(const SystemParams& params, const Scheme& scheme,
                                                      const Lattice& lattice,
                                                      const std::shared_ptr<const FadingModel>& fading,
                                                      const QuadratureConfig& q, int workers) {
  const std::size_t n = lattice.nx * lattice.ny;
  std::vector<NormalizedLocation> locs(n);
  for (std::size_t j = 0; j < lattice.ny; ++j) {
    for (std::size_t i = 0; i < lattice.nx; ++i) locs[j * lattice.nx + i] = to_location({lattice.x(i), lattice.y(j)});
  }
  std::vector<std::optional<Estimate>> out(n);
  if (scheme.uses_timers()) {
    const ProposedModel model(params, fading, q);
    std::vector<double> z(n);
    for (std::size_t k = 0; k < n; ++k) z[k] = qualification_prob(params, *fading, locs[k]);
    // Cells with Z below the smallest normal double contribute nothing.
    std::vector<double> positive;
    for (double v : z) {
      if (v > 0.0) positive.push_back(v);
    }
    const std::vector<Estimate> values = model.pavg_grid(positive, scheme.timer_exponent());
    std::size_t next = 0;
    for (std::size_t k = 0; k < n; ++k) out[k] = z[k] > 0.0 ? values[next++] : Estimate{};
  } else {
    const OpportunisticModel model(params, fading, q);
    parallel_for(n, workers, [&](std::size_t k) { out[k] = model.pavg(locs[k]); });
  }
  return out;
}

}  // namespace fairrelay::experiments::detail
