#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "fairrelay/parallel.hpp"
#include "internal.hpp"

namespace fairrelay::experiments {

using namespace detail;

namespace {

constexpr std::uint64_t kFigureTrials = 1000000;
constexpr std::uint64_t kContourTrials = 20000;
constexpr double kSpreadThreshold = 0.1;

std::vector<double> family(const ExperimentConfig& cfg, std::vector<double> defaults) {
  return cfg.values.empty() ? defaults : cfg.values;
}

void require_no_sweep(const ExperimentConfig& cfg) {
  if (!cfg.sweep.empty()) throw std::invalid_argument("figure commands take --values, not --sweep");
}

}  // namespace

double flatness(const std::vector<double>& z, const std::vector<double>& values, double z_from) {
  double lo = INFINITY;
  double hi = -INFINITY;
  for (std::size_t i = 0; i < z.size(); ++i) {
    if (z[i] < z_from) continue;
    lo = std::min(lo, values[i]);
    hi = std::max(hi, values[i]);
  }
  return hi >= lo ? hi - lo : 0.0;
}

std::size_t cells_above(const ContourGrid& grid, double threshold) {
  return static_cast<std::size_t>(
      std::count_if(grid.cells.begin(), grid.cells.end(), [&](const McEstimate& e) { return e.mean > threshold; }));
}

std::vector<double> figure_z_grid(const SystemParams& params, const FadingModel& fading, std::size_t points) {
  const double peak = peak_qualification(params, fading).z;
  std::vector<double> z(points);
  for (std::size_t k = 0; k < points; ++k) z[k] = peak * static_cast<double>(k + 1) / static_cast<double>(points);
  return z;
}

RunOutput run_fig3(const ExperimentConfig& cfg) {
  cfg.validate();
  require_no_sweep(cfg);
  const Engine engine = cfg.engine.value_or(Engine::both);
  const auto fading = make_rayleigh();
  const Scenario s = cfg.scenario(Scenario{20.0, 20.0, 5.0, 5.0, 4.0, 2.0});
  const SystemParams params = s.params();
  params.validate();
  const std::vector<double> betas = family(cfg, {0.4, 0.8, 1.2, 1.6});
  for (double b : betas) {
    if (!(b >= 0.0)) throw std::invalid_argument("beta must be nonnegative");
  }
  const std::vector<double> z = figure_z_grid(params, *fading);
  const std::uint64_t trials = cfg.trials.value_or(kFigureTrials);

  std::vector<std::vector<Estimate>> analytic(betas.size());
  if (uses_analytic(engine)) {
    const ProposedModel model(params, fading, cfg.quadrature());
    parallel_for(betas.size(), cfg.workers, [&](std::size_t k) { analytic[k] = model.pavg_grid(z, betas[k]); });
  }
  std::vector<PavgRequest> requests;
  for (double b : betas) {
    for (double zx : z) requests.push_back({params, Scheme::proposed(b), location_with_qualification(params, *fading, zx), zx});
  }
  std::vector<std::optional<McEstimate>> mc;
  if (uses_mc(engine)) mc = mc_pavg(requests, *fading, trials, cfg.seed, cfg.sim_options());

  RunOutput out;
  Table t;
  t.columns = {"z_x", "beta"};
  if (uses_analytic(engine)) t.columns.insert(t.columns.end(), {"analytic", "analytic_error"});
  if (uses_mc(engine)) t.columns.insert(t.columns.end(), {"mc_mean", "mc_stderr"});
  nlohmann::ordered_json flat = nlohmann::ordered_json::object();
  for (std::size_t k = 0; k < betas.size(); ++k) {
    std::vector<double> curve;
    for (std::size_t i = 0; i < z.size(); ++i) {
      std::vector<Cell> row{z[i], betas[k]};
      if (uses_analytic(engine)) {
        row.push_back(analytic[k][i].value);
        row.push_back(analytic[k][i].error);
        curve.push_back(analytic[k][i].value);
      }
      if (uses_mc(engine)) {
        const auto& e = mc[k * z.size() + i];
        row.push_back(e ? Cell{e->mean} : Cell{});
        row.push_back(e ? Cell{e->std_error} : Cell{});
        if (!uses_analytic(engine)) curve.push_back(e ? e->mean : NAN);
      }
      t.rows.push_back(std::move(row));
    }
    flat[format_number(betas[k])] = flatness(z, curve);
  }
  out.files.push_back({"", std::move(t)});
  out.sidecar = base_sidecar("fig3", cfg, s, engine, trials);
  out.sidecar["betas"] = betas;
  out.sidecar["flatness_z_from_0.5"] = flat;
  return out;
}

RunOutput run_fig4(const ExperimentConfig& cfg) {
  cfg.validate();
  require_no_sweep(cfg);
  const Engine engine = cfg.engine.value_or(Engine::both);
  const auto fading = make_rayleigh();
  const Scenario base = cfg.scenario(Scenario{20.0, 20.0, 5.0, 5.0, 4.0, 2.0});
  const std::vector<double> nbars = family(cfg, {1.0, 2.0, 3.0, 4.0});
  const std::uint64_t trials = cfg.trials.value_or(kFigureTrials);

  std::vector<SystemParams> params(nbars.size());
  for (std::size_t k = 0; k < nbars.size(); ++k) {
    Scenario s = base;
    s.nbar = nbars[k];
    params[k] = s.params();
    params[k].validate();
  }
  const std::vector<double> z = figure_z_grid(params.front(), *fading);

  RunOutput out;
  std::vector<double> beta_opt(nbars.size());
  std::vector<std::vector<Estimate>> analytic(nbars.size());
  for (std::size_t k = 0; k < nbars.size(); ++k) {
    const ProposedModel model(params[k], fading, cfg.quadrature());
    const BetaResult r = search_beta(model, cfg.workers);
    beta_opt[k] = r.beta_opt;
    for (const auto& w : r.warnings) out.warnings.push_back("nbar " + format_number(nbars[k]) + ": " + w);
    if (uses_analytic(engine)) analytic[k] = model.pavg_grid(z, beta_opt[k]);
  }
  std::vector<PavgRequest> requests;
  for (std::size_t k = 0; k < nbars.size(); ++k) {
    for (double zx : z) {
      requests.push_back({params[k], Scheme::proposed(beta_opt[k]), location_with_qualification(params[k], *fading, zx), zx});
    }
  }
  std::vector<std::optional<McEstimate>> mc;
  if (uses_mc(engine)) mc = mc_pavg(requests, *fading, trials, cfg.seed, cfg.sim_options());

  Table t;
  for (std::size_t k = 0; k < nbars.size(); ++k) {
    t.comments.push_back("beta_opt nbar=" + format_number(nbars[k]) + ": " + format_number(beta_opt[k]));
  }
  t.columns = {"nbar", "beta_opt", "z_x"};
  if (uses_analytic(engine)) t.columns.insert(t.columns.end(), {"analytic", "analytic_error"});
  if (uses_mc(engine)) t.columns.insert(t.columns.end(), {"mc_mean", "mc_stderr"});
  for (std::size_t k = 0; k < nbars.size(); ++k) {
    for (std::size_t i = 0; i < z.size(); ++i) {
      std::vector<Cell> row{nbars[k], beta_opt[k], z[i]};
      if (uses_analytic(engine)) {
        row.push_back(analytic[k][i].value);
        row.push_back(analytic[k][i].error);
      }
      if (uses_mc(engine)) {
        const auto& e = mc[k * z.size() + i];
        row.push_back(e ? Cell{e->mean} : Cell{});
        row.push_back(e ? Cell{e->std_error} : Cell{});
      }
      t.rows.push_back(std::move(row));
    }
  }
  out.files.push_back({"", std::move(t)});
  out.sidecar = base_sidecar("fig4", cfg, base, engine, trials);
  nlohmann::ordered_json opt = nlohmann::ordered_json::object();
  for (std::size_t k = 0; k < nbars.size(); ++k) opt[format_number(nbars[k])] = beta_opt[k];
  out.sidecar["beta_opt"] = opt;
  return out;
}

RunOutput run_fig5(const ExperimentConfig& cfg) {
  cfg.validate();
  require_no_sweep(cfg);
  const Engine engine = cfg.engine.value_or(Engine::both);
  const auto fading = make_rayleigh();
  const Scenario s = cfg.scenario(Scenario{15.0, 15.0, 5.0, 5.0, 4.0, 2.0});
  const SystemParams params = s.params();
  params.validate();
  const std::vector<double> bs = family(cfg, {0.5, 0.75, 1.0, 1.25, 1.5});
  const std::uint64_t trials = cfg.trials.value_or(kFigureTrials);
  constexpr int kPoints = 21;

  std::vector<PavgRequest> requests;
  for (double b : bs) {
    if (!(b > 0.0)) throw std::invalid_argument("b must be positive");
    const double lo = std::max(std::abs(1.0 - b), 0.05);
    const double hi = 1.0 + b;
    for (int i = 0; i < kPoints; ++i) {
      const NormalizedLocation loc{lo + (hi - lo) * i / (kPoints - 1), b};
      requests.push_back({params, Scheme::opportunistic(), loc, qualification_prob(params, *fading, loc)});
    }
  }
  std::vector<std::optional<Estimate>> analytic;
  std::vector<std::optional<McEstimate>> mc;
  if (uses_analytic(engine)) analytic = analytic_pavg(requests, fading, cfg.quadrature(), cfg.workers);
  if (uses_mc(engine)) mc = mc_pavg(requests, *fading, trials, cfg.seed, cfg.sim_options());

  Table t;
  t.columns = {"b", "a"};
  if (uses_analytic(engine)) t.columns.insert(t.columns.end(), {"analytic", "analytic_error"});
  if (uses_mc(engine)) t.columns.insert(t.columns.end(), {"mc_mean", "mc_stderr"});
  for (std::size_t i = 0; i < requests.size(); ++i) {
    std::vector<Cell> row{requests[i].loc->b, requests[i].loc->a};
    if (uses_analytic(engine)) {
      row.push_back(analytic[i]->value);
      row.push_back(analytic[i]->error);
    }
    if (uses_mc(engine)) {
      row.push_back(mc[i]->mean);
      row.push_back(mc[i]->std_error);
    }
    t.rows.push_back(std::move(row));
  }
  RunOutput out;
  out.files.push_back({"", std::move(t)});
  out.sidecar = base_sidecar("fig5", cfg, s, engine, trials);
  out.sidecar["b_values"] = bs;
  return out;
}

RunOutput run_fig6(const ExperimentConfig& cfg) {
  cfg.validate();
  require_no_sweep(cfg);
  const Engine engine = cfg.engine.value_or(Engine::both);
  const auto fading = make_rayleigh();
  const Scenario base = cfg.scenario(Scenario{2.0, 2.0, 3.0, 3.0, 4.0, 1.0});
  const std::vector<double> gammas = family(cfg, {2.0, 7.0, 15.0});
  const std::vector<double> nbars = {0.5, 1.0, 1.5, 2.0, 2.5, 3.0, 3.5, 4.0, 4.5, 5.0};
  const double beta = cfg.beta.value_or(1.0);
  const std::uint64_t trials = cfg.trials.value_or(kFigureTrials);

  std::vector<Scenario> per_gamma(gammas.size(), base);
  for (std::size_t g = 0; g < gammas.size(); ++g) {
    per_gamma[g].gamma_sr_db = per_gamma[g].gamma_rd_db = gammas[g];
    per_gamma[g].params().validate();
  }
  std::vector<Estimate> gbar(gammas.size());
  if (uses_analytic(engine)) {
    parallel_for(gammas.size(), cfg.workers, [&](std::size_t g) {
      gbar[g] = mean_qualified_measure(per_gamma[g].params(), *fading, cfg.quadrature());
    });
  }

  Table t;
  t.columns = {"gamma_db", "nbar"};
  if (uses_analytic(engine)) t.columns.insert(t.columns.end(), {"analytic", "analytic_error"});
  if (uses_mc(engine)) t.columns.insert(t.columns.end(), {"mc_proposed", "mc_opportunistic", "mc_stderr"});
  for (std::size_t g = 0; g < gammas.size(); ++g) {
    for (double nbar : nbars) {
      Scenario s = per_gamma[g];
      s.nbar = nbar;
      const SystemParams params = s.params();
      std::vector<Cell> row{gammas[g], nbar};
      if (uses_analytic(engine)) {
        const double p = std::exp(-nbar * gbar[g].value);
        row.push_back(p);
        row.push_back(nbar * p * gbar[g].error);
      }
      if (uses_mc(engine)) {
        const SimOptions o = cfg.sim_options();
        const McEstimate prop = estimate_batch(params, *fading, {Scheme::proposed(beta)}, {}, trials, cfg.seed, o).outage;
        const McEstimate opp = estimate_batch(params, *fading, {Scheme::opportunistic()}, {}, trials, cfg.seed, o).outage;
        row.push_back(prop.mean);
        row.push_back(opp.mean);
        row.push_back(prop.std_error);
      }
      t.rows.push_back(std::move(row));
    }
  }
  RunOutput out;
  out.files.push_back({"", std::move(t)});
  out.sidecar = base_sidecar("fig6", cfg, base, engine, trials);
  out.sidecar["gamma_db_values"] = gammas;
  out.sidecar["nbar_values"] = nbars;
  out.sidecar["beta"] = beta;
  return out;
}

RunOutput run_fig7(const ExperimentConfig& cfg) {
  cfg.validate();
  require_no_sweep(cfg);
  const Engine engine = cfg.engine.value_or(Engine::both);
  const auto fading = make_rayleigh();
  const Scenario s = cfg.scenario(Scenario{15.0, 15.0, 3.0, 3.0, 4.0, 3.0});
  const SystemParams params = s.params();
  params.validate();
  const std::uint64_t trials = cfg.trials.value_or(kContourTrials);

  RunOutput out;
  double beta = 0.0;
  std::optional<double> beta_opt;
  if (cfg.beta) {
    beta = *cfg.beta;
  } else {
    const ProposedModel model(params, fading, cfg.quadrature());
    const BetaResult r = search_beta(model, cfg.workers);
    for (const auto& w : r.warnings) out.warnings.push_back("beta search: " + w);
    beta = r.beta_opt;
    beta_opt = beta;
  }
  const std::vector<Scheme> schemes{Scheme::opportunistic(), Scheme::random(), Scheme::proposed(beta)};
  const Lattice lattice{};
  std::vector<ContourGrid> grids;
  if (uses_mc(engine)) {
    grids = contour_grids(params, *fading, schemes, lattice, trials, cfg.seed, cfg.sim_options());
  } else {
    for (const auto& sc : schemes) grids.push_back({sc, lattice, {}});
  }

  nlohmann::ordered_json metrics = nlohmann::ordered_json::object();
  for (std::size_t k = 0; k < schemes.size(); ++k) {
    std::vector<std::optional<Estimate>> analytic;
    if (uses_analytic(engine)) {
      analytic = contour_analytic(params, schemes[k], lattice, fading, cfg.quadrature(), cfg.workers);
    }
    nlohmann::ordered_json m;
    if (uses_mc(engine)) {
      const auto& cells = grids[k].cells;
      const auto peak = std::max_element(cells.begin(), cells.end(),
                                         [](const McEstimate& x, const McEstimate& y) { return x.mean < y.mean; });
      const std::size_t at = static_cast<std::size_t>(peak - cells.begin());
      m["mc_cells_above_0.1"] = cells_above(grids[k], kSpreadThreshold);
      m["mc_peak"] = peak->mean;
      m["mc_peak_x"] = lattice.x(at % lattice.nx);
      m["mc_peak_y"] = lattice.y(at / lattice.nx);
    }
    if (uses_analytic(engine)) {
      m["analytic_cells_above_0.1"] =
          std::count_if(analytic.begin(), analytic.end(), [](const auto& e) { return e && e->value > kSpreadThreshold; });
    }
    metrics[schemes[k].name()] = m;
    out.files.push_back({schemes[k].name(), contour_table(grids[k], analytic)});
  }
  out.sidecar = base_sidecar("fig7", cfg, s, engine, trials);
  out.sidecar["beta"] = beta;
  if (beta_opt) out.sidecar["beta_opt"] = *beta_opt;
  out.sidecar["metrics"] = metrics;
  return out;
}

}  // namespace fairrelay::experiments
