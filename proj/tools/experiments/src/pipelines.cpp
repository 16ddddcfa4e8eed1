#include <cmath>
#include <stdexcept>

#include "fairrelay/parallel.hpp"
#include "internal.hpp"

namespace fairrelay::experiments {

using namespace detail;

namespace {

constexpr std::uint64_t kDefaultTrials = 1000000;
constexpr std::uint64_t kDefaultContourTrials = 20000;

struct ResolvedScheme {
  Scheme scheme;
  std::optional<double> beta_opt;  ///< set when beta was searched
};

/// The proposed scheme uses the minimax beta unless one is given.
ResolvedScheme resolve_scheme(const ExperimentConfig& cfg, const SystemParams& params,
                              const std::shared_ptr<const FadingModel>& fading, std::vector<std::string>& warnings) {
  if (cfg.scheme != "proposed" || cfg.beta) return {Scheme::parse(cfg.scheme, cfg.beta.value_or(0.0)), std::nullopt};
  const ProposedModel model(params, fading, cfg.quadrature());
  const BetaResult r = search_beta(model, cfg.workers);
  for (const auto& w : r.warnings) warnings.push_back("beta search: " + w);
  return {Scheme::proposed(r.beta_opt), r.beta_opt};
}

}  // namespace

RunOutput run_pavg(const ExperimentConfig& cfg, Engine default_engine) {
  cfg.validate();
  const Engine engine = cfg.engine.value_or(default_engine);
  const auto fading = make_rayleigh();
  const Scenario base = cfg.scenario(Scenario{});
  const bool sweeping = !cfg.sweep.empty();
  const std::vector<double> values = sweeping ? cfg.values : std::vector<double>{0.0};
  if (cfg.sweep == "beta" && cfg.scheme != "proposed") {
    throw std::invalid_argument("a beta sweep needs the proposed scheme");
  }
  if (cfg.sweep == "z_x" && cfg.scheme == "opportunistic") {
    throw std::invalid_argument("the opportunistic scheme is keyed by location, not z_x");
  }

  RunOutput out;
  std::vector<PavgRequest> requests;
  std::vector<Scenario> scenarios;
  std::vector<std::optional<double>> searched;
  for (double v : values) {
    Scenario s = base;
    if (cfg.sweep == "nbar") s.nbar = v;
    if (cfg.sweep == "gamma_db") s.gamma_sr_db = s.gamma_rd_db = v;
    const SystemParams params = s.params();
    params.validate();

    ResolvedScheme rs{};
    if (cfg.sweep == "beta") {
      rs.scheme = Scheme::proposed(v);
      if (!(v >= 0.0)) throw std::invalid_argument("beta must be nonnegative");
    } else {
      rs = resolve_scheme(cfg, params, fading, out.warnings);
    }

    PavgRequest r{params, rs.scheme, std::nullopt, 0.0};
    std::optional<double> z = cfg.z_x;
    if (cfg.sweep == "z_x") z = v;
    if (z) {
      if (!(*z > 0.0 && *z <= 1.0)) throw std::invalid_argument("z_x must lie in (0, 1]");
      r.z = *z;
      r.loc = location_with_qualification(params, *fading, *z);
    } else {
      NormalizedLocation loc{cfg.a, cfg.b};
      if (cfg.sweep == "a") loc.a = v;
      if (cfg.sweep == "b") loc.b = v;
      loc.validate();
      r.loc = loc;
      r.z = qualification_prob(params, *fading, loc);
    }
    if (!r.loc) {
      if (!rs.scheme.uses_timers()) throw std::invalid_argument("no location has the requested z_x");
      out.warnings.push_back("no location has z_x = " + format_number(r.z) + "; no simulated value");
    }
    if (r.scheme.uses_timers() && !(r.z > 0.0)) {
      throw std::invalid_argument("the probe location is unreachable (z_x underflows)");
    }
    requests.push_back(r);
    scenarios.push_back(s);
    searched.push_back(rs.beta_opt);
  }

  const std::uint64_t trials = cfg.trials.value_or(kDefaultTrials);
  std::vector<std::optional<Estimate>> analytic;
  std::vector<std::optional<McEstimate>> mc;
  if (uses_analytic(engine)) analytic = analytic_pavg(requests, fading, cfg.quadrature(), cfg.workers);
  if (uses_mc(engine)) mc = mc_pavg(requests, *fading, trials, cfg.seed, cfg.sim_options());

  Table t;
  if (sweeping) t.columns.push_back(cfg.sweep);
  for (const char* c : {"scheme", "beta", "a", "b", "z_x"}) t.columns.push_back(c);
  if (uses_analytic(engine)) t.columns.insert(t.columns.end(), {"analytic", "analytic_error"});
  if (uses_mc(engine)) t.columns.insert(t.columns.end(), {"mc_mean", "mc_stderr"});
  for (std::size_t i = 0; i < requests.size(); ++i) {
    const PavgRequest& r = requests[i];
    std::vector<Cell> row;
    if (sweeping) row.push_back(values[i]);
    row.push_back(r.scheme.name());
    row.push_back(r.scheme.kind == SchemeKind::proposed ? Cell{r.scheme.beta} : Cell{});
    row.push_back(r.loc ? Cell{r.loc->a} : Cell{});
    row.push_back(r.loc ? Cell{r.loc->b} : Cell{});
    row.push_back(r.z);
    if (uses_analytic(engine)) {
      row.push_back(analytic[i] ? Cell{analytic[i]->value} : Cell{});
      row.push_back(analytic[i] ? Cell{analytic[i]->error} : Cell{});
    }
    if (uses_mc(engine)) {
      row.push_back(mc[i] ? Cell{mc[i]->mean} : Cell{});
      row.push_back(mc[i] ? Cell{mc[i]->std_error} : Cell{});
    }
    t.rows.push_back(std::move(row));
  }
  out.files.push_back({"", std::move(t)});
  out.sidecar = base_sidecar("pavg", cfg, base, engine, trials);
  out.sidecar["scheme"] = cfg.scheme;
  if (cfg.beta) out.sidecar["beta"] = *cfg.beta;
  nlohmann::ordered_json derived = nlohmann::ordered_json::array();
  for (const auto& b : searched) {
    if (b) derived.push_back(*b);
  }
  if (!derived.empty()) out.sidecar["beta_opt"] = derived.size() == 1 ? derived[0] : derived;
  return out;
}

RunOutput run_outage(const ExperimentConfig& cfg, Engine default_engine) {
  cfg.validate();
  if (!cfg.sweep.empty() && cfg.sweep != "nbar" && cfg.sweep != "gamma_db") {
    throw std::invalid_argument("outage sweeps over nbar or gamma_db only");
  }
  const Engine engine = cfg.engine.value_or(default_engine);
  const auto fading = make_rayleigh();
  const Scenario base = cfg.scenario(Scenario{});
  const bool sweeping = !cfg.sweep.empty();
  const std::vector<double> values = sweeping ? cfg.values : std::vector<double>{0.0};
  // Outage never consults the selection step; the scheme only labels the run.
  const Scheme scheme = Scheme::parse(cfg.scheme, cfg.beta.value_or(1.0));

  std::vector<Scenario> scenarios;
  for (double v : values) {
    Scenario s = base;
    if (cfg.sweep == "nbar") s.nbar = v;
    if (cfg.sweep == "gamma_db") s.gamma_sr_db = s.gamma_rd_db = v;
    s.params().validate();
    scenarios.push_back(s);
  }
  const std::uint64_t trials = cfg.trials.value_or(kDefaultTrials);
  std::vector<Estimate> analytic(scenarios.size());
  std::vector<McEstimate> mc(scenarios.size());
  if (uses_analytic(engine)) {
    parallel_for(scenarios.size(), cfg.workers, [&](std::size_t i) {
      analytic[i] = analytic_outage(scenarios[i].params(), *fading, cfg.quadrature());
    });
  }
  if (uses_mc(engine)) {
    for (std::size_t i = 0; i < scenarios.size(); ++i) {
      mc[i] = estimate_batch(scenarios[i].params(), *fading, {scheme}, {}, trials, cfg.seed, cfg.sim_options()).outage;
    }
  }

  Table t;
  const bool nbar_swept = cfg.sweep == "nbar";
  if (sweeping) t.columns.push_back(cfg.sweep);
  if (!nbar_swept) t.columns.push_back("nbar");
  if (uses_analytic(engine)) t.columns.insert(t.columns.end(), {"analytic", "analytic_error"});
  if (uses_mc(engine)) t.columns.insert(t.columns.end(), {"mc_mean", "mc_stderr"});
  for (std::size_t i = 0; i < scenarios.size(); ++i) {
    std::vector<Cell> row;
    if (sweeping) row.push_back(values[i]);
    if (!nbar_swept) row.push_back(scenarios[i].nbar);
    if (uses_analytic(engine)) {
      row.push_back(analytic[i].value);
      row.push_back(analytic[i].error);
    }
    if (uses_mc(engine)) {
      row.push_back(mc[i].mean);
      row.push_back(mc[i].std_error);
    }
    t.rows.push_back(std::move(row));
  }
  RunOutput out;
  out.files.push_back({"", std::move(t)});
  out.sidecar = base_sidecar("outage", cfg, base, engine, trials);
  out.sidecar["scheme"] = scheme.name();
  return out;
}

RunOutput run_optimize_beta(const ExperimentConfig& cfg) {
  cfg.validate();
  const auto fading = make_rayleigh();
  const Scenario s = cfg.scenario(Scenario{});
  const SystemParams params = s.params();
  params.validate();
  const ProposedModel model(params, fading, cfg.quadrature());
  const BetaResult r = search_beta(model, cfg.workers);

  RunOutput out;
  out.warnings = r.warnings;
  Table t;
  t.comments.push_back("beta_opt=" + format_number(r.beta_opt));
  t.comments.push_back("max_unfairness=" + format_number(r.max_unfairness));
  t.columns = {"z_x", "power", "power_error"};
  for (const auto& p : r.profile_at_opt.values) t.rows.push_back({p.z_x, p.power.value, p.power.error});
  out.files.push_back({"", std::move(t)});

  Table scan;
  scan.columns = {"beta", "max_unfairness"};
  for (const auto& [b, v] : r.coarse_scan) scan.rows.push_back({b, v});
  out.files.push_back({"scan", std::move(scan)});

  out.sidecar = base_sidecar("optimize-beta", cfg, s, Engine::analytic, std::nullopt);
  out.sidecar["beta_opt"] = r.beta_opt;
  out.sidecar["max_unfairness"] = r.max_unfairness;
  out.sidecar["evaluations"] = r.evaluations;
  out.sidecar["degenerate"] = r.degenerate;
  out.sidecar["warnings"] = r.warnings;
  return out;
}

RunOutput run_contour(const ExperimentConfig& cfg) {
  cfg.validate();
  const Engine engine = cfg.engine.value_or(Engine::mc);
  const auto fading = make_rayleigh();
  const Scenario s = cfg.scenario(Scenario{});
  const SystemParams params = s.params();
  params.validate();
  RunOutput out;
  const ResolvedScheme rs = resolve_scheme(cfg, params, fading, out.warnings);
  const Lattice lattice{};
  const std::uint64_t trials = cfg.trials.value_or(kDefaultContourTrials);

  ContourGrid grid{rs.scheme, lattice, {}};
  if (uses_mc(engine)) grid = contour_grid(params, *fading, rs.scheme, lattice, trials, cfg.seed, cfg.sim_options());
  std::vector<std::optional<Estimate>> analytic;
  if (uses_analytic(engine)) {
    analytic = contour_analytic(params, rs.scheme, lattice, fading, cfg.quadrature(), cfg.workers);
  }
  out.files.push_back({"", contour_table(grid, analytic)});
  out.sidecar = base_sidecar("contour", cfg, s, engine, trials);
  out.sidecar["scheme"] = rs.scheme.name();
  if (rs.scheme.kind == SchemeKind::proposed) out.sidecar["beta"] = rs.scheme.beta;
  if (rs.beta_opt) out.sidecar["beta_opt"] = *rs.beta_opt;
  out.sidecar["lattice"] = {{"x_min", lattice.x_min}, {"x_max", lattice.x_max}, {"nx", lattice.nx},
                            {"y_min", lattice.y_min}, {"y_max", lattice.y_max}, {"ny", lattice.ny}};
  return out;
}

}  // namespace fairrelay::experiments
