// fairrelay: command-line front end for the analytic engine, the beta
// optimizer and the Monte Carlo simulator.

#include <cstdio>
#include <iostream>
#include <stdexcept>

#include <CLI11.hpp>

#include "fairrelay/experiments.hpp"

namespace fx = fairrelay::experiments;

namespace {

constexpr int kConfigError = 2;
constexpr int kNonConvergence = 3;

struct Flags {
  double gamma_sr_db = 0, gamma_rd_db = 0, theta_r_db = 0, theta_d_db = 0, gamma_db = 0, theta_db = 0;
  double alpha = 0, nbar = 0, beta = 0, z_x = 0, region_radius = 0;
  std::uint64_t trials = 0;
  std::string engine;
  std::string out;
};

template <class T>
std::optional<T> if_set(const CLI::Option* opt, const T& value) {
  return opt->count() > 0 ? std::optional<T>(value) : std::nullopt;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Fair relay selection over a Poisson relay field: analytic powers, beta optimization, Monte Carlo",
               "fairrelay"};
  app.set_config("--config", "", "INI file of flag values (keys as flag names, '-' or '_')");
  app.require_subcommand(1);

  fx::ExperimentConfig cfg;
  Flags f;
  // Each flag also answers to its underscore spelling so INI keys like
  // gamma_sr_db work.
  auto* o_gsr = app.add_option("--gamma-sr-db,--gamma_sr_db", f.gamma_sr_db, "Mean S-R SNR at unit distance (dB)");
  auto* o_grd = app.add_option("--gamma-rd-db,--gamma_rd_db", f.gamma_rd_db, "Mean R-D SNR at unit distance (dB)");
  auto* o_tr = app.add_option("--theta-r-db,--theta_r_db", f.theta_r_db, "Relay decoding threshold (dB)");
  auto* o_td = app.add_option("--theta-d-db,--theta_d_db", f.theta_d_db, "Destination decoding threshold (dB)");
  auto* o_g = app.add_option("--gamma-db,--gamma_db", f.gamma_db, "Sets both mean SNRs (dB)");
  auto* o_t = app.add_option("--theta-db,--theta_db", f.theta_db, "Sets both thresholds (dB)");
  auto* o_alpha = app.add_option("--alpha", f.alpha, "Path-loss exponent");
  auto* o_nbar = app.add_option("--nbar", f.nbar, "Relays per squared S-D distance");
  auto* o_beta = app.add_option("--beta", f.beta, "Fairness exponent (default: minimax optimum)");
  app.add_option("--scheme", cfg.scheme, "Selection scheme")
      ->check(CLI::IsMember({"proposed", "opportunistic", "random"}));
  auto* o_engine =
      app.add_option("--engine", f.engine, "analytic | mc | both")->check(CLI::IsMember({"analytic", "mc", "both"}));
  app.add_option("--sweep", cfg.sweep, "Sweep variable")
      ->check(CLI::IsMember({"z_x", "a", "b", "nbar", "beta", "gamma_db"}));
  app.add_option("--values", cfg.values, "Sweep values, or the curve family of a figure")->delimiter(',');
  auto* o_trials = app.add_option("--trials", f.trials, "Monte Carlo trials (per cell for contours)");
  app.add_option("--seed", cfg.seed, "RNG seed");
  auto* o_radius = app.add_option("--region-radius,--region_radius", f.region_radius, "Simulation disc radius");
  app.add_option("--out", f.out, "Output CSV path; a JSON sidecar goes to <out>.json");
  app.add_flag("--paper-literal,--paper_literal", cfg.paper_literal, "Literal G/H variant: S-side distance in both factors, theta_R as R-D threshold");
  app.add_option("--workers", cfg.workers, "Worker threads")->check(CLI::PositiveNumber);
  auto* o_z = app.add_option("--z-x,--z_x", f.z_x, "Probe qualification probability");
  app.add_option("--a", cfg.a, "Probe distance to the source");
  app.add_option("--b", cfg.b, "Probe distance to the destination");
  app.add_option("--rel-tol,--rel_tol", cfg.rel_tol, "Quadrature relative tolerance");
  app.add_option("--singularity-margin,--singularity_margin", cfg.singularity_margin, "Quadrature collar width");

  auto* analytic = app.add_subcommand("analytic", "Analytic evaluation")->fallthrough();
  analytic->require_subcommand(1);
  auto* analytic_pavg = analytic->add_subcommand("pavg", "Cooperation probability")->fallthrough();
  auto* analytic_outage = analytic->add_subcommand("outage", "Outage probability")->fallthrough();
  auto* optimize = app.add_subcommand("optimize-beta", "Minimax fairness exponent")->fallthrough();
  auto* simulate = app.add_subcommand("simulate", "Monte Carlo estimation")->fallthrough();
  simulate->require_subcommand(1);
  auto* simulate_coop = simulate->add_subcommand("coop", "Cooperation probability")->fallthrough();
  auto* simulate_outage = simulate->add_subcommand("outage", "Outage probability")->fallthrough();
  auto* contour = app.add_subcommand("contour", "Cooperation probability over a lattice")->fallthrough();
  static const char* kFigureHelp[5] = {
      "Power versus z_x for a family of beta values",
      "Power versus z_x at the optimal beta for several densities",
      "Opportunistic power versus a for several b",
      "Outage versus density for several SNRs",
      "Cooperation grids for all three schemes",
  };
  CLI::App* figs[5];
  for (int k = 0; k < 5; ++k) {
    figs[k] = app.add_subcommand("fig" + std::to_string(k + 3), kFigureHelp[k])->fallthrough();
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kConfigError;
  }

  try {
    cfg.gamma_sr_db = if_set(o_gsr, f.gamma_sr_db);
    cfg.gamma_rd_db = if_set(o_grd, f.gamma_rd_db);
    cfg.theta_r_db = if_set(o_tr, f.theta_r_db);
    cfg.theta_d_db = if_set(o_td, f.theta_d_db);
    if (o_g->count()) {
      if (o_gsr->count() || o_grd->count()) throw std::invalid_argument("--gamma-db conflicts with per-link SNRs");
      cfg.gamma_sr_db = cfg.gamma_rd_db = f.gamma_db;
    }
    if (o_t->count()) {
      if (o_tr->count() || o_td->count()) throw std::invalid_argument("--theta-db conflicts with per-link thresholds");
      cfg.theta_r_db = cfg.theta_d_db = f.theta_db;
    }
    cfg.alpha = if_set(o_alpha, f.alpha);
    cfg.nbar = if_set(o_nbar, f.nbar);
    cfg.beta = if_set(o_beta, f.beta);
    if (o_engine->count()) cfg.engine = fx::parse_engine(f.engine);
    cfg.trials = if_set(o_trials, f.trials);
    cfg.region_radius = if_set(o_radius, f.region_radius);
    cfg.z_x = if_set(o_z, f.z_x);

    fx::RunOutput out;
    if (analytic_pavg->parsed()) {
      out = fx::run_pavg(cfg, fx::Engine::analytic);
    } else if (analytic_outage->parsed()) {
      out = fx::run_outage(cfg, fx::Engine::analytic);
    } else if (optimize->parsed()) {
      out = fx::run_optimize_beta(cfg);
    } else if (simulate_coop->parsed()) {
      out = fx::run_pavg(cfg, fx::Engine::mc);
    } else if (simulate_outage->parsed()) {
      out = fx::run_outage(cfg, fx::Engine::mc);
    } else if (contour->parsed()) {
      out = fx::run_contour(cfg);
    } else if (figs[0]->parsed()) {
      out = fx::run_fig3(cfg);
    } else if (figs[1]->parsed()) {
      out = fx::run_fig4(cfg);
    } else if (figs[2]->parsed()) {
      out = fx::run_fig5(cfg);
    } else if (figs[3]->parsed()) {
      out = fx::run_fig6(cfg);
    } else {
      out = fx::run_fig7(cfg);
    }
    for (const auto& w : out.warnings) std::cerr << "warning: " << w << '\n';
    fx::write_outputs(out, f.out, std::cout);
    return 0;
  } catch (const fairrelay::NonConvergenceError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kNonConvergence;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kConfigError;
  } catch (const std::domain_error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kConfigError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
