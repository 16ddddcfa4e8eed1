#include <cmath>
#include <stdexcept>

#include "fairrelay/experiments.hpp"

namespace fairrelay::experiments {

double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
double linear_to_db(double linear) { return 10.0 * std::log10(linear); }

Engine parse_engine(const std::string& name) {
  if (name == "analytic") return Engine::analytic;
  if (name == "mc") return Engine::mc;
  if (name == "both") return Engine::both;
  throw std::invalid_argument("unknown engine '" + name + "'");
}

std::string engine_name(Engine engine) {
  switch (engine) {
    case Engine::analytic: return "analytic";
    case Engine::mc: return "mc";
    case Engine::both: return "both";
  }
  return "unknown";
}

SystemParams Scenario::params() const {
  SystemParams p;
  p.gamma_sr = db_to_linear(gamma_sr_db);
  p.gamma_rd = db_to_linear(gamma_rd_db);
  p.theta_r = db_to_linear(theta_r_db);
  p.theta_d = db_to_linear(theta_d_db);
  p.alpha = alpha;
  p.nbar = nbar;
  return p;
}

nlohmann::ordered_json Scenario::to_json() const {
  return {{"gamma_sr_db", gamma_sr_db}, {"gamma_rd_db", gamma_rd_db}, {"theta_r_db", theta_r_db},
          {"theta_d_db", theta_d_db},   {"alpha", alpha},             {"nbar", nbar}};
}

void ExperimentConfig::validate() const {
  auto finite = [](const std::optional<double>& v, const char* name) {
    if (v && !std::isfinite(*v)) throw std::invalid_argument(std::string(name) + " must be finite");
  };
  finite(gamma_sr_db, "gamma_sr_db");
  finite(gamma_rd_db, "gamma_rd_db");
  finite(theta_r_db, "theta_r_db");
  finite(theta_d_db, "theta_d_db");
  if (alpha && !(*alpha > 0.0)) throw std::invalid_argument("alpha must be positive");
  if (nbar && !(*nbar >= 0.0)) throw std::invalid_argument("nbar must be nonnegative");
  if (beta && !(*beta >= 0.0)) throw std::invalid_argument("beta must be nonnegative");
  Scheme::parse(scheme, beta.value_or(1.0));
  static const char* kSweeps[] = {"z_x", "a", "b", "nbar", "beta", "gamma_db"};
  if (!sweep.empty()) {
    bool known = false;
    for (const char* s : kSweeps) known = known || sweep == s;
    if (!known) throw std::invalid_argument("unknown sweep variable '" + sweep + "'");
    if (values.empty()) throw std::invalid_argument("a sweep needs --values");
  }
  if (trials && *trials == 0) throw std::invalid_argument("trials must be positive");
  if (workers < 1) throw std::invalid_argument("workers must be at least 1");
  if (z_x && !(*z_x > 0.0 && *z_x <= 1.0)) throw std::invalid_argument("z_x must lie in (0, 1]");
  if (region_radius && !(*region_radius > 0.0)) throw std::invalid_argument("region radius must be positive");
  quadrature().validate();
}

Scenario ExperimentConfig::scenario(const Scenario& defaults) const {
  Scenario s = defaults;
  s.gamma_sr_db = gamma_sr_db.value_or(s.gamma_sr_db);
  s.gamma_rd_db = gamma_rd_db.value_or(s.gamma_rd_db);
  s.theta_r_db = theta_r_db.value_or(s.theta_r_db);
  s.theta_d_db = theta_d_db.value_or(s.theta_d_db);
  s.alpha = alpha.value_or(s.alpha);
  s.nbar = nbar.value_or(s.nbar);
  return s;
}

QuadratureConfig ExperimentConfig::quadrature() const {
  QuadratureConfig q;
  q.rel_tol = rel_tol;
  q.singularity_margin = singularity_margin;
  q.paper_literal = paper_literal;
  return q;
}

SimOptions ExperimentConfig::sim_options() const {
  SimOptions o;
  if (region_radius) o.region = SimRegion{*region_radius};
  o.workers = workers;
  return o;
}

}  // namespace fairrelay::experiments
