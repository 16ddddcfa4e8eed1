#include "fairrelay/analytic.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/tools/roots.hpp>

namespace fairrelay {

using detail::LevelModel;
using detail::PlaneIntegrator;
using detail::PlaneResult;
using detail::RayPoint;

namespace {

// Span above the minimum level beyond which exp(-L) is dropped.
constexpr double kLevelSpan = 50.0;

Estimate floored(Estimate e) {
  e.error = std::max(e.error, 1e-14 * std::abs(e.value));
  return e;
}

Estimate require(const PlaneResult& r, const char* what) {
  if (!r.converged) throw NonConvergenceError(what, r.estimate.value, r.estimate.error);
  return r.estimate;
}

Estimate require(const QuadResult& r, const char* what) {
  if (!r.converged) throw NonConvergenceError(what, r.value, r.error);
  return r.estimate();
}

// Gauss-Legendre over [lo, hi], split so that an exponential factor of the
// given rate never varies by more than e^3 within one chunk.
template <class F>
double gauss_chunks(F&& f, double lo, double hi, double rate) {
  if (!(hi > lo)) return 0.0;
  const int n = std::max(1, static_cast<int>(std::ceil((hi - lo) * (1.0 + rate) / 3.0)));
  const double h = (hi - lo) / n;
  double sum = 0.0;
  for (int k = 0; k < n; ++k) {
    const double a = lo + k * h;
    const double b = (k + 1 == n) ? hi : a + h;
    sum += boost::math::quadrature::gauss<double, 20>::integrate(f, a, b);
  }
  return sum;
}

Estimate plane_exp_integral(const PlaneIntegrator& plane, const char* what) {
  return require(plane.integrate([](const RayPoint&, double level) { return std::exp(-level); }, {},
                                 plane.zeta_min() + kLevelSpan),
                 what);
}

void check_probability(double z, const char* what) {
  if (!(z > 0.0 && z <= 1.0)) throw std::domain_error(std::string(what) + " must lie in (0, 1]");
}

}  // namespace

void QuadratureConfig::validate() const {
  if (!(rel_tol > 0.0 && rel_tol < 1.0)) throw std::invalid_argument("rel_tol must lie in (0, 1)");
  if (!(abs_tol > 0.0)) throw std::invalid_argument("abs_tol must be positive");
  if (max_refinements < 1) throw std::invalid_argument("max_refinements must be positive");
  if (!(singularity_margin > 0.0 && singularity_margin < 0.1)) {
    throw std::invalid_argument("singularity_margin must lie in (0, 0.1)");
  }
}

LevelModel qualification_level(const SystemParams& params, const FadingModel& fading, bool paper_literal) {
  LevelModel level{&fading, params.alpha, params.source_coefficient(), 0.0, params.destination_coefficient()};
  if (paper_literal) {
    level.ca2 = level.cb;
    level.cb = 0.0;
  }
  return level;
}

// ---------------------------------------------------------------------------
// Level-set area profile

LevelSetProfile::LevelSetProfile(const PlaneIntegrator& plane, double rel_tol, double scale_hint) {
  zeta_min_ = plane.zeta_min();
  zeta_top_ = zeta_min_ + kLevelSpan + 10.0;

  std::vector<double> cuts{zeta_min_, zeta_top_};
  for (double step : {1.0 / 16.0, 0.25, 1.0, 2.0, 4.0, 8.0, 16.0, 32.0, 48.0}) cuts.push_back(zeta_min_ + step);
  for (double z : {plane.zeta_source(), plane.zeta_destination()}) {
    if (z > zeta_min_ + 1e-9 && z < zeta_top_) cuts.push_back(z);
  }
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

  std::map<double, Estimate> cache;
  auto area_at = [&](double zeta) {
    auto it = cache.find(zeta);
    if (it != cache.end()) return it->second;
    const Estimate e = zeta <= zeta_min_ ? Estimate{} : require(plane.area_below(zeta), "level-set area");
    cache.emplace(zeta, e);
    return e;
  };

  const double mass_tol = 1e-3 * rel_tol * scale_hint;
  std::vector<std::pair<double, double>> todo;
  for (std::size_t k = cuts.size() - 1; k > 0; --k) todo.emplace_back(cuts[k - 1], cuts[k]);
  while (!todo.empty()) {
    const auto [lo, hi] = todo.back();
    todo.pop_back();
    std::array<double, ChebyshevPanel::kNodes> values{};
    double node_error = 0.0;
    for (int j = 0; j < ChebyshevPanel::kNodes; ++j) {
      const Estimate e = area_at(ChebyshevPanel::node(lo, hi, j));
      values[j] = e.value;
      node_error = std::max(node_error, e.error);
    }
    Panel p{ChebyshevPanel(lo, hi, values), 0.0, 0.0, 0.0};
    const double tail = p.cheb.tail();
    const double weight = std::exp(-lo) * -std::expm1(-(hi - lo));
    const bool fine = tail <= 0.02 * rel_tol * p.cheb.max_abs() || tail * weight <= mass_tol;
    if (!fine && hi - lo > 1e-9 && panels_.size() + todo.size() < 600) {
      const double mid = 0.5 * (lo + hi);
      todo.emplace_back(mid, hi);
      todo.emplace_back(lo, mid);
      continue;
    }
    p.value_error = tail + node_error;
    p.mass = gauss_chunks([&](double z) { return p.cheb(z) * std::exp(-z); }, lo, hi, 1.0);
    p.mass_error = p.value_error * weight;
    panels_.push_back(p);
  }

  suffix_mass_.assign(panels_.size() + 1, 0.0);
  double mass_error = 0.0;
  for (std::size_t k = panels_.size(); k > 0; --k) {
    suffix_mass_[k - 1] = suffix_mass_[k] + panels_[k - 1].mass;
    mass_error += panels_[k - 1].mass_error;
  }
  // A grows polynomially; beyond the table its e^-z weighted mass is below
  // A(top) e^-top times a modest factor.
  top_tail_ = panels_.back().cheb(zeta_top_) * std::exp(-zeta_top_);
  gbar_ = floored({suffix_mass_[0] + top_tail_, mass_error + 2.0 * top_tail_});
}

const LevelSetProfile::Panel* LevelSetProfile::locate(double zeta) const {
  auto it = std::upper_bound(panels_.begin(), panels_.end(), zeta,
                             [](double z, const Panel& p) { return z < p.cheb.hi(); });
  if (it == panels_.end()) return nullptr;
  return &*it;
}

Estimate LevelSetProfile::area(double zeta) const {
  if (zeta <= zeta_min_) return {};
  const Panel* p = locate(zeta);
  if (p == nullptr) p = &panels_.back();
  return {p->cheb(std::min(zeta, zeta_top_)), p->value_error};
}

Estimate LevelSetProfile::g(double x, double beta) const {
  if (!(x >= 0.0) || !(beta >= 0.0)) throw std::domain_error("g needs x >= 0 and beta >= 0");
  if (x == 0.0) return {};
  if (beta == 0.0) {
    const double scale = std::min(1.0, x);
    return floored({scale * gbar_.value, scale * gbar_.error});
  }
  const double zs = -std::log(x) / beta;
  if (zs <= zeta_min_) return gbar_;

  double term1 = top_tail_;
  double term2 = 0.0;
  double error = 2.0 * top_tail_;
  const double rate = std::abs(beta - 1.0);
  for (std::size_t k = 0; k < panels_.size(); ++k) {
    const Panel& p = panels_[k];
    const double lo = p.cheb.lo();
    const double hi = p.cheb.hi();
    if (lo >= zs) {
      term1 += suffix_mass_[k];
      error += std::accumulate(panels_.begin() + static_cast<std::ptrdiff_t>(k), panels_.end(), 0.0,
                               [](double acc, const Panel& q) { return acc + q.mass_error; });
      break;
    }
    const double cut = std::min(hi, zs);
    const double damping = beta * (zs - cut);
    if (damping < 60.0) {
      term2 += gauss_chunks([&](double z) { return p.cheb(z) * std::exp(-z + beta * (z - zs)); }, lo, cut,
                            beta + rate);
      error += rate * p.mass_error * std::exp(-damping);
    }
    if (hi > zs) {
      term1 += gauss_chunks([&](double z) { return p.cheb(z) * std::exp(-z); }, zs, hi, 1.0);
      error += p.mass_error;
    }
  }
  if (zs > zeta_top_) {
    const double a_top = panels_.back().cheb(zeta_top_);
    error += rate * a_top * (zs / zeta_top_) * (zs - zeta_top_) * std::exp(-zeta_top_);
  }
  const double value = std::max(0.0, term1 + (1.0 - beta) * term2);
  return floored({value, error});
}

// ---------------------------------------------------------------------------
// Proposed scheme

ProposedModel::ProposedModel(const SystemParams& params, std::shared_ptr<const FadingModel> fading,
                             const QuadratureConfig& q)
    : params_(params), fading_(std::move(fading)), q_(q) {
  params_.validate();
  q_.validate();
  detail::PlaneOptions opt = q_.plane();
  opt.rel_tol *= 0.1;
  opt.abs_tol *= 0.1;
  plane_ = std::make_unique<PlaneIntegrator>(qualification_level(params_, *fading_, q_.paper_literal), opt);
  const Estimate hint = plane_exp_integral(*plane_, "qualified measure");
  profile_ = std::make_unique<LevelSetProfile>(*plane_, q_.rel_tol, std::max(hint.value, 1e-300));
}

double ProposedModel::max_qualification() const { return std::exp(-plane_->zeta_min()); }

Estimate ProposedModel::integrate_e(double lo, double hi, double beta, double rel) const {
  if (!(hi > lo)) return {};
  const double nbar = params_.nbar;
  if (nbar == 0.0) return {hi - lo, 0.0};

  auto weight = [&](double x) -> Estimate {
    const Estimate g = profile_->g(x, beta);
    const double e = std::exp(-nbar * g.value);
    return {e, nbar * e * g.error};
  };

  std::vector<double> cuts{lo, hi};
  if (beta > 0.0) {
    for (double z : {plane_->zeta_min(), plane_->zeta_source(), plane_->zeta_destination()}) {
      const double x = std::exp(-beta * z);
      if (x > lo && x < hi) cuts.push_back(x);
    }
  }
  std::sort(cuts.begin(), cuts.end());

  const QuadOptions opt{rel, 0.01 * q_.abs_tol, q_.max_refinements};
  Estimate total{};
  std::size_t first = 0;
  if (lo == 0.0 && beta > 1.0) {
    // G(x) ~ x^(1/beta) near 0; x = c u^beta makes the integrand smooth in u.
    const double c = cuts[1];
    auto mapped = [&](double u) -> Estimate {
      const double x = c * std::pow(u, beta);
      const double jac = c * beta * std::pow(u, beta - 1.0);
      const Estimate w = weight(x);
      return {w.value * jac, w.error * jac};
    };
    const Estimate head = require(integrate_adaptive(mapped, 0.0, 1.0, opt), "cooperation integral");
    total.value += head.value;
    total.error += head.error;
    first = 1;
  }
  if (first + 1 < cuts.size()) {
    const std::span<const double> rest(cuts.data() + first, cuts.size() - first);
    const Estimate body = require(integrate_adaptive(weight, rest, opt), "cooperation integral");
    total.value += body.value;
    total.error += body.error;
  }
  return total;
}

std::vector<Estimate> ProposedModel::pavg_grid(const std::vector<double>& z_values, double beta) const {
  if (!(beta >= 0.0)) throw std::domain_error("beta must be nonnegative");
  for (double z : z_values) check_probability(z, "z_x");

  std::vector<double> ys;
  ys.reserve(z_values.size());
  for (double z : z_values) ys.push_back(beta == 0.0 ? 1.0 : std::pow(z, beta));
  std::vector<double> sorted = ys;
  std::sort(sorted.begin(), sorted.end());
  sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());

  std::map<double, Estimate> cumulative;
  Estimate running{};
  double previous = 0.0;
  for (double y : sorted) {
    const Estimate piece = integrate_e(previous, y, beta, 0.1 * q_.rel_tol);
    running.value += piece.value;
    running.error += piece.error;
    cumulative[y] = running;
    previous = y;
  }

  std::vector<Estimate> out;
  out.reserve(z_values.size());
  for (std::size_t k = 0; k < z_values.size(); ++k) {
    const double z = z_values[k];
    const double y = ys[k];
    if (y <= 0.0) {
      out.push_back({z, 0.0});
      continue;
    }
    const Estimate e = cumulative.at(y);
    const double value = std::min(z, z * (e.value / y));
    out.push_back(floored({value, z * e.error / y}));
  }
  return out;
}

Estimate ProposedModel::pavg(double z_x, double beta) const { return pavg_grid({z_x}, beta).front(); }

PowerProfile ProposedModel::profile_at(const std::vector<double>& z_values, double beta) const {
  PowerProfile profile{beta == 0.0 ? Scheme::random() : Scheme::proposed(beta), {}};
  const std::vector<Estimate> values = pavg_grid(z_values, beta);
  for (std::size_t k = 0; k < z_values.size(); ++k) {
    profile.values.push_back({z_values[k], NormalizedLocation{}, values[k]});
  }
  return profile;
}

Estimate ProposedModel::cooperation_mass(double beta) const {
  if (!(beta >= 0.0)) throw std::domain_error("beta must be nonnegative");
  const double zmin = plane_->zeta_min();
  const double top = zmin + kLevelSpan;

  // Tabulate R(zeta) = pavg(e^-zeta) / e^-zeta on Chebyshev panels.
  std::vector<double> cuts{zmin, top};
  for (double step : {0.25, 0.5, 1.0, 2.0, 4.0, 8.0, 16.0, 32.0}) cuts.push_back(zmin + step);
  for (double z : {plane_->zeta_source(), plane_->zeta_destination()}) {
    if (z > zmin && z < top) cuts.push_back(z);
  }
  std::sort(cuts.begin(), cuts.end());
  std::vector<std::pair<double, double>> spans;
  for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
    const int pieces = std::max(1, static_cast<int>(std::ceil((cuts[k + 1] - cuts[k]) / 2.0)));
    const double h = (cuts[k + 1] - cuts[k]) / pieces;
    for (int j = 0; j < pieces; ++j) spans.emplace_back(cuts[k] + j * h, j + 1 == pieces ? cuts[k + 1] : cuts[k] + (j + 1) * h);
  }

  std::vector<ChebyshevPanel> table;
  double table_error = 0.0;
  for (int round = 0; round < 8; ++round) {
    std::vector<double> zs;
    for (const auto& [lo, hi] : spans) {
      for (int j = 0; j < ChebyshevPanel::kNodes; ++j) zs.push_back(std::exp(-ChebyshevPanel::node(lo, hi, j)));
    }
    const std::vector<Estimate> p = pavg_grid(zs, beta);
    table.clear();
    table_error = 0.0;
    std::vector<std::pair<double, double>> next;
    bool refined = false;
    for (std::size_t s = 0; s < spans.size(); ++s) {
      std::array<double, ChebyshevPanel::kNodes> values{};
      double node_error = 0.0;
      for (int j = 0; j < ChebyshevPanel::kNodes; ++j) {
        const std::size_t idx = s * ChebyshevPanel::kNodes + static_cast<std::size_t>(j);
        values[j] = p[idx].value / zs[idx];
        node_error = std::max(node_error, p[idx].error / zs[idx]);
      }
      ChebyshevPanel panel(spans[s].first, spans[s].second, values);
      const double tail = panel.tail();
      if (tail > 0.01 * q_.rel_tol * panel.max_abs() && round < 7 && spans[s].second - spans[s].first > 1e-6) {
        const double mid = 0.5 * (spans[s].first + spans[s].second);
        next.emplace_back(spans[s].first, mid);
        next.emplace_back(mid, spans[s].second);
        refined = true;
      } else {
        next.push_back(spans[s]);
      }
      // Weight by the qualified mass of the level band, which bounds its
      // share of the plane integral.
      const double band = profile_->area(spans[s].second).value * std::exp(-spans[s].first);
      table_error += (tail + node_error) * band;
      table.push_back(panel);
    }
    if (!refined) break;
    spans = std::move(next);
  }

  auto ratio = [&](double level) {
    const double z = std::clamp(level, zmin, top);
    auto it = std::upper_bound(table.begin(), table.end(), z,
                               [](double v, const ChebyshevPanel& p) { return v < p.hi(); });
    if (it == table.end()) --it;
    return (*it)(z);
  };
  std::vector<double> kinks{plane_->zeta_source(), plane_->zeta_destination()};
  const double nbar = params_.nbar;
  const Estimate mass = require(
      plane_->integrate([&](const RayPoint&, double level) { return nbar * std::exp(-level) * ratio(level); },
                        kinks, top),
      "cooperation mass");
  return floored({mass.value, mass.error + nbar * table_error});
}

// ---------------------------------------------------------------------------
// Opportunistic scheme

OpportunisticModel::OpportunisticModel(const SystemParams& params, std::shared_ptr<const FadingModel> fading,
                                       const QuadratureConfig& q)
    : params_(params), fading_(std::move(fading)), q_(q) {
  params_.validate();
  q_.validate();
  lower_ = q_.paper_literal ? params_.theta_r / params_.gamma_rd : params_.destination_coefficient();

  detail::PlaneOptions opt = q_.plane();
  opt.rel_tol *= 0.05;
  opt.abs_tol = 0.0;
  const LevelModel base = qualification_level(params_, *fading_, q_.paper_literal);

  std::map<double, Estimate> cache;
  auto log_h_at = [&](double eta) {
    auto it = cache.find(eta);
    if (it != cache.end()) return it->second;
    LevelModel level = base;
    const double y = lower_ * std::exp(eta);
    if (q_.paper_literal) {
      level.cb = y;
    } else {
      level.cb = std::max(level.cb, y);
    }
    const PlaneIntegrator plane(level, opt);
    const Estimate h = plane_exp_integral(plane, "competitor measure");
    const Estimate out{std::log(h.value), h.error / h.value};
    cache.emplace(eta, out);
    return out;
  };

  std::vector<std::pair<double, double>> todo;
  for (double hi = eta_top_; hi > 0.0; hi -= 2.0) todo.emplace_back(std::max(0.0, hi - 2.0), hi);
  std::vector<std::pair<ChebyshevPanel, double>> panels;
  while (!todo.empty()) {
    const auto [lo, hi] = todo.back();
    todo.pop_back();
    std::array<double, ChebyshevPanel::kNodes> values{};
    double node_error = 0.0;
    for (int j = 0; j < ChebyshevPanel::kNodes; ++j) {
      const Estimate e = log_h_at(ChebyshevPanel::node(lo, hi, j));
      values[j] = e.value;
      node_error = std::max(node_error, e.error);
    }
    ChebyshevPanel panel(lo, hi, values);
    const double tail = panel.tail();
    if (tail > 0.02 * q_.rel_tol && hi - lo > 1e-3 && panels.size() + todo.size() < 200) {
      const double mid = 0.5 * (lo + hi);
      todo.emplace_back(mid, hi);
      todo.emplace_back(lo, mid);
      continue;
    }
    panels.emplace_back(panel, tail + node_error);
  }
  for (auto& [panel, err] : panels) {
    log_h_.push_back(panel);
    log_h_error_.push_back(err);
  }
  const Estimate floor = log_h_at(0.0);
  h_floor_ = {std::exp(floor.value), std::exp(floor.value) * floor.error};
}

Estimate OpportunisticModel::h(double y) const {
  if (!(y >= 0.0)) throw std::domain_error("h needs a nonnegative argument");
  if (y <= lower_) return h_floor_;
  const double eta = std::log(y / lower_);
  if (eta <= eta_top_) {
    auto it = std::upper_bound(log_h_.begin(), log_h_.end(), eta,
                               [](double v, const ChebyshevPanel& p) { return v < p.hi(); });
    if (it == log_h_.end()) --it;
    const double value = std::exp((*it)(eta));
    return {value, value * log_h_error_[static_cast<std::size_t>(it - log_h_.begin())]};
  }
  // Far from the table the competitors live in a shrinking disc around D:
  // H ~ y^(-2/alpha).
  const ChebyshevPanel& last = log_h_.back();
  const double top = last(eta_top_);
  const double slope = top - last(eta_top_ - 1.0);
  const double decay = -2.0 / params_.alpha;
  const double value = std::exp(top + decay * (eta - eta_top_));
  const double mismatch = std::abs(slope - decay) * (eta - eta_top_) + log_h_error_.back();
  return {value, value * std::min(1.0, mismatch)};
}

double OpportunisticModel::survival_tail_end(double w0) const {
  // Smallest x with (1 - F(x)) <= 1e-12 (1 - F(w0)).
  const double target = fading_->neg_log_survival(w0) + 27.7;
  auto g = [&](double x) { return fading_->neg_log_survival(x) - target; };
  double lo = w0;
  double hi = w0 + 1.0;
  while (g(hi) < 0.0) {
    lo = hi;
    hi = w0 + 2.0 * (hi - w0);
  }
  boost::uintmax_t iters = 200;
  const auto r = boost::math::tools::toms748_solve(g, lo, hi, boost::math::tools::eps_tolerance<double>(40), iters);
  return r.second;
}

Estimate OpportunisticModel::pavg(const NormalizedLocation& loc) const {
  loc.validate();
  const double s_r = fading_->survival(params_.source_coefficient() * detail::pow_alpha(loc.a, params_.alpha));
  const double b_alpha = detail::pow_alpha(loc.b, params_.alpha);
  const double w0 = lower_ * b_alpha;
  const double s0 = fading_->survival(w0);
  if (s_r == 0.0 || s0 == 0.0) return {};
  const double nbar = params_.nbar;
  if (nbar == 0.0) return {s_r * s0, 0.0};

  const double w_up = survival_tail_end(w0);
  auto integrand = [&](double w) -> Estimate {
    const Estimate h_val = h(w / b_alpha);
    const double e = std::exp(-nbar * h_val.value);
    const double f = fading_->pdf(w);
    return {-std::expm1(-nbar * h_val.value) * f, nbar * e * h_val.error * f};
  };
  const QuadOptions opt{0.1 * q_.rel_tol, 0.01 * q_.abs_tol, q_.max_refinements};
  const Estimate lost = require(integrate_adaptive(integrand, w0, w_up, opt), "opportunistic integral");
  const double value = s_r * std::max(0.0, s0 - lost.value);
  return floored({value, s_r * (lost.error + fading_->survival(w_up))});
}

PowerProfile OpportunisticModel::profile_at(const std::vector<NormalizedLocation>& locs) const {
  PowerProfile profile{Scheme::opportunistic(), {}};
  for (const auto& loc : locs) {
    const SystemParams& p = params_;
    const double z = fading_->survival(p.source_coefficient() * detail::pow_alpha(loc.a, p.alpha)) *
                     fading_->survival(p.destination_coefficient() * detail::pow_alpha(loc.b, p.alpha));
    profile.values.push_back({z, loc, pavg(loc)});
  }
  return profile;
}

Estimate OpportunisticModel::cooperation_mass() const {
  detail::PlaneOptions opt = q_.plane();
  const PlaneIntegrator plane(qualification_level(params_, *fading_, q_.paper_literal), opt);
  const double nbar = params_.nbar;
  double worst_error = 0.0;
  const Estimate mass = require(
      plane.integrate(
          [&](const RayPoint& p, double) {
            const Estimate e = pavg(NormalizedLocation{p.a, p.b});
            worst_error = std::max(worst_error, e.error);
            return nbar * e.value;
          },
          {}, plane.zeta_min() + kLevelSpan),
      "opportunistic cooperation mass");
  const Estimate gbar = plane_exp_integral(plane, "qualified measure");
  // Pointwise errors are bounded relative to the local qualification, so the
  // largest one times the plane measure bounds their integral.
  return floored({mass.value, mass.error + nbar * worst_error * std::max(1.0, gbar.value)});
}

// ---------------------------------------------------------------------------
// Direct integrals and free functions

Estimate g_integral(const SystemParams& params, const FadingModel& fading, double beta, double x,
                    const QuadratureConfig& q) {
  params.validate();
  q.validate();
  if (!(x >= 0.0) || !(beta >= 0.0)) throw std::domain_error("g_integral needs x >= 0 and beta >= 0");
  if (x == 0.0) return {};
  const PlaneIntegrator plane(qualification_level(params, fading, q.paper_literal), q.plane());
  const double zmin = plane.zeta_min();
  if (beta == 0.0 || x >= 1.0) {
    const double scale = std::min(1.0, x);
    const Estimate g = plane_exp_integral(plane, "G integral");
    return floored({scale * g.value, scale * g.error});
  }
  const double zs = -std::log(x) / beta;
  if (zs <= zmin) return floored(plane_exp_integral(plane, "G integral"));
  auto integrand = [&](const RayPoint&, double level) {
    return level < zs ? std::exp(-level + beta * (level - zs)) : std::exp(-level);
  };
  return floored(require(plane.integrate(integrand, {zs}, zs + kLevelSpan), "G integral"));
}

Estimate mean_qualified_measure(const SystemParams& params, const FadingModel& fading,
                                const QuadratureConfig& q) {
  params.validate();
  q.validate();
  const PlaneIntegrator plane(qualification_level(params, fading, q.paper_literal), q.plane());
  return floored(plane_exp_integral(plane, "qualified measure"));
}

Estimate h_integral(const SystemParams& params, const FadingModel& fading, double x, const QuadratureConfig& q) {
  params.validate();
  q.validate();
  if (!(x >= 0.0)) throw std::domain_error("h_integral needs x >= 0");
  if (std::isinf(x)) return {};
  LevelModel level = qualification_level(params, fading, q.paper_literal);
  if (q.paper_literal) {
    level.cb = x;
  } else {
    level.cb = std::max(level.cb, x);
  }
  const PlaneIntegrator plane(level, q.plane());
  return floored(plane_exp_integral(plane, "H integral"));
}

Estimate pavg_proposed(const SystemParams& params, std::shared_ptr<const FadingModel> fading, double z_x,
                       double beta, const QuadratureConfig& q) {
  check_probability(z_x, "z_x");
  if (!(beta >= 0.0)) throw std::domain_error("beta must be nonnegative");
  return ProposedModel(params, std::move(fading), q).pavg(z_x, beta);
}

Estimate pavg_opportunistic(const SystemParams& params, std::shared_ptr<const FadingModel> fading,
                            const NormalizedLocation& loc, const QuadratureConfig& q) {
  loc.validate();
  return OpportunisticModel(params, std::move(fading), q).pavg(loc);
}

Estimate analytic_outage(const SystemParams& params, const FadingModel& fading, const QuadratureConfig& q) {
  const Estimate gbar = mean_qualified_measure(params, fading, q);
  const double p = std::exp(-params.nbar * gbar.value);
  return floored({p, params.nbar * p * gbar.error});
}

double timer_order_prob(double z1, double z2) {
  if (!(z2 > 0.0 && z1 <= 1.0 && z2 <= z1)) {
    throw std::domain_error("timer_order_prob needs 0 < z2 <= z1 <= 1");
  }
  return 1.0 - z2 / (2.0 * z1);
}

std::pair<double, double> two_relay_pavg(double z1, double z2, double beta) {
  if (!(z1 > 0.0 && z2 > 0.0 && z1 <= 1.0 && z2 <= 1.0)) {
    throw std::domain_error("two_relay_pavg needs qualification probabilities in (0, 1]");
  }
  if (!(beta >= 0.0)) throw std::domain_error("beta must be nonnegative");
  if (z1 < z2) {
    const auto [p2, p1] = two_relay_pavg(z2, z1, beta);
    return {p1, p2};
  }
  const double ratio = std::pow(z2 / z1, beta);
  return {z1 * (1.0 - z2 + 0.5 * z2 * ratio), z2 * (1.0 - 0.5 * z1 * ratio)};
}

}  // namespace fairrelay
