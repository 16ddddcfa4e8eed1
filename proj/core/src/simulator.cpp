#include "fairrelay/simulator.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <stdexcept>
#include <thread>

#include "fairrelay/detail/plane.hpp"

namespace fairrelay {

namespace {

constexpr double kMidX = 0.5;
constexpr double kTruncationLevel = 20.723265836946411;  // -ln(1e-9)
constexpr std::uint64_t kBlock = 1024;

using detail::pow_alpha;

/// Sums integer counters over trials on up to `workers` threads. Integer
/// addition is exact and commutative, so the totals do not depend on how
/// blocks were scheduled.
template <class TrialFn>
std::vector<std::uint64_t> run_trials(std::uint64_t trials, int workers, std::size_t counters, TrialFn&& fn) {
  const std::uint64_t blocks = (trials + kBlock - 1) / kBlock;
  const std::size_t threads =
      static_cast<std::size_t>(std::clamp<std::uint64_t>(blocks, 1, static_cast<std::uint64_t>(std::max(1, workers))));
  std::vector<std::vector<std::uint64_t>> partial(threads, std::vector<std::uint64_t>(counters, 0));
  std::atomic<std::uint64_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto work = [&](std::size_t w) {
    try {
      for (;;) {
        const std::uint64_t b = next.fetch_add(1);
        if (b >= blocks) return;
        const std::uint64_t end = std::min(trials, (b + 1) * kBlock);
        for (std::uint64_t t = b * kBlock; t < end; ++t) fn(partial[w], t);
      }
    } catch (...) {
      std::lock_guard<std::mutex> lock(failure_mutex);
      if (!failure) failure = std::current_exception();
      next.store(blocks);
    }
  };
  std::vector<std::thread> pool;
  for (std::size_t w = 1; w < threads; ++w) pool.emplace_back(work, w);
  work(0);
  for (auto& th : pool) th.join();
  if (failure) std::rethrow_exception(failure);
  std::vector<std::uint64_t> total(counters, 0);
  for (const auto& p : partial) {
    for (std::size_t i = 0; i < counters; ++i) total[i] += p[i];
  }
  return total;
}

double boundary_level(const SystemParams& params, const FadingModel& fading, double radius) {
  double lowest = std::numeric_limits<double>::infinity();
  constexpr int kAngles = 720;
  for (int k = 0; k <= kAngles; ++k) {
    const double phi = M_PI * k / kAngles;
    const double x = kMidX + radius * std::cos(phi);
    const double y = radius * std::sin(phi);
    const double a = std::hypot(x, y);
    const double b = std::hypot(x - 1.0, y);
    const double level = fading.neg_log_survival(params.source_coefficient() * pow_alpha(a, params.alpha)) +
                         fading.neg_log_survival(params.destination_coefficient() * pow_alpha(b, params.alpha));
    lowest = std::min(lowest, level);
  }
  return lowest;
}

/// What the selection step needs from one qualified field relay.
struct QualifiedRelay {
  double log_z = 0.0;
  double d = 0.0;
  double gamma_rd = 0.0;
};

struct LinkDraw {
  double omega_sr = 0.0;
  double omega_rd = std::numeric_limits<double>::quiet_NaN();
  bool qualified = false;
  double d = 0.0;
};

struct Coefficients {
  double cr;
  double cd;
  double alpha;
  double gamma_rd;

  explicit Coefficients(const SystemParams& p)
      : cr(p.source_coefficient()), cd(p.destination_coefficient()), alpha(p.alpha), gamma_rd(p.gamma_rd) {}
};

double log_qualification(const Coefficients& c, const FadingModel& fading, double pa, double pb) {
  return -(fading.neg_log_survival(c.cr * pa) + fading.neg_log_survival(c.cd * pb));
}

/// Lazy per-relay draws in the fixed order S-R, R-D, D.
LinkDraw draw_links(const Coefficients& c, const FadingModel& fading, double pa, double pb, Rng& rng) {
  LinkDraw out;
  out.omega_sr = fading.sample(rng);
  if (out.omega_sr < c.cr * pa) return out;
  out.omega_rd = fading.sample(rng);
  if (out.omega_rd < c.cd * pb) return out;
  out.qualified = true;
  out.d = rng.uniform();
  return out;
}

/// Visits the points of a Poisson field in order of increasing distance from
/// the midpoint: the enclosed area grows by Exp(1) / nbar per point. A larger
/// disc therefore reproduces the smaller disc's points draw for draw.
template <class Visit>
void for_each_point(double nbar, const SimRegion& region, Rng& rng, Visit&& visit) {
  if (!(nbar > 0.0)) return;
  const double total = region.area();
  double area = 0.0;
  for (;;) {
    area += rng.exponential() / nbar;
    if (area > total) return;
    const double r = std::sqrt(area / M_PI);
    const double phi = 2.0 * M_PI * rng.uniform();
    const double x = kMidX + r * std::cos(phi);
    const double y = r * std::sin(phi);
    if (!visit(NormalizedLocation{std::hypot(x, y), std::hypot(x - 1.0, y)})) return;
  }
}

/// Field of one trial reduced to its qualified relays. Returns false as soon
/// as a relay qualifies when `stop_at_first` is set.
bool draw_field(const SystemParams& params, const Coefficients& c, const FadingModel& fading,
                const SimRegion& region, std::uint64_t seed, std::uint64_t trial, bool stop_at_first,
                std::vector<QualifiedRelay>& out) {
  out.clear();
  Rng rng = Rng::for_substream(seed, trial, 0);
  bool stopped = false;
  for_each_point(params.nbar, region, rng, [&](const NormalizedLocation& loc) {
    const double pa = pow_alpha(loc.a, c.alpha);
    const double pb = pow_alpha(loc.b, c.alpha);
    const LinkDraw draw = draw_links(c, fading, pa, pb, rng);
    if (!draw.qualified) return true;
    if (stop_at_first) {
      stopped = true;
      return false;
    }
    out.push_back({log_qualification(c, fading, pa, pb), draw.d, c.gamma_rd / pb * draw.omega_rd});
    return true;
  });
  if (stopped) return false;
  return out.empty();
}

double log_timer(double d, double log_z, double beta) {
  return beta == 0.0 ? std::log(d) : std::log(d) + beta * log_z;
}

struct PreparedProbe {
  double pa;
  double pb;
  double log_z;
};

}  // namespace

McEstimate McEstimate::from_counts(std::uint64_t successes, std::uint64_t trials, std::uint64_t seed) {
  McEstimate e;
  e.trials = trials;
  e.seed = seed;
  e.successes = successes;
  if (trials == 0) return e;
  const double n = static_cast<double>(trials);
  e.mean = static_cast<double>(successes) / n;
  e.std_error = trials > 1 ? std::sqrt(e.mean * (1.0 - e.mean) / (n - 1.0)) : 0.0;
  return e;
}

double SimRegion::r_min(const SystemParams& params, const FadingModel& fading) {
  double hi = 1.0;
  while (boundary_level(params, fading, hi) < kTruncationLevel) {
    hi *= 2.0;
    if (hi > 1e6) throw std::invalid_argument("relay region radius diverges for these parameters");
  }
  double lo = 0.5;
  if (boundary_level(params, fading, lo) >= kTruncationLevel) return lo;
  for (int it = 0; it < 60 && hi - lo > 1e-9 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    (boundary_level(params, fading, mid) >= kTruncationLevel ? hi : lo) = mid;
  }
  return hi;
}

SimRegion SimRegion::for_params(const SystemParams& params, const FadingModel& fading) {
  return {std::max(3.0, r_min(params, fading))};
}

void SimRegion::validate(const SystemParams& params, const FadingModel& fading) const {
  if (!(radius > 0.0 && std::isfinite(radius))) throw std::invalid_argument("region radius must be positive");
  const double need = r_min(params, fading);
  if (radius < need * (1.0 - 1e-9)) {
    throw std::invalid_argument("region radius " + std::to_string(radius) + " is below the truncation radius " +
                                std::to_string(need));
  }
}

double SimRegion::area() const { return M_PI * radius * radius; }

std::vector<NormalizedLocation> sample_field(const SystemParams& params, const SimRegion& region, Rng& rng) {
  std::vector<NormalizedLocation> out;
  for_each_point(params.nbar, region, rng, [&](const NormalizedLocation& loc) {
    out.push_back(loc);
    return true;
  });
  return out;
}

std::optional<std::size_t> select_relay(const Scheme& scheme, const SystemParams& params,
                                        const std::vector<RelayRealization>& relays) {
  std::optional<std::size_t> best;
  double best_key = 0.0;
  for (std::size_t i = 0; i < relays.size(); ++i) {
    const RelayRealization& r = relays[i];
    if (!r.qualified) continue;
    double key;
    if (scheme.uses_timers()) {
      if (!r.timer) throw std::logic_error("qualified relay without a timer");
      key = *r.timer;
    } else {
      key = -link_snr(params.gamma_rd, r.loc.b, params.alpha, r.omega_rd);
    }
    if (!best || key < best_key) {
      best = i;
      best_key = key;
    }
  }
  return best;
}

SelectionOutcome realize_and_select(const SystemParams& params, const FadingModel& fading, const Scheme& scheme,
                                    const SimRegion& region, const std::optional<ProbeSpec>& probe,
                                    std::uint64_t seed, std::uint64_t trial) {
  const Coefficients c(params);
  SelectionOutcome out;
  auto record = [&](const NormalizedLocation& loc, Rng& rng) {
    const double pa = pow_alpha(loc.a, c.alpha);
    const double pb = pow_alpha(loc.b, c.alpha);
    const LinkDraw draw = draw_links(c, fading, pa, pb, rng);
    RelayRealization r{loc, draw.omega_sr, draw.omega_rd, draw.qualified, std::nullopt};
    if (draw.qualified && scheme.uses_timers()) {
      r.timer = std::exp(log_timer(draw.d, log_qualification(c, fading, pa, pb), scheme.timer_exponent()));
    }
    out.relays.push_back(r);
    return draw;
  };

  Rng field_rng = Rng::for_substream(seed, trial, 0);
  for_each_point(params.nbar, region, field_rng, [&](const NormalizedLocation& loc) {
    record(loc, field_rng);
    return true;
  });
  if (probe) {
    probe->loc.validate();
    Rng probe_rng = Rng::for_substream(seed, trial, 1);
    // The probe always consumes all three draws.
    const double pa = pow_alpha(probe->loc.a, c.alpha);
    const double pb = pow_alpha(probe->loc.b, c.alpha);
    const double omega_sr = fading.sample(probe_rng);
    const double omega_rd = fading.sample(probe_rng);
    const double d = probe_rng.uniform();
    RelayRealization r{probe->loc, omega_sr, omega_rd, omega_sr >= c.cr * pa && omega_rd >= c.cd * pb, std::nullopt};
    if (r.qualified && scheme.uses_timers()) {
      r.timer = std::exp(log_timer(d, log_qualification(c, fading, pa, pb), scheme.timer_exponent()));
    }
    out.relays.push_back(r);
    out.probe_present = true;
    out.probe_qualified = r.qualified;
  }
  for (const auto& r : out.relays) out.qualified_count += r.qualified ? 1 : 0;
  out.outage = out.qualified_count == 0;
  out.selected = select_relay(scheme, params, out.relays);
  out.probe_selected = out.probe_present && out.selected && *out.selected + 1 == out.relays.size();
  return out;
}

std::vector<bool> outage_sequence(const SystemParams& params, const FadingModel& fading, const Scheme& scheme,
                                  std::uint64_t trials, std::uint64_t seed, const SimOptions& options) {
  const SimRegion region = options.region.value_or(SimRegion::for_params(params, fading));
  std::vector<bool> out(trials);
  for (std::uint64_t t = 0; t < trials; ++t) {
    out[t] = realize_and_select(params, fading, scheme, region, std::nullopt, seed, t).outage;
  }
  return out;
}

BatchResult estimate_batch(const SystemParams& params, const FadingModel& fading, const std::vector<Scheme>& schemes,
                           const std::vector<ProbeSpec>& probes, std::uint64_t trials, std::uint64_t seed,
                           const SimOptions& options) {
  params.validate();
  if (trials == 0) throw std::invalid_argument("trials must be positive");
  const SimRegion region = options.region.value_or(SimRegion::for_params(params, fading));
  region.validate(params, fading);
  const Coefficients c(params);

  std::vector<PreparedProbe> prepared;
  prepared.reserve(probes.size());
  for (const auto& p : probes) {
    p.loc.validate();
    const double pa = pow_alpha(p.loc.a, c.alpha);
    const double pb = pow_alpha(p.loc.b, c.alpha);
    prepared.push_back({pa, pb, log_qualification(c, fading, pa, pb)});
  }
  const std::size_t ns = schemes.size();
  const std::size_t np = probes.size();
  // Counter layout: [outage, (scheme, probe) row-major].
  const std::size_t counters = 1 + ns * np;

  auto trial_fn = [&](std::vector<std::uint64_t>& acc, std::uint64_t t) {
    thread_local std::vector<QualifiedRelay> field;
    thread_local std::vector<double> best;
    // Without probes nothing after the first qualified relay matters.
    const bool outage = draw_field(params, c, fading, region, seed, t, np == 0, field);
    acc[0] += outage ? 1 : 0;
    best.assign(ns, std::numeric_limits<double>::infinity());
    for (std::size_t s = 0; s < ns; ++s) {
      const Scheme& sc = schemes[s];
      for (const auto& r : field) {
        const double key = sc.uses_timers() ? log_timer(r.d, r.log_z, sc.timer_exponent()) : -r.gamma_rd;
        best[s] = std::min(best[s], key);
      }
    }
    for (std::size_t p = 0; p < np; ++p) {
      Rng rng = Rng::for_substream(seed, t, 1 + p);
      const PreparedProbe& pp = prepared[p];
      const double omega_sr = fading.sample(rng);
      const double omega_rd = fading.sample(rng);
      const double d = rng.uniform();
      if (omega_sr < c.cr * pp.pa || omega_rd < c.cd * pp.pb) continue;
      for (std::size_t s = 0; s < ns; ++s) {
        const Scheme& sc = schemes[s];
        const double key =
            sc.uses_timers() ? log_timer(d, pp.log_z, sc.timer_exponent()) : -c.gamma_rd / pp.pb * omega_rd;
        if (key < best[s]) ++acc[1 + s * np + p];
      }
    }
  };
  const std::vector<std::uint64_t> counts = run_trials(trials, options.workers, counters, trial_fn);

  BatchResult out;
  out.outage = McEstimate::from_counts(counts[0], trials, seed);
  out.cooperation.assign(ns, std::vector<McEstimate>(np));
  for (std::size_t s = 0; s < ns; ++s) {
    for (std::size_t p = 0; p < np; ++p) {
      out.cooperation[s][p] = McEstimate::from_counts(counts[1 + s * np + p], trials, seed);
    }
  }
  return out;
}

McEstimate estimate_cooperation(const SystemParams& params, const FadingModel& fading, const Scheme& scheme,
                                const ProbeSpec& probe, std::uint64_t trials, std::uint64_t seed,
                                const SimOptions& options) {
  return estimate_batch(params, fading, {scheme}, {probe}, trials, seed, options).cooperation[0][0];
}

McEstimate estimate_outage(const SystemParams& params, const FadingModel& fading, std::uint64_t trials,
                           std::uint64_t seed, const SimOptions& options) {
  params.validate();
  if (trials == 0) throw std::invalid_argument("trials must be positive");
  const SimRegion region = options.region.value_or(SimRegion::for_params(params, fading));
  region.validate(params, fading);
  const Coefficients c(params);
  // Stopping at the first qualified relay reads a prefix of the same draws,
  // so the indicator equals the full trial's.
  auto trial_fn = [&](std::vector<std::uint64_t>& acc, std::uint64_t t) {
    thread_local std::vector<QualifiedRelay> field;
    acc[0] += draw_field(params, c, fading, region, seed, t, true, field) ? 1 : 0;
  };
  return McEstimate::from_counts(run_trials(trials, options.workers, 1, trial_fn)[0], trials, seed);
}

double Lattice::x(std::size_t i) const {
  return nx == 1 ? x_min : x_min + (x_max - x_min) * static_cast<double>(i) / static_cast<double>(nx - 1);
}

double Lattice::y(std::size_t j) const {
  return ny == 1 ? y_min : y_min + (y_max - y_min) * static_cast<double>(j) / static_cast<double>(ny - 1);
}

void Lattice::validate() const {
  if (nx == 0 || ny == 0) throw std::invalid_argument("lattice needs at least one node per axis");
  if (!(x_max >= x_min && y_max >= y_min)) throw std::invalid_argument("lattice bounds are reversed");
  for (std::size_t j = 0; j < ny; ++j) {
    for (std::size_t i = 0; i < nx; ++i) {
      if (std::hypot(x(i), y(j)) < 1e-9 || std::hypot(x(i) - 1.0, y(j)) < 1e-9) {
        throw std::invalid_argument("lattice node coincides with the source or destination");
      }
    }
  }
}

std::vector<ContourGrid> contour_grids(const SystemParams& params, const FadingModel& fading,
                                       const std::vector<Scheme>& schemes, const Lattice& lattice,
                                       std::uint64_t trials_per_cell, std::uint64_t seed, const SimOptions& options) {
  lattice.validate();
  std::vector<ProbeSpec> probes;
  probes.reserve(lattice.nx * lattice.ny);
  for (std::size_t j = 0; j < lattice.ny; ++j) {
    for (std::size_t i = 0; i < lattice.nx; ++i) {
      probes.push_back({to_location({lattice.x(i), std::abs(lattice.y(j))})});
    }
  }
  BatchResult batch = estimate_batch(params, fading, schemes, probes, trials_per_cell, seed, options);
  std::vector<ContourGrid> out;
  for (std::size_t s = 0; s < schemes.size(); ++s) {
    out.push_back({schemes[s], lattice, std::move(batch.cooperation[s])});
  }
  return out;
}

ContourGrid contour_grid(const SystemParams& params, const FadingModel& fading, const Scheme& scheme,
                         const Lattice& lattice, std::uint64_t trials_per_cell, std::uint64_t seed,
                         const SimOptions& options) {
  return std::move(contour_grids(params, fading, {scheme}, lattice, trials_per_cell, seed, options).front());
}

TwoRelayEstimate simulate_two_relay(double z1, double z2, double beta, std::uint64_t trials, std::uint64_t seed,
                                    int workers) {
  if (!(z1 > 0.0 && z1 <= 1.0 && z2 > 0.0 && z2 <= 1.0)) {
    throw std::domain_error("qualification probabilities must lie in (0, 1]");
  }
  if (!(beta >= 0.0)) throw std::domain_error("beta must be nonnegative");
  if (trials == 0) throw std::invalid_argument("trials must be positive");
  const double w1 = std::pow(z1, beta);
  const double w2 = std::pow(z2, beta);
  auto trial_fn = [&](std::vector<std::uint64_t>& acc, std::uint64_t t) {
    Rng rng = Rng::for_substream(seed, t, 0);
    const bool q1 = rng.uniform() < z1;
    const bool q2 = rng.uniform() < z2;
    const double t1 = rng.uniform() * w1;
    const double t2 = rng.uniform() * w2;
    if (q1 && (!q2 || t1 <= t2)) ++acc[0];
    if (q2 && (!q1 || t2 < t1)) ++acc[1];
    const double u1 = rng.uniform() * z1;
    const double u2 = rng.uniform() * z2;
    if (u1 >= u2) ++acc[2];
  };
  const auto counts = run_trials(trials, workers, 3, trial_fn);
  return {McEstimate::from_counts(counts[0], trials, seed), McEstimate::from_counts(counts[1], trials, seed),
          McEstimate::from_counts(counts[2], trials, seed)};
}

}  // namespace fairrelay
