#include <gtest/gtest.h>

#include <cmath>

#include "fairrelay/analytic.hpp"
#include "fairrelay/simulator.hpp"
#include "oracles.hpp"

using namespace fairrelay;

namespace {

// Lower SNR keeps the simulation region small and the tests fast.
SystemParams low_snr() {
  SystemParams p;
  p.gamma_sr = p.gamma_rd = std::pow(10.0, 0.7);
  p.theta_r = p.theta_d = std::pow(10.0, 0.3);
  p.nbar = 1.0;
  return p;
}

RelayRealization relay(double a, double b, bool qualified, double timer, double omega_rd = 1.0) {
  RelayRealization r;
  r.loc = {a, b};
  r.omega_sr = 1.0;
  r.omega_rd = omega_rd;
  r.qualified = qualified;
  if (qualified) r.timer = timer;
  return r;
}

}  // namespace

TEST(Field, EmptyWhenDensityIsZero) {
  SystemParams p;
  p.nbar = 0.0;
  Rng rng(1);
  EXPECT_TRUE(sample_field(p, SimRegion{3.0}, rng).empty());
}

TEST(Field, PoissonCountMean) {
  const SystemParams p;  // nbar = 2
  const SimRegion region{3.0};
  const int draws = 100000;
  double sum = 0.0;
  double sum2 = 0.0;
  for (int t = 0; t < draws; ++t) {
    Rng rng = Rng::for_substream(5, t, 0);
    const double n = static_cast<double>(sample_field(p, region, rng).size());
    sum += n;
    sum2 += n * n;
  }
  const double mean = sum / draws;
  const double expected = p.nbar * region.area();
  EXPECT_NEAR(expected, 56.5487, 1e-4);
  EXPECT_NEAR(mean, expected, 4.0 * std::sqrt(expected / draws));
  EXPECT_NEAR(sum2 / draws - mean * mean, expected, 0.03 * expected);
}

TEST(Field, UniformOverEqualAreaCells) {
  const SystemParams p;
  const SimRegion region{3.0};
  std::array<double, 8> counts{};
  double total = 0.0;
  for (int t = 0; t < 20000; ++t) {
    Rng rng = Rng::for_substream(6, t, 0);
    for (const auto& loc : sample_field(p, region, rng)) {
      const CartesianPoint c = to_cartesian(loc);
      const double dx = c.x - 0.5;
      const double r = std::hypot(dx, c.y);
      ASSERT_LE(r, region.radius * (1 + 1e-12));
      const int ring = r * r < 0.5 * region.radius * region.radius ? 0 : 1;
      const int sector = std::min(3, static_cast<int>(std::atan2(c.y, dx) / (M_PI / 4)));
      counts[ring * 4 + sector] += 1.0;
      total += 1.0;
    }
  }
  double chi2 = 0.0;
  for (double c : counts) chi2 += (c - total / 8) * (c - total / 8) / (total / 8);
  EXPECT_LT(chi2, 18.48);  // 1% point with 7 degrees of freedom
}

TEST(Field, GrowingTheRegionOnlyAppends) {
  const SystemParams p;
  Rng a = Rng::for_substream(9, 3, 0);
  Rng b = Rng::for_substream(9, 3, 0);
  const auto small = sample_field(p, SimRegion{3.0}, a);
  const auto large = sample_field(p, SimRegion{5.0}, b);
  ASSERT_GE(large.size(), small.size());
  for (std::size_t k = 0; k < small.size(); ++k) {
    EXPECT_EQ(small[k].a, large[k].a);
    EXPECT_EQ(small[k].b, large[k].b);
  }
}

TEST(Region, TruncationRadius) {
  const auto f = make_rayleigh();
  EXPECT_NEAR(SimRegion::r_min(SystemParams{}, *f), 4.2251, 1e-3);
  EXPECT_EQ(SimRegion::for_params(low_snr(), *f).radius, std::max(3.0, SimRegion::r_min(low_snr(), *f)));
  EXPECT_THROW(SimRegion{2.0}.validate(SystemParams{}, *f), std::invalid_argument);
  EXPECT_NO_THROW(SimRegion{5.0}.validate(SystemParams{}, *f));
}

TEST(Selection, NoQualifiedRelayMeansNoSelection) {
  const std::vector<RelayRealization> relays{relay(0.5, 0.5, false, 0), relay(1.0, 1.0, false, 0)};
  for (const Scheme& s : {Scheme::proposed(1.0), Scheme::random(), Scheme::opportunistic()}) {
    EXPECT_FALSE(select_relay(s, SystemParams{}, relays).has_value());
  }
}

TEST(Selection, SingleQualifiedRelayWinsUnderEveryScheme) {
  const std::vector<RelayRealization> relays{relay(0.5, 0.5, false, 0), relay(1.0, 1.0, true, 0.7),
                                             relay(2.0, 1.5, false, 0)};
  for (const Scheme& s : {Scheme::proposed(1.0), Scheme::random(), Scheme::opportunistic()}) {
    EXPECT_EQ(select_relay(s, SystemParams{}, relays), std::optional<std::size_t>(1));
  }
}

TEST(Selection, TimerMinimumAndSnrMaximum) {
  const std::vector<RelayRealization> relays{relay(0.5, 0.5, true, 0.4, 0.2), relay(1.0, 1.0, true, 0.1, 0.5),
                                             relay(0.8, 0.4, true, 0.3, 0.3)};
  EXPECT_EQ(select_relay(Scheme::proposed(1.0), SystemParams{}, relays), std::optional<std::size_t>(1));
  // R-D SNRs: 0.2 / 0.5^4 = 3.2, 0.5 / 1 = 0.5, 0.3 / 0.4^4 = 11.7.
  EXPECT_EQ(select_relay(Scheme::opportunistic(), SystemParams{}, relays), std::optional<std::size_t>(2));
}

TEST(Selection, OutcomeIsConsistentAndRecomputable) {
  const SystemParams p = low_snr();
  const auto f = make_rayleigh();
  const SimRegion region = SimRegion::for_params(p, *f);
  for (std::uint64_t t = 0; t < 2000; ++t) {
    for (const Scheme& s : {Scheme::proposed(1.0), Scheme::opportunistic()}) {
      const SelectionOutcome o = realize_and_select(p, *f, s, region, ProbeSpec{{0.5, 0.5}}, 21, t);
      const SelectionOutcome again = realize_and_select(p, *f, s, region, ProbeSpec{{0.5, 0.5}}, 21, t);
      ASSERT_EQ(o.relays.size(), again.relays.size());
      EXPECT_EQ(o.selected, again.selected);
      EXPECT_EQ(o.outage, o.qualified_count == 0);
      EXPECT_EQ(o.selected.has_value(), !o.outage);
      if (o.selected) {
        EXPECT_TRUE(o.relays[*o.selected].qualified);
        EXPECT_EQ(select_relay(s, p, o.relays), o.selected);
      }
      EXPECT_TRUE(o.probe_present);
      for (const auto& r : o.relays) {
        EXPECT_EQ(r.qualified && s.uses_timers(), r.timer.has_value());
        if (std::isnan(r.omega_rd)) EXPECT_FALSE(r.qualified);
      }
    }
  }
}

TEST(Timers, NormalizedTimersAreUniform) {
  const SystemParams p = low_snr();
  const auto f = make_rayleigh();
  const SimRegion region = SimRegion::for_params(p, *f);
  const double beta = 1.5;
  std::vector<double> normalized;
  for (std::uint64_t t = 0; normalized.size() < 20000; ++t) {
    const SelectionOutcome o = realize_and_select(p, *f, Scheme::proposed(beta), region, std::nullopt, 4, t);
    for (const auto& r : o.relays) {
      if (r.timer) normalized.push_back(*r.timer / std::pow(qualification_prob(p, *f, r.loc), beta));
    }
  }
  EXPECT_LT(oracle::ks_uniform(normalized), oracle::ks_critical_1pct(normalized.size()));
}

TEST(TwoRelaySim, MatchesClosedForm) {
  const TwoRelayEstimate e = simulate_two_relay(1.0, 0.5, 1.0, 200000, 3, 2);
  EXPECT_NEAR(e.first.mean, 0.625, 4 * e.first.std_error);
  EXPECT_NEAR(e.second.mean, 0.375, 4 * e.second.std_error);
  EXPECT_NEAR(e.order.mean, 0.75, 4 * e.order.std_error);
  // Both qualified with z = 0.5: each is selected half of the qualified time.
  const TwoRelayEstimate h = simulate_two_relay(0.5, 0.5, 1.0, 200000, 4);
  EXPECT_NEAR(h.first.mean, 0.5 * (1 - 0.5) + 0.25 * 0.5, 4 * h.first.std_error);
}

TEST(Estimators, StandardErrorFormula) {
  const McEstimate e = McEstimate::from_counts(25, 100, 7);
  EXPECT_DOUBLE_EQ(e.mean, 0.25);
  EXPECT_DOUBLE_EQ(e.std_error, std::sqrt(0.25 * 0.75 / 99));
  EXPECT_EQ(e.seed, 7u);
}

TEST(Estimators, EmptyFieldGivesQualification) {
  SystemParams p = low_snr();
  p.nbar = 0.0;
  const auto f = make_rayleigh();
  const NormalizedLocation loc{0.6, 0.6};
  const double z = qualification_prob(p, *f, loc);
  for (const Scheme& s : {Scheme::proposed(1.0), Scheme::opportunistic()}) {
    const McEstimate e = estimate_cooperation(p, *f, s, {loc}, 100000, 8);
    EXPECT_NEAR(e.mean, z, 4.0 * std::sqrt(z * (1 - z) / 1e5));
  }
}

TEST(Estimators, UnreachableProbeNeverCooperates) {
  const auto f = make_rayleigh();
  const McEstimate e = estimate_cooperation(low_snr(), *f, Scheme::proposed(1.0), {{40.0, 39.5}}, 20000, 9);
  EXPECT_EQ(e.successes, 0u);
  EXPECT_EQ(e.mean, 0.0);
}

TEST(Estimators, MidpointMatchesAnalytic) {
  const SystemParams p = low_snr();
  const auto f = make_rayleigh();
  const NormalizedLocation loc{0.5, 0.5};
  const double z = qualification_prob(p, *f, loc);
  const BatchResult r =
      estimate_batch(p, *f, {Scheme::proposed(1.0), Scheme::opportunistic()}, {{loc}}, 200000, 10);
  const double prop = pavg_proposed(p, f, z, 1.0).value;
  const double opp = pavg_opportunistic(p, f, loc).value;
  EXPECT_NEAR(r.cooperation[0][0].mean, prop, 4.0 * std::sqrt(prop * (1 - prop) / 2e5));
  EXPECT_NEAR(r.cooperation[1][0].mean, opp, 4.0 * std::sqrt(opp * (1 - opp) / 2e5));
}

TEST(Outage, CertainWithEmptyField) {
  SystemParams p = low_snr();
  p.nbar = 0.0;
  const McEstimate e = estimate_outage(p, *make_rayleigh(), 1000, 1);
  EXPECT_EQ(e.successes, 1000u);
}

TEST(Outage, MatchesAnalyticAndFallsWithDensity) {
  const auto f = make_rayleigh();
  double prev = 1.0;
  for (double nbar : {0.25, 0.5, 1.0}) {
    SystemParams p = low_snr();
    p.nbar = nbar;
    const McEstimate e = estimate_outage(p, *f, 200000, 12);
    const double a = analytic_outage(p, *f).value;
    EXPECT_NEAR(e.mean, a, 4.0 * std::sqrt(a * (1 - a) / 2e5)) << nbar;
    EXPECT_LT(e.mean, prev);
    prev = e.mean;
  }
}

TEST(Outage, SequencesAgreeAcrossSchemes) {
  const SystemParams p = low_snr();
  const auto f = make_rayleigh();
  const auto a = outage_sequence(p, *f, Scheme::proposed(1.0), 5000, 13);
  EXPECT_EQ(a, outage_sequence(p, *f, Scheme::random(), 5000, 13));
  EXPECT_EQ(a, outage_sequence(p, *f, Scheme::opportunistic(), 5000, 13));
}

TEST(Determinism, IndependentOfWorkerCount) {
  const SystemParams p = low_snr();
  const auto f = make_rayleigh();
  const std::vector<Scheme> schemes{Scheme::proposed(1.2), Scheme::random(), Scheme::opportunistic()};
  const std::vector<ProbeSpec> probes{{{0.5, 0.5}}, {{1.0, 0.8}}};
  BatchResult base = estimate_batch(p, *f, schemes, probes, 30000, 14, {std::nullopt, 1});
  for (int w : {3, 8}) {
    const BatchResult other = estimate_batch(p, *f, schemes, probes, 30000, 14, {std::nullopt, w});
    EXPECT_EQ(base.outage.successes, other.outage.successes);
    for (std::size_t s = 0; s < schemes.size(); ++s) {
      for (std::size_t k = 0; k < probes.size(); ++k) {
        EXPECT_EQ(base.cooperation[s][k].successes, other.cooperation[s][k].successes);
      }
    }
  }
}

TEST(Determinism, RegionDoublingChangesLittle) {
  const SystemParams p = low_snr();
  const auto f = make_rayleigh();
  const SimRegion region = SimRegion::for_params(p, *f);
  const ProbeSpec probe{{0.5, 0.5}};
  const McEstimate a = estimate_cooperation(p, *f, Scheme::proposed(1.0), probe, 100000, 15, {region, 1});
  const McEstimate b =
      estimate_cooperation(p, *f, Scheme::proposed(1.0), probe, 100000, 15, {SimRegion{2 * region.radius}, 1});
  EXPECT_LE(std::abs(a.mean - b.mean), a.std_error);
}

TEST(Contour, GridShapeAndLatticeValidation) {
  Lattice lat;
  lat.nx = 7;
  lat.ny = 4;
  lat.x_min = -0.95;
  lat.x_max = 1.95;
  lat.y_min = 0.1;
  lat.y_max = 1.0;
  const auto grids = contour_grids(low_snr(), *make_rayleigh(), {Scheme::random(), Scheme::opportunistic()}, lat,
                                   500, 16);
  ASSERT_EQ(grids.size(), 2u);
  EXPECT_EQ(grids[0].cells.size(), 28u);
  EXPECT_EQ(grids[1].at(3, 2).trials, 500u);
  EXPECT_NO_THROW(Lattice{}.validate());
  Lattice bad;
  bad.nx = 4;  // nodes at x = -1, 0, 1, 2 on y = 0 hit S and D
  EXPECT_THROW(bad.validate(), std::invalid_argument);
}
