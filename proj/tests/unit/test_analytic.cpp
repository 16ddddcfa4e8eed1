#include <gtest/gtest.h>

#include <cmath>

#include "fairrelay/analytic.hpp"
#include "oracles.hpp"

using namespace fairrelay;

namespace {

constexpr double kReferenceGbar = 9.638237268972;

const ProposedModel& default_model() {
  static const ProposedModel model(SystemParams{}, make_rayleigh());
  return model;
}

double coefficient(double theta, double gamma) { return theta / gamma; }

}  // namespace

TEST(G, VanishesAtZero) {
  const auto f = make_rayleigh();
  EXPECT_EQ(g_integral(SystemParams{}, *f, 1.0, 0.0).value, 0.0);
  EXPECT_EQ(default_model().g(0.0, 1.0).value, 0.0);
}

TEST(G, SaturatesAtMeanQualifiedMeasure) {
  const auto f = make_rayleigh();
  const Estimate gbar = mean_qualified_measure(SystemParams{}, *f);
  EXPECT_NEAR(gbar.value, kReferenceGbar, 1e-6);
  EXPECT_LT(gbar.error, 1e-4);
  for (double x : {1.0, 1.5, 10.0}) {
    EXPECT_NEAR(g_integral(SystemParams{}, *f, 0.0, x).value, gbar.value, 1e-6 * gbar.value);
    EXPECT_NEAR(default_model().g(x, 0.0).value, gbar.value, 1e-6 * gbar.value);
  }
}

TEST(G, MeanQualifiedMeasureMatchesPlaneSampling) {
  const double c = coefficient(3.1622776601683795, 100.0);
  const auto s = oracle::plane_integral(
      [&](double a, double b) { return std::exp(-c * std::pow(a, 4) - c * std::pow(b, 4)); }, 5.0, 1000000, 11);
  EXPECT_NEAR(kReferenceGbar, s.mean, 3.0 * s.std_error);
}

TEST(G, ClippedIntegralMatchesPlaneSampling) {
  const double c = coefficient(3.1622776601683795, 100.0);
  const double x = 0.5;
  const auto s = oracle::plane_integral(
      [&](double a, double b) { return std::min(std::exp(-c * std::pow(a, 4) - c * std::pow(b, 4)), x); }, 5.0,
      1000000, 12);
  const auto f = make_rayleigh();
  const Estimate direct = g_integral(SystemParams{}, *f, 1.0, x);
  const Estimate fast = default_model().g(x, 1.0);
  EXPECT_NEAR(direct.value, s.mean, 3.0 * s.std_error);
  EXPECT_NEAR(fast.value, direct.value, 1e-5 * direct.value);
}

TEST(H, MatchesPlaneSampling) {
  const double c = coefficient(3.1622776601683795, 100.0);
  const auto s = oracle::plane_integral(
      [&](double a, double b) { return std::exp(-c * std::pow(a, 4) - std::max(c, 1.0) * std::pow(b, 4)); }, 5.0,
      1000000, 13);
  const auto f = make_rayleigh();
  EXPECT_NEAR(h_integral(SystemParams{}, *f, 1.0).value, s.mean, 3.0 * s.std_error);
}

TEST(H, ZeroArgumentIsMeanQualifiedMeasure) {
  const auto f = make_rayleigh();
  EXPECT_NEAR(h_integral(SystemParams{}, *f, 0.0).value, kReferenceGbar, 1e-6);
}

TEST(Monotonicity, GNondecreasingAndHNonincreasing) {
  const auto f = make_rayleigh();
  const OpportunisticModel opp(SystemParams{}, f);
  for (double beta : {0.0, 0.5, 1.0, 2.0}) {
    double prev = 0.0;
    for (int k = 1; k <= 40; ++k) {
      const double g = default_model().g(k / 40.0, beta).value;
      EXPECT_GE(g, prev - 1e-9) << beta << " " << k;
      prev = g;
    }
  }
  double prev = opp.h(0.0).value;
  for (double y = 0.01; y < 20.0; y *= 1.3) {
    const double h = opp.h(y).value;
    EXPECT_LE(h, prev + 1e-9) << y;
    prev = h;
  }
}

TEST(ProposedPower, EmptyFieldGivesQualification) {
  SystemParams p;
  p.nbar = 0.0;
  const ProposedModel m(p, make_rayleigh());
  for (double z : {0.01, 0.3, 0.99}) EXPECT_NEAR(m.pavg(z, 1.3).value, z, 1e-15);
}

TEST(ProposedPower, RandomSelectionClosedForm) {
  const double m = 2.0 * kReferenceGbar;
  for (double z : {0.05, 0.5, 1.0}) {
    const double expected = z * -std::expm1(-m) / m;
    EXPECT_NEAR(default_model().pavg(z, 0.0).value, expected, 1e-8);
  }
  EXPECT_NEAR(default_model().pavg(1.0, 0.0).value, 0.0518767056587, 1e-8);
}

TEST(ProposedPower, FreeFunctionAgreesWithModel) {
  const Estimate free = pavg_proposed(SystemParams{}, make_rayleigh(), 0.5, 1.2);
  EXPECT_NEAR(free.value, default_model().pavg(0.5, 1.2).value, 1e-9);
  EXPECT_NEAR(free.value, 0.0185474589, 1e-8);
}

TEST(ProposedPower, BoundedAndDecreasingInDensity) {
  for (double z : {0.1, 0.5, 0.9}) EXPECT_LE(default_model().pavg(z, 1.0).value, z);
  double prev = 1.0;
  for (double nbar : {0.5, 1.0, 2.0, 4.0}) {
    SystemParams p;
    p.nbar = nbar;
    const double v = ProposedModel(p, make_rayleigh()).pavg(0.5, 1.0).value;
    EXPECT_LT(v, prev);
    prev = v;
  }
}

TEST(ProposedPower, RejectsBadArguments) {
  EXPECT_THROW(default_model().pavg(0.0, 1.0), std::domain_error);
  EXPECT_THROW(default_model().pavg(1.2, 1.0), std::domain_error);
  EXPECT_THROW(default_model().pavg(0.5, -1.0), std::domain_error);
}

TEST(ProposedPower, ErrorEstimatesAreSmall) {
  for (double z : {0.01, 0.2, 0.7, 1.0}) {
    const Estimate e = default_model().pavg(z, 1.0);
    EXPECT_LT(e.error, 1e-5 * std::max(e.value, 1e-3));
  }
}

TEST(OpportunisticPower, EmptyFieldGivesQualification) {
  SystemParams p;
  p.nbar = 0.0;
  const auto f = make_rayleigh();
  const NormalizedLocation loc{0.75, 0.75};
  EXPECT_NEAR(pavg_opportunistic(p, f, loc).value, qualification_prob(p, *f, loc), 1e-15);
}

TEST(OpportunisticPower, KnownValueAndDecreasingInSourceDistance) {
  SystemParams p;
  p.gamma_sr = p.gamma_rd = std::pow(10.0, 1.5);
  const OpportunisticModel m(p, make_rayleigh());
  EXPECT_NEAR(m.pavg({0.75, 0.75}).value, 0.06968, 2e-4);
  double prev = 1.0;
  for (double a = 0.2; a <= 1.8; a += 0.2) {
    const double v = m.pavg({a, 1.0}).value;
    EXPECT_LT(v, prev);
    prev = v;
  }
}

TEST(TwoRelay, HandValues) {
  const auto [p1, p2] = two_relay_pavg(1.0, 0.5, 1.0);
  EXPECT_DOUBLE_EQ(p1, 0.625);
  EXPECT_DOUBLE_EQ(p2, 0.375);
  EXPECT_DOUBLE_EQ(timer_order_prob(1.0, 0.5), 0.75);
  EXPECT_DOUBLE_EQ(timer_order_prob(0.8, 0.8), 0.5);
  const auto [q1, q2] = two_relay_pavg(0.5, 1.0, 1.0);
  EXPECT_DOUBLE_EQ(q1, 0.375);
  EXPECT_DOUBLE_EQ(q2, 0.625);
}

TEST(TwoRelay, LimitsAndBounds) {
  const double z1 = 0.9, z2 = 0.4;
  const auto [r1, r2] = two_relay_pavg(z1, z2, 0.0);
  EXPECT_NEAR(r1, z1 * (1.0 - z2 / 2.0), 1e-15);
  EXPECT_NEAR(r2, z2 * (1.0 - z1 / 2.0), 1e-15);
  const auto [s1, s2] = two_relay_pavg(z1, z2, 50.0);
  EXPECT_NEAR(s1, z1 * (1.0 - z2), 1e-12);
  EXPECT_NEAR(s2, z2, 1e-12);
  for (double beta = 0.0; beta <= 5.0; beta += 0.25) {
    const auto [p1, p2] = two_relay_pavg(z1, z2, beta);
    EXPECT_LE(std::abs(p1 - p2), z1 - z2 + 1e-15);
    EXPECT_NEAR(p1 + p2, z1 + z2 - z1 * z2, 1e-15);
  }
}

TEST(TwoRelay, RejectsBadArguments) {
  EXPECT_THROW(two_relay_pavg(0.0, 0.5, 1.0), std::domain_error);
  EXPECT_THROW(two_relay_pavg(0.5, 1.5, 1.0), std::domain_error);
  EXPECT_THROW(two_relay_pavg(0.5, 0.5, -1.0), std::domain_error);
  EXPECT_THROW(timer_order_prob(0.5, 0.8), std::domain_error);
  EXPECT_THROW(timer_order_prob(0.5, 0.0), std::domain_error);
}

TEST(Outage, ClosedFormInMeanMeasure) {
  const auto f = make_rayleigh();
  SystemParams p;
  const Estimate out = analytic_outage(p, *f);
  EXPECT_NEAR(out.value, std::exp(-2.0 * kReferenceGbar), 1e-12);
  p.nbar = 0.0;
  EXPECT_DOUBLE_EQ(analytic_outage(p, *f).value, 1.0);
  double prev = 1.0;
  for (double nbar : {0.25, 0.5, 1.0, 2.0}) {
    p.nbar = nbar;
    const double v = analytic_outage(p, *f).value;
    EXPECT_LT(v, prev);
    prev = v;
  }
}

TEST(Conservation, CooperationMassPlusOutageIsOne) {
  SystemParams p;
  p.gamma_sr = p.gamma_rd = std::pow(10.0, 0.7);
  p.theta_r = p.theta_d = std::pow(10.0, 0.3);
  p.nbar = 1.0;
  const auto f = make_rayleigh();
  const double outage = analytic_outage(p, *f).value;
  const ProposedModel prop(p, f);
  EXPECT_NEAR(prop.cooperation_mass(1.0).value + outage, 1.0, 1e-4);
  EXPECT_NEAR(prop.cooperation_mass(0.0).value + outage, 1.0, 1e-4);
  const OpportunisticModel opp(p, f);
  EXPECT_NEAR(opp.cooperation_mass().value + outage, 1.0, 1e-4);
}

TEST(Quadrature, LiteralModeChangesTheAnswer) {
  const auto f = make_rayleigh();
  SystemParams p;
  p.theta_d = 10.0;
  QuadratureConfig literal;
  literal.paper_literal = true;
  const double corrected = h_integral(p, *f, 0.5).value;
  const double lit = h_integral(p, *f, 0.5, literal).value;
  EXPECT_GT(std::abs(corrected - lit), 1e-3 * corrected);
}

TEST(Quadrature, ConfigValidation) {
  QuadratureConfig q;
  EXPECT_NO_THROW(q.validate());
  q.rel_tol = 0.0;
  EXPECT_THROW(q.validate(), std::invalid_argument);
  q = QuadratureConfig{};
  q.singularity_margin = 0.5;
  EXPECT_THROW(q.validate(), std::invalid_argument);
  q = QuadratureConfig{};
  q.max_refinements = 0;
  EXPECT_THROW(q.validate(), std::invalid_argument);
}

TEST(Quadrature, TighterSettingsStayWithinReportedError) {
  QuadratureConfig loose;
  QuadratureConfig tight;
  tight.rel_tol = loose.rel_tol / 2;
  tight.singularity_margin = loose.singularity_margin / 2;
  const ProposedModel a(SystemParams{}, make_rayleigh(), loose);
  const ProposedModel b(SystemParams{}, make_rayleigh(), tight);
  for (double z : {0.05, 0.5, 0.95}) {
    const Estimate ea = a.pavg(z, 1.0);
    const Estimate eb = b.pavg(z, 1.0);
    EXPECT_LE(std::abs(ea.value - eb.value), ea.error + eb.error) << z;
  }
}
