#include <gtest/gtest.h>

#include <cmath>

#include "fairrelay/model.hpp"

using namespace fairrelay;

namespace {

SystemParams default_params() { return SystemParams{}; }

}  // namespace

TEST(YJoint, HandValues) {
  const auto f = make_rayleigh();
  EXPECT_DOUBLE_EQ(y_joint(0.0, 0.0, *f), 1.0);
  EXPECT_NEAR(y_joint(std::log(2.0), std::log(2.0), *f), 0.25, 1e-15);
  EXPECT_NEAR(y_joint(0.5, 1.5, *f), std::exp(-2.0), 1e-15);
  EXPECT_NEAR(y_joint(0.5, 1.5, *f), 0.13534, 1e-5);
}

TEST(YJoint, RejectsNegativeArguments) {
  const auto f = make_rayleigh();
  EXPECT_THROW(y_joint(-1e-3, 0.0, *f), std::domain_error);
  EXPECT_THROW(y_joint(0.0, -1.0, *f), std::domain_error);
}

TEST(YJoint, NonincreasingInEachArgument) {
  const auto f = make_rayleigh();
  for (double u = 0.0; u < 5.0; u += 0.25) {
    EXPECT_GE(y_joint(u, 0.3, *f), y_joint(u + 0.25, 0.3, *f));
    EXPECT_GE(y_joint(0.3, u, *f), y_joint(0.3, u + 0.25, *f));
  }
}

TEST(Qualification, MidpointHandValue) {
  const auto f = make_rayleigh();
  const double z = qualification_prob(default_params(), *f, {0.5, 0.5});
  EXPECT_NEAR(z, std::exp(-2.0 * 0.031622776601683795 * 0.0625), 1e-14);
  EXPECT_NEAR(z, 0.99606, 1e-5);
}

TEST(Qualification, VanishingThresholdsGiveOne) {
  SystemParams p;
  p.theta_r = p.theta_d = 1e-300;
  const auto f = make_rayleigh();
  EXPECT_DOUBLE_EQ(qualification_prob(p, *f, {3.0, 2.5}), 1.0);
}

TEST(Qualification, FarAwayIsZero) {
  const auto f = make_rayleigh();
  EXPECT_LT(qualification_prob(default_params(), *f, {60.0, 59.0}), 1e-300);
}

TEST(Qualification, MatchesRayleighClosedFormAndComposition) {
  const auto f = make_rayleigh();
  const SystemParams p = default_params();
  for (double a = 0.05; a < 3.0; a += 0.13) {
    for (double b = std::max(std::abs(1.0 - a), 0.02); b <= 1.0 + a; b += 0.11) {
      const NormalizedLocation loc{a, b};
      const double z = qualification_prob(p, *f, loc);
      const double u = p.theta_r / p.gamma_sr * std::pow(a, p.alpha);
      const double v = p.theta_d / p.gamma_rd * std::pow(b, p.alpha);
      EXPECT_NEAR(z, std::exp(-u - v), 1e-12);
      EXPECT_DOUBLE_EQ(z, y_joint(u, v, *f));
    }
  }
}

TEST(Qualification, MonotoneInDistances) {
  const auto f = make_rayleigh();
  const SystemParams p = default_params();
  for (double a = 0.6; a < 2.0; a += 0.1) {
    EXPECT_GT(qualification_prob(p, *f, {a, 1.0}), qualification_prob(p, *f, {a + 0.1, 1.0}));
    EXPECT_GT(qualification_prob(p, *f, {1.0, a}), qualification_prob(p, *f, {1.0, a + 0.1}));
  }
}

TEST(Biangular, HandValues) {
  const auto above_s = biangular_to_distances({M_PI / 2, M_PI / 4});
  EXPECT_NEAR(above_s.a, 1.0, 1e-14);
  EXPECT_NEAR(above_s.b, std::sqrt(2.0), 1e-14);
  const auto eq = biangular_to_distances({M_PI / 3, M_PI / 3});
  EXPECT_NEAR(eq.a, 1.0, 1e-14);
  EXPECT_NEAR(eq.b, 1.0, 1e-14);
  for (double t = 0.05; t < M_PI / 2; t += 0.1) {
    const auto loc = biangular_to_distances({t, t});
    EXPECT_NEAR(loc.a, loc.b, 1e-14);
  }
}

TEST(Biangular, DegeneratePointsRejected) {
  EXPECT_THROW(biangular_to_distances({0.0, 0.0}), DegeneratePointError);
  EXPECT_THROW(biangular_to_distances({M_PI / 2, M_PI / 2}), DegeneratePointError);
  EXPECT_THROW(jacobian({0.0, 0.0}), DegeneratePointError);
}

TEST(Biangular, RoundTripThroughCartesian) {
  int checked = 0;
  for (int i = 1; i <= 40; ++i) {
    for (int j = 1; j <= 40; ++j) {
      const double t1 = M_PI * i / 41.0;
      const double t2 = (M_PI - t1) * j / 41.0;
      const NormalizedLocation loc = biangular_to_distances({t1, t2});
      loc.validate();
      const BiangularPoint back = to_biangular(to_cartesian(loc));
      EXPECT_NEAR(back.theta1, t1, 1e-10);
      EXPECT_NEAR(back.theta2, t2, 1e-10);
      ++checked;
    }
  }
  EXPECT_GE(checked, 1000);
}

TEST(Jacobian, HandValueAndSymmetry) {
  EXPECT_NEAR(jacobian({M_PI / 3, M_PI / 3}), 0.75 / std::pow(std::sin(2 * M_PI / 3), 3), 1e-14);
  EXPECT_NEAR(jacobian({M_PI / 3, M_PI / 3}), 1.1547, 1e-4);
  EXPECT_LT(jacobian({1e-8, 1.0}), 1e-7);
  for (double t1 = 0.1; t1 < 1.5; t1 += 0.2) {
    for (double t2 = 0.1; t2 < 1.5; t2 += 0.3) EXPECT_DOUBLE_EQ(jacobian({t1, t2}), jacobian({t2, t1}));
  }
}

TEST(Jacobian, IsTheCartesianAreaElement) {
  // Finite-difference area of a small biangular cell.
  const double t1 = 0.7, t2 = 1.1, h = 1e-5;
  auto pt = [](double a1, double a2) { return to_cartesian(biangular_to_distances({a1, a2})); };
  const auto p00 = pt(t1, t2), p10 = pt(t1 + h, t2), p01 = pt(t1, t2 + h);
  const double cross = (p10.x - p00.x) * (p01.y - p00.y) - (p10.y - p00.y) * (p01.x - p00.x);
  EXPECT_NEAR(std::abs(cross) / (h * h), jacobian({t1, t2}), 1e-4);
}

TEST(LinkSnr, HandValues) {
  EXPECT_DOUBLE_EQ(link_snr(100, 1, 4, 1), 100);
  EXPECT_DOUBLE_EQ(link_snr(100, 0.5, 4, 1), 1600);
  EXPECT_DOUBLE_EQ(link_snr(100, 1, 4, 0), 0);
  EXPECT_THROW(link_snr(100, 0, 4, 1), std::domain_error);
  EXPECT_THROW(link_snr(-1, 1, 4, 1), std::domain_error);
}

TEST(SystemParams, Validation) {
  SystemParams p;
  EXPECT_TRUE(p.validate().empty());
  p.alpha = 1.5;
  EXPECT_EQ(p.validate().size(), 1u);
  p.alpha = 4.0;
  p.gamma_sr = 0.0;
  EXPECT_THROW(p.validate(), std::invalid_argument);
  p = SystemParams{};
  p.nbar = -1.0;
  EXPECT_THROW(p.validate(), std::invalid_argument);
  p = SystemParams{};
  p.relay_power = 0.0;
  EXPECT_THROW(p.validate(), std::invalid_argument);
}

TEST(Location, TriangleInvariant) {
  EXPECT_NO_THROW((NormalizedLocation{0.5, 0.5}.validate()));
  EXPECT_NO_THROW((NormalizedLocation{2.0, 1.0}.validate()));
  EXPECT_THROW((NormalizedLocation{0.2, 0.2}.validate()), std::invalid_argument);
  EXPECT_THROW((NormalizedLocation{3.0, 1.0}.validate()), std::invalid_argument);
  EXPECT_THROW((NormalizedLocation{0.0, 1.0}.validate()), std::invalid_argument);
}

TEST(Fading, RayleighLaw) {
  const RayleighFading f;
  EXPECT_DOUBLE_EQ(f.cdf(0.0), 0.0);
  EXPECT_NEAR(f.cdf(1.0), 1.0 - std::exp(-1.0), 1e-15);
  EXPECT_NEAR(f.quantile(f.cdf(0.7)), 0.7, 1e-12);
  EXPECT_NEAR(f.moment(1.0), 1.0, 1e-12);
  EXPECT_DOUBLE_EQ(f.neg_log_survival(3.0), 3.0);
}

TEST(Fading, NakagamiUnitMean) {
  const NakagamiFading f(2.5);
  EXPECT_NEAR(f.moment(1.0), 1.0, 1e-10);
  EXPECT_NEAR(f.quantile(f.cdf(1.3)), 1.3, 1e-9);
  EXPECT_THROW(NakagamiFading(0.2), std::invalid_argument);
}

namespace {

class DoubledExponential final : public FadingModel {
 public:
  double cdf(double x) const override { return x <= 0 ? 0.0 : 1.0 - std::exp(-x / 2.0); }
  double pdf(double x) const override { return x < 0 ? 0.0 : 0.5 * std::exp(-x / 2.0); }
  std::string name() const override { return "mean-two"; }
};

}  // namespace

TEST(Fading, ValidationRejectsNonUnitMean) {
  EXPECT_THROW(validate_fading(DoubledExponential{}), std::invalid_argument);
  EXPECT_NO_THROW(validate_fading(RayleighFading{}));
}

TEST(Location, WithQualification) {
  const auto f = make_rayleigh();
  const SystemParams p = default_params();
  const QualificationPeak peak = peak_qualification(p, *f);
  EXPECT_GE(peak.z, qualification_prob(p, *f, {0.5, 0.5}));
  for (double z : {1e-6, 0.01, 0.3, 0.9, 0.99, 0.9960, peak.z}) {
    const auto loc = location_with_qualification(p, *f, z);
    ASSERT_TRUE(loc.has_value()) << z;
    loc->validate();
    EXPECT_NEAR(qualification_prob(p, *f, *loc), z, 1e-12 * std::max(1.0, z) + 1e-14);
  }
  EXPECT_FALSE(location_with_qualification(p, *f, std::min(1.0, peak.z * 1.001)).has_value());
}
