#include <gtest/gtest.h>

#include <cmath>
#include <set>

#include "fairrelay/quadrature.hpp"
#include "fairrelay/rng.hpp"

using namespace fairrelay;

TEST(Rng, SubstreamsAreReproducibleAndDistinct) {
  Rng a = Rng::for_substream(42, 7, 0);
  Rng b = Rng::for_substream(42, 7, 0);
  for (int i = 0; i < 100; ++i) EXPECT_EQ(a(), b());
  std::set<std::uint64_t> firsts;
  for (std::uint64_t t = 0; t < 1000; ++t) {
    for (std::uint64_t s = 0; s < 4; ++s) firsts.insert(Rng::for_substream(42, t, s)());
  }
  EXPECT_EQ(firsts.size(), 4000u);
  EXPECT_NE(Rng::for_substream(1, 0, 0)(), Rng::for_substream(2, 0, 0)());
}

TEST(Rng, UniformAndExponentialMoments) {
  Rng r(3);
  const int n = 1000000;
  double su = 0.0, se = 0.0;
  for (int i = 0; i < n; ++i) {
    const double u = r.uniform();
    ASSERT_GT(u, 0.0);
    ASSERT_LT(u, 1.0);
    su += u;
    se += r.exponential();
  }
  EXPECT_NEAR(su / n, 0.5, 4 * std::sqrt(1.0 / 12 / n));
  EXPECT_NEAR(se / n, 1.0, 4 * std::sqrt(1.0 / n));
}

TEST(Quadrature, SmoothIntegral) {
  const auto r = integrate_adaptive([](double x) { return std::sin(x); }, 0.0, M_PI, {1e-12, 0.0, 200});
  EXPECT_TRUE(r.converged);
  EXPECT_NEAR(r.value, 2.0, 1e-12);
  EXPECT_LT(r.error, 1e-11);
}

TEST(Quadrature, EndpointSingularityAndBreakpoints) {
  const auto r = integrate_adaptive([](double x) { return 1.0 / std::sqrt(x); }, 0.0, 1.0, {1e-9, 0.0, 400});
  EXPECT_NEAR(r.value, 2.0, 1e-8);
  const std::array<double, 3> bp{0.0, 0.3, 1.0};
  const auto k = integrate_adaptive([](double x) { return std::abs(x - 0.3); }, std::span<const double>(bp),
                                    {1e-13, 0.0, 50});
  EXPECT_NEAR(k.value, 0.5 * (0.09 + 0.49), 1e-14);
  EXPECT_EQ(k.subdivisions, 0);
}

TEST(Quadrature, ReportsNonConvergence) {
  const auto r = integrate_adaptive([](double x) { return std::sin(1.0 / x); }, 1e-6, 1.0, {1e-14, 0.0, 3});
  EXPECT_FALSE(r.converged);
  EXPECT_GT(r.error, 0.0);
}

TEST(Quadrature, PropagatesInnerError) {
  const auto r = integrate_adaptive([](double) { return Estimate{1.0, 0.01}; }, 0.0, 2.0, {1e-10, 0.0, 50});
  EXPECT_TRUE(r.converged);
  EXPECT_NEAR(r.value, 2.0, 1e-14);
  EXPECT_NEAR(r.error, 0.02, 1e-12);
}

TEST(Chebyshev, InterpolatesSmoothFunction) {
  const ChebyshevPanel p(0.0, 2.0, [](double x) { return std::exp(-x) * std::cos(x); });
  for (double x = 0.0; x <= 2.0; x += 0.01) EXPECT_NEAR(p(x), std::exp(-x) * std::cos(x), 1e-12);
  EXPECT_LT(p.tail(), 1e-12);
}
