#pragma once

// Scenario parameters, fading laws, relay geometry and the per-link SNR /
// qualification formulas shared by the analytic and Monte Carlo engines.
//
// All lengths are normalized by the source-destination distance. The source
// sits at (0, 0) and the destination at (1, 0).

#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "fairrelay/rng.hpp"

namespace fairrelay {

/// Normalized scenario. SNRs and thresholds are linear.
struct SystemParams {
  double gamma_sr = 100.0;  ///< mean S-R SNR of a relay at unit distance from S
  double gamma_rd = 100.0;  ///< mean R-D SNR of a relay at unit distance from D
  double theta_r = 3.1622776601683795;  ///< decoding threshold at the relays
  double theta_d = 3.1622776601683795;  ///< decoding threshold at the destination
  double alpha = 4.0;                   ///< path-loss exponent
  double nbar = 2.0;                    ///< relays per squared S-D distance
  double relay_power = 1.0;             ///< P_R, only scales reported powers

  /// Throws std::invalid_argument on a violated invariant. Returns warnings
  /// for admissible-but-unusual values (alpha outside [2, 7]).
  std::vector<std::string> validate() const;

  /// theta_r / gamma_sr: the S-R fading threshold at unit distance.
  double source_coefficient() const { return theta_r / gamma_sr; }
  /// theta_d / gamma_rd: the R-D fading threshold at unit distance.
  double destination_coefficient() const { return theta_d / gamma_rd; }
};

/// Unit-mean fading power law.
class FadingModel {
 public:
  virtual ~FadingModel() = default;

  virtual double cdf(double x) const = 0;
  virtual double pdf(double x) const = 0;
  virtual double survival(double x) const { return 1.0 - cdf(x); }
  /// -ln(1 - F(x)), +inf once the survival underflows.
  virtual double neg_log_survival(double x) const;
  /// Inverse CDF for p in (0, 1).
  virtual double quantile(double p) const;
  /// E[Omega^s] for s > -1.
  virtual double moment(double s) const;
  virtual double sample(Rng& rng) const { return quantile(rng.uniform()); }
  virtual std::string name() const = 0;
};

/// Rayleigh fading: exponential power, F(x) = 1 - exp(-x).
class RayleighFading final : public FadingModel {
 public:
  RayleighFading();
  double cdf(double x) const override;
  double pdf(double x) const override;
  double survival(double x) const override;
  double neg_log_survival(double x) const override;
  double quantile(double p) const override;
  double moment(double s) const override;
  double sample(Rng& rng) const override { return rng.exponential(); }
  std::string name() const override { return "rayleigh"; }
};

/// Nakagami-m fading: Gamma(m, 1/m) power.
class NakagamiFading final : public FadingModel {
 public:
  explicit NakagamiFading(double m);
  double cdf(double x) const override;
  double pdf(double x) const override;
  double survival(double x) const override;
  double quantile(double p) const override;
  double moment(double s) const override;
  std::string name() const override;
  double shape() const { return m_; }

 private:
  double m_;
};

/// Numerical sanity check of a fading law: F(0) = 0, nondecreasing,
/// saturating, and unit mean to 1e-6. Throws std::invalid_argument.
void validate_fading(const FadingModel& fading);

std::shared_ptr<const FadingModel> make_rayleigh();

/// A relay position given by its distances to S and D.
struct NormalizedLocation {
  double a = 0.5;  ///< distance to the source
  double b = 0.5;  ///< distance to the destination

  /// Throws std::invalid_argument unless a, b > 0 and the triangle closes.
  void validate() const;
};

/// Angles a point subtends at S (theta1) and at D (theta2), upper half-plane.
struct BiangularPoint {
  double theta1 = 0.0;
  double theta2 = 0.0;
};

struct CartesianPoint {
  double x = 0.0;
  double y = 0.0;
};

/// Biangular points closer than this to the S-D axis are rejected.
inline constexpr double kAngularGuard = 1e-9;

class DegeneratePointError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// (1 - F(u)) (1 - F(v)). Throws std::domain_error on negative arguments.
double y_joint(double u, double v, const FadingModel& fading);

/// Probability that a relay at `loc` can decode the source and be decoded
/// at the destination.
double qualification_prob(const SystemParams& params, const FadingModel& fading,
                          const NormalizedLocation& loc);

NormalizedLocation biangular_to_distances(const BiangularPoint& p);

/// Area element ds / (dtheta1 dtheta2).
double jacobian(const BiangularPoint& p);

/// mean_snr * distance_ratio^-alpha * fading_draw.
double link_snr(double mean_snr, double distance_ratio, double alpha, double fading_draw);

NormalizedLocation to_location(const CartesianPoint& p);
/// Upper half-plane point with the given distances.
CartesianPoint to_cartesian(const NormalizedLocation& loc);
BiangularPoint to_biangular(const CartesianPoint& p);

/// Largest qualification probability, attained on the S-D segment.
struct QualificationPeak {
  NormalizedLocation loc{};
  double z = 0.0;
};
QualificationPeak peak_qualification(const SystemParams& params, const FadingModel& fading);

/// A location whose qualification probability is z: on the perpendicular
/// bisector when z does not exceed the midpoint value, otherwise on the
/// segment between the midpoint and the peak. Empty when z exceeds the peak.
std::optional<NormalizedLocation> location_with_qualification(const SystemParams& params,
                                                              const FadingModel& fading, double z);

}  // namespace fairrelay
