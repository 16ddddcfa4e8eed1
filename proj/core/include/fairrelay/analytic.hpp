#pragma once

// Analytic per-relay cooperation probability (average consumed power over
// P_R) for the timer-based and opportunistic schemes over a Poisson relay
// field, plus the outage probability and two-relay closed forms.
//
// Every quantity evaluated by quadrature is returned as an Estimate whose
// error is an upper bound on the numerical error, not a standard deviation.
//
// The free functions are self-contained and rebuild their tables on every
// call. Sweeps should construct a ProposedModel or OpportunisticModel once
// and query it; both are immutable after construction and safe to share
// between threads.

#include <memory>
#include <utility>
#include <vector>

#include "fairrelay/detail/plane.hpp"
#include "fairrelay/model.hpp"
#include "fairrelay/quadrature.hpp"
#include "fairrelay/scheme.hpp"

namespace fairrelay {

struct QuadratureConfig {
  double rel_tol = 1e-6;
  double abs_tol = 1e-12;
  int max_refinements = 200;
  double singularity_margin = 1e-4;  ///< collar width (radians) at rho = 0 and rho = pi
  /// Alternative literal forms: qualification inside G and H uses the
  /// S-side distance in both factors, and the opportunistic lower limit uses
  /// theta_R. Off by default.
  bool paper_literal = false;

  /// Throws std::invalid_argument.
  void validate() const;
  detail::PlaneOptions plane() const {
    return {rel_tol, abs_tol, max_refinements, singularity_margin};
  }
};

/// One evaluated point of a power profile. Proposed/random profiles are keyed
/// by z_x; opportunistic ones by location.
struct PowerPoint {
  double z_x = 0.0;
  NormalizedLocation loc{};
  Estimate power{};
};

struct PowerProfile {
  Scheme scheme{};
  std::vector<PowerPoint> values;
};

/// Level model of the competitor qualification probability.
detail::LevelModel qualification_level(const SystemParams& params, const FadingModel& fading,
                                       bool paper_literal);

/// Area profile A(zeta) = |{L < zeta}| tabulated on Chebyshev panels, and the
/// G integral derived from it:
///   G(x) = int_{zeta*}^inf A e^-z dz + (1 - beta) int_{zeta_min}^{zeta*} A e^{-z + beta (z - zeta*)} dz
/// with zeta* = -ln(x) / beta. The table does not depend on beta or x.
class LevelSetProfile {
 public:
  LevelSetProfile(const detail::PlaneIntegrator& plane, double rel_tol, double scale_hint);

  double zeta_min() const { return zeta_min_; }
  double zeta_top() const { return zeta_top_; }
  std::size_t panel_count() const { return panels_.size(); }

  Estimate area(double zeta) const;
  Estimate gbar() const { return gbar_; }
  Estimate g(double x, double beta) const;

 private:
  struct Panel {
    ChebyshevPanel cheb;
    double value_error = 0.0;  ///< bound on |A - interpolant| over the panel
    double mass = 0.0;         ///< int A e^-z over the panel
    double mass_error = 0.0;   ///< value_error * int e^-z over the panel
  };

  const Panel* locate(double zeta) const;

  double zeta_min_ = 0.0;
  double zeta_top_ = 0.0;
  std::vector<Panel> panels_;
  std::vector<double> suffix_mass_;
  double top_tail_ = 0.0;
  Estimate gbar_{};
};

/// Proposed (and random, beta = 0) scheme for one scenario.
class ProposedModel {
 public:
  ProposedModel(const SystemParams& params, std::shared_ptr<const FadingModel> fading,
                const QuadratureConfig& q = {});

  const SystemParams& params() const { return params_; }
  const QuadratureConfig& config() const { return q_; }
  const LevelSetProfile& profile() const { return *profile_; }

  /// Largest qualification probability over the plane.
  double max_qualification() const;
  Estimate gbar() const { return profile_->gbar(); }
  Estimate g(double x, double beta) const { return profile_->g(x, beta); }

  /// Cooperation probability P/P_R of a relay with qualification z_x.
  Estimate pavg(double z_x, double beta) const;
  /// Same, for many z values at once (one cumulative pass).
  std::vector<Estimate> pavg_grid(const std::vector<double>& z_values, double beta) const;
  PowerProfile profile_at(const std::vector<double>& z_values, double beta) const;

  /// nbar * int pavg(Z(X)) dX over the plane; equals 1 - outage.
  Estimate cooperation_mass(double beta) const;

 private:
  Estimate integrate_e(double lo, double hi, double beta, double rel) const;

  SystemParams params_;
  std::shared_ptr<const FadingModel> fading_;
  QuadratureConfig q_;
  std::unique_ptr<detail::PlaneIntegrator> plane_;
  std::unique_ptr<LevelSetProfile> profile_;
};

/// Opportunistic scheme for one scenario. Tabulates H on a log grid.
class OpportunisticModel {
 public:
  OpportunisticModel(const SystemParams& params, std::shared_ptr<const FadingModel> fading,
                     const QuadratureConfig& q = {});

  /// H at a threshold ratio y >= the lower limit coefficient.
  Estimate h(double y) const;
  Estimate pavg(const NormalizedLocation& loc) const;
  PowerProfile profile_at(const std::vector<NormalizedLocation>& locs) const;
  Estimate cooperation_mass() const;

  /// y below which H is constant (the lower limit of the outer integral per b^alpha).
  double lower_coefficient() const { return lower_; }

 private:
  double survival_tail_end(double w0) const;

  SystemParams params_;
  std::shared_ptr<const FadingModel> fading_;
  QuadratureConfig q_;
  double lower_ = 0.0;
  double eta_top_ = 46.0;
  std::vector<ChebyshevPanel> log_h_;
  std::vector<double> log_h_error_;
  Estimate h_floor_{};  ///< H at eta = 0
};

/// 2 * int [x Z^-beta]^{<=1} Z dA over the plane, by direct nested quadrature.
Estimate g_integral(const SystemParams& params, const FadingModel& fading, double beta, double x,
                    const QuadratureConfig& q = {});

/// Mean number of qualified relays per unit density (G at x >= 1, beta = 0).
Estimate mean_qualified_measure(const SystemParams& params, const FadingModel& fading,
                                const QuadratureConfig& q = {});

/// Mean measure of competitors that qualify and beat a destination-side
/// fading threshold x, by direct nested quadrature.
Estimate h_integral(const SystemParams& params, const FadingModel& fading, double x,
                    const QuadratureConfig& q = {});

Estimate pavg_proposed(const SystemParams& params, std::shared_ptr<const FadingModel> fading, double z_x,
                       double beta, const QuadratureConfig& q = {});

Estimate pavg_opportunistic(const SystemParams& params, std::shared_ptr<const FadingModel> fading,
                            const NormalizedLocation& loc, const QuadratureConfig& q = {});

/// Probability that no relay qualifies: exp(-nbar * Gbar).
Estimate analytic_outage(const SystemParams& params, const FadingModel& fading,
                         const QuadratureConfig& q = {});

/// Two fixed relays with qualification z1 >= z2. Returns (P1/P_R, P2/P_R).
std::pair<double, double> two_relay_pavg(double z1, double z2, double beta);

/// Pr{T1 >= T2} for timers uniform on [0, z1] and [0, z2], z1 >= z2.
double timer_order_prob(double z1, double z2);

}  // namespace fairrelay
