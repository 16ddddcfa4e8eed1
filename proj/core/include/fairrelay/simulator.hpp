#pragma once

// Monte Carlo ground truth over a Poisson relay field.
//
// Every trial draws from counter-based substreams keyed by (seed, trial,
// stream): stream 0 is the random field and stream 1 + k is probe k. A probe
// is a deterministic extra relay added after the field, so on exact ties the
// field relay wins. Worker threads only add integer counts, so results are a
// pure function of the seed and inputs.
//
// Field points are generated outward from the midpoint, so growing the
// region only appends points. Per relay the draws are: position, S-R
// fading, then R-D fading only if the source link passed, then the timer
// variable D only if both passed. The draw sequence never depends on the
// scheme, so outage indicators agree across schemes trial by trial.

#include <cstdint>
#include <optional>
#include <vector>

#include "fairrelay/model.hpp"
#include "fairrelay/scheme.hpp"

namespace fairrelay {

/// Disc centered at the S-D midpoint (0.5, 0).
struct SimRegion {
  double radius = 3.0;

  /// Smallest radius at which Z < 1e-9 everywhere on the boundary.
  static double r_min(const SystemParams& params, const FadingModel& fading);
  /// Disc of radius max(3, r_min).
  static SimRegion for_params(const SystemParams& params, const FadingModel& fading);
  /// Throws std::invalid_argument if the radius is below r_min.
  void validate(const SystemParams& params, const FadingModel& fading) const;
  double area() const;
};

struct RelayRealization {
  NormalizedLocation loc{};
  double omega_sr = 0.0;
  double omega_rd = 0.0;  ///< NaN when the source link failed (never drawn)
  bool qualified = false;
  std::optional<double> timer;  ///< timer-based schemes, qualified relays only
};

struct ProbeSpec {
  NormalizedLocation loc{};
};

struct McEstimate {
  double mean = 0.0;
  double std_error = 0.0;
  std::uint64_t trials = 0;
  std::uint64_t seed = 0;
  std::uint64_t successes = 0;

  static McEstimate from_counts(std::uint64_t successes, std::uint64_t trials, std::uint64_t seed);
};

struct SelectionOutcome {
  std::vector<RelayRealization> relays;  ///< field relays, then the probe if any
  std::size_t qualified_count = 0;
  std::optional<std::size_t> selected;  ///< index into relays
  bool probe_present = false;
  bool probe_qualified = false;
  bool probe_selected = false;
  bool outage = true;
};

struct SimOptions {
  std::optional<SimRegion> region;  ///< default: SimRegion::for_params
  int workers = 1;
};

/// Poisson field over the region, in order of increasing distance from the
/// midpoint.
std::vector<NormalizedLocation> sample_field(const SystemParams& params, const SimRegion& region, Rng& rng);

/// Index of the selected relay among the qualified ones, lowest index on ties.
std::optional<std::size_t> select_relay(const Scheme& scheme, const SystemParams& params,
                                        const std::vector<RelayRealization>& relays);

/// One full trial with every relay recorded.
SelectionOutcome realize_and_select(const SystemParams& params, const FadingModel& fading, const Scheme& scheme,
                                    const SimRegion& region, const std::optional<ProbeSpec>& probe,
                                    std::uint64_t seed, std::uint64_t trial);

/// Outage indicator of each trial under the given scheme.
std::vector<bool> outage_sequence(const SystemParams& params, const FadingModel& fading, const Scheme& scheme,
                                  std::uint64_t trials, std::uint64_t seed, const SimOptions& options = {});

struct BatchResult {
  /// cooperation[s][p]: probe p selected under scheme s.
  std::vector<std::vector<McEstimate>> cooperation;
  McEstimate outage;
};

/// Runs schemes x probes on shared fields.
BatchResult estimate_batch(const SystemParams& params, const FadingModel& fading,
                           const std::vector<Scheme>& schemes, const std::vector<ProbeSpec>& probes,
                           std::uint64_t trials, std::uint64_t seed, const SimOptions& options = {});

McEstimate estimate_cooperation(const SystemParams& params, const FadingModel& fading, const Scheme& scheme,
                                const ProbeSpec& probe, std::uint64_t trials, std::uint64_t seed,
                                const SimOptions& options = {});

McEstimate estimate_outage(const SystemParams& params, const FadingModel& fading, std::uint64_t trials,
                           std::uint64_t seed, const SimOptions& options = {});

/// Cartesian lattice with S at (0, 0) and D at (1, 0).
struct Lattice {
  double x_min = -1.0;
  double x_max = 2.0;
  std::size_t nx = 81;
  double y_min = 0.0;
  double y_max = 1.5;
  std::size_t ny = 41;

  double x(std::size_t i) const;
  double y(std::size_t j) const;
  /// Throws std::invalid_argument on bad sizes or a node on S or D.
  void validate() const;
};

struct ContourGrid {
  Scheme scheme{};
  Lattice lattice{};
  std::vector<McEstimate> cells;  ///< row-major: cells[j * nx + i]

  const McEstimate& at(std::size_t i, std::size_t j) const { return cells[j * lattice.nx + i]; }
};

std::vector<ContourGrid> contour_grids(const SystemParams& params, const FadingModel& fading,
                                       const std::vector<Scheme>& schemes, const Lattice& lattice,
                                       std::uint64_t trials_per_cell, std::uint64_t seed,
                                       const SimOptions& options = {});

ContourGrid contour_grid(const SystemParams& params, const FadingModel& fading, const Scheme& scheme,
                         const Lattice& lattice, std::uint64_t trials_per_cell, std::uint64_t seed,
                         const SimOptions& options = {});

/// Brute-force check of the two-relay closed forms.
struct TwoRelayEstimate {
  McEstimate first;   ///< relay 1 selected
  McEstimate second;  ///< relay 2 selected
  McEstimate order;   ///< T1 >= T2 for timers uniform on [0, z1] and [0, z2]
};

TwoRelayEstimate simulate_two_relay(double z1, double z2, double beta, std::uint64_t trials, std::uint64_t seed,
                                    int workers = 1);

}  // namespace fairrelay
