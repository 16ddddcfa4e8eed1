#pragma once

// Experiment pipelines behind the command-line front end. Scenario inputs
// arrive in dB and are converted exactly once, in Scenario::params().
//
// Every pipeline returns tables plus a JSON sidecar describing the resolved
// configuration. Nothing in the output depends on the worker count or on
// wall-clock time, so reruns are byte-identical.

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "fairrelay/analytic.hpp"
#include "fairrelay/simulator.hpp"

namespace fairrelay::experiments {

double db_to_linear(double db);
double linear_to_db(double linear);

enum class Engine { analytic, mc, both };
Engine parse_engine(const std::string& name);
std::string engine_name(Engine engine);
inline bool uses_analytic(Engine e) { return e != Engine::mc; }
inline bool uses_mc(Engine e) { return e != Engine::analytic; }

/// Scenario with the dB fields as given by the user.
struct Scenario {
  double gamma_sr_db = 20.0;
  double gamma_rd_db = 20.0;
  double theta_r_db = 5.0;
  double theta_d_db = 5.0;
  double alpha = 4.0;
  double nbar = 2.0;

  SystemParams params() const;
  nlohmann::ordered_json to_json() const;
};

/// User input. Unset optionals fall back to the defaults of the command.
struct ExperimentConfig {
  std::optional<double> gamma_sr_db;
  std::optional<double> gamma_rd_db;
  std::optional<double> theta_r_db;
  std::optional<double> theta_d_db;
  std::optional<double> alpha;
  std::optional<double> nbar;
  std::string scheme = "proposed";
  std::optional<double> beta;  ///< proposed scheme; defaults to the minimax optimum
  std::optional<Engine> engine;
  std::string sweep;  ///< one of z_x, a, b, nbar, beta, gamma_db; empty for none
  std::vector<double> values;
  std::optional<std::uint64_t> trials;
  std::uint64_t seed = 1;
  std::optional<double> region_radius;
  bool paper_literal = false;
  int workers = 1;
  std::optional<double> z_x;
  double a = 0.5;
  double b = 0.5;
  double rel_tol = 1e-6;
  double singularity_margin = 1e-4;

  /// Throws std::invalid_argument.
  void validate() const;
  Scenario scenario(const Scenario& defaults) const;
  QuadratureConfig quadrature() const;
  SimOptions sim_options() const;
};

using Cell = std::variant<std::monostate, double, std::int64_t, std::string>;

struct Table {
  std::vector<std::string> comments;  ///< written as leading "# " lines
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;

  std::size_t column(const std::string& name) const;
  /// Numeric cell; NaN for an empty one.
  double number(std::size_t row, const std::string& name) const;
};

struct OutputFile {
  std::string suffix;  ///< empty for the main file
  Table table;
};

struct RunOutput {
  std::vector<OutputFile> files;
  nlohmann::ordered_json sidecar;
  std::vector<std::string> warnings;

  const Table& table(const std::string& suffix = "") const;
};

/// Formats a number so that parsing it back yields the same double.
std::string format_number(double v);
void write_csv(const Table& table, std::ostream& os);
/// Main table at `path`, extra tables at <stem>_<suffix><ext>, sidecar at
/// <path>.json. With an empty path the tables go to `fallback`.
void write_outputs(const RunOutput& out, const std::string& path, std::ostream& fallback);

RunOutput run_pavg(const ExperimentConfig& cfg, Engine default_engine);
RunOutput run_outage(const ExperimentConfig& cfg, Engine default_engine);
RunOutput run_optimize_beta(const ExperimentConfig& cfg);
RunOutput run_contour(const ExperimentConfig& cfg);

RunOutput run_fig3(const ExperimentConfig& cfg);
RunOutput run_fig4(const ExperimentConfig& cfg);
RunOutput run_fig5(const ExperimentConfig& cfg);
RunOutput run_fig6(const ExperimentConfig& cfg);
RunOutput run_fig7(const ExperimentConfig& cfg);

/// max - min of the values whose z is at least z_from.
double flatness(const std::vector<double>& z, const std::vector<double>& values, double z_from = 0.5);
/// Number of cells whose mean exceeds the threshold.
std::size_t cells_above(const ContourGrid& grid, double threshold);

/// The qualification grid used by the z_x figures: 25 points up to the peak.
std::vector<double> figure_z_grid(const SystemParams& params, const FadingModel& fading, std::size_t points = 25);

}  // namespace fairrelay::experiments
