#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "fraclap/fraclap_ops.hpp"
#include "fraclap/lattice_walk.hpp"
#include "fraclap/stats.hpp"
#include "fraclap/symbol.hpp"

namespace fraclap {

enum class ExperimentKind { walk, evolve, symbol, operators, converge, moments };

const char* to_string(ExperimentKind k);
std::optional<ExperimentKind> parse_kind(const std::string& s);

/// Every tunable of every experiment. Keys in the JSON config file and in
/// `--set key=value` are the member names below.
struct ExperimentConfig {
  ExperimentKind kind = ExperimentKind::converge;

  // kernel
  int n = 1;
  double alpha = 1.0;
  std::int64_t radius = 0;  // 0: per-experiment default

  // continuum grid
  double L = 6.283185307179586;
  int P = 1024;

  // lattice
  std::int64_t M = 0;  // 0: per-experiment default
  std::vector<double> h = {0.2, 0.1, 0.05};
  double box_length = 1000.0;  // physical half-width of the converge boxes
  std::string step_method = "auto";

  // time and initial condition
  double T = 1.0;
  std::string initial = "bump";
  double bump_width = 1.0;

  // Monte Carlo
  std::uint64_t N = 100000;
  std::uint64_t seed = 20240917;
  std::uint64_t steps = 50;
  unsigned threads = 1;

  // converge
  std::string reference = "charfn";
  std::vector<double> xi = {0.5, 1.0, 2.0};
  std::string norm = "sup";
  double leak_cap = 1e-3;
  double order_min = 0.3;

  // moments
  std::vector<double> beta = {0.5, 1.0};
  std::vector<std::int64_t> moment_radii = {100, 400, 1600, 6400, 25600, 102400, 409600, 1638400};

  // symbol
  double eps = 1e-3;
  double r_out = 50.0;
  int angular_nodes = 0;
  int min_oscillations = 32;
  std::vector<double> xi_magnitudes = {0.5, 1.0, 2.0, 4.0};

  // operators
  std::string test_function = "cos";
  double a_multiplier = 1.0;
  double rel_tol = 0.01;

  SymbolConfig symbol_config() const;
};

nlohmann::json to_json(const ExperimentConfig& c);

/// FNV-1a 64 of the canonical JSON dump, as 16 hex digits.
std::string config_hash(const ExperimentConfig& c);

struct ConfigResult {
  ExperimentConfig config;
  std::vector<std::string> errors;
  bool ok() const { return errors.empty(); }
};

/// Defaults, then the file object, then each "key=value" override (value
/// parsed as JSON when possible, else taken as a string). All problems are
/// collected; nothing throws.
ConfigResult load_config(ExperimentKind kind, const nlohmann::json& file,
                         const std::vector<std::string>& overrides);

struct ConvergenceRow {
  double h = 0.0;
  std::int64_t half_width = 0;
  std::int64_t radius = 0;
  std::uint64_t steps = 0;
  double time = 0.0;  // T rounded to a whole number of steps
  double continuum_time = 0.0;
  double error = 0.0;
  double leaked = 0.0;
};

struct ConvergenceReport {
  std::string reference;
  double a_value = 0.0;
  double a_error = 0.0;
  std::vector<ConvergenceRow> rows;
  double order = 0.0;
  bool monotone = false;
  bool leak_ok = false;
  bool pass = false;
  std::string message;
};

ConvergenceReport run_converge(const ExperimentConfig& c);

struct OperatorsReport {
  double a_value = 0.0;
  double a_error = 0.0;
  double a_used = 0.0;
  double worst_relative_error = 0.0;
  bool pass = false;
  GridFunction spectral;
  GridFunction quadrature_over_a;
};

OperatorsReport run_operators(const ExperimentConfig& c);

struct WalkReport {
  LatticeDistribution empirical;
  LatticeDistribution master;
  double tv = 0.0;
  double envelope = 0.0;
  std::size_t occupied = 0;
  ChiSquareResult chi_square;
  bool pass = false;
};

WalkReport run_walk(const ExperimentConfig& c);

struct EvolveReport {
  LatticeDistribution initial;
  LatticeDistribution final;
  std::vector<double> beta_probes;  // α·{1/4, 1/2, 3/4}
  bool pass = false;                // leaked <= leak_cap
};

EvolveReport run_evolve(const ExperimentConfig& c);

struct SymbolReport {
  ConstantEstimate a;
  /// Homogeneity along e_1, then along the diagonal when n >= 2.
  std::vector<HomogeneityReport> rays;
  std::vector<std::string> ray_labels;
  double max_deviation = 0.0;
  bool pass = false;  // max_deviation <= rel_tol
};

SymbolReport run_symbol(const ExperimentConfig& c);

struct MomentsRow {
  double beta = 0.0;
  std::vector<double> partials;  // at c.moment_radii
  MomentClass analytic = MomentClass::convergent;
  /// log(D_last / D_prev) / log(r_last / r_prev) over the last two increments.
  double growth_exponent = 0.0;
  MomentClass empirical = MomentClass::convergent;
};

/// Empirical class from partial sums at >= 3 increasing radii: DIVERGENT iff
/// the increments decay slower than r^{-0.05}.
MomentClass empirical_moment_class(std::span<const std::int64_t> radii,
                                   std::span<const double> partials, double* growth = nullptr);

std::vector<MomentsRow> run_moments(const ExperimentConfig& c);

/// Result of a full CLI run. Exit codes: 0 pass, 1 quantitative failure,
/// 2 configuration or output error.
struct RunOutcome {
  int exit_code = 0;
  std::string message;
};

/// Runs the experiment and writes its CSV/JSON outputs and `run.log` into
/// `out_dir`. Data files are byte-identical across runs with the same
/// config; only run.log carries timestamps.
RunOutcome run_experiment(const ExperimentConfig& c, const std::filesystem::path& out_dir);

}  // namespace fraclap
