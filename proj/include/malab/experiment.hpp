#pragma once

#include "malab/io.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace malab {

enum class ExperimentKind {
  dirichlet_convergence,
  localization_scaling,
  volume_invariant,
  eigen,
  monitors,
  verify_analytic,
  liouville_2d,
};

std::string to_string(ExperimentKind kind);
/// Throws ErrorKind::usage for unknown names.
ExperimentKind experiment_kind_from_string(const std::string& name);

/// One experiment of a manifest. `config` holds the kind-specific parameters (documented in the
/// README); `acceptance` maps metric names to [lower, upper] windows (null for an open end).
struct ExperimentSpec {
  std::string name;
  ExperimentKind kind = ExperimentKind::verify_analytic;
  Json config = Json::object();
  Json acceptance = Json::object();
  std::uint64_t seed = 1;
};

struct RunManifest {
  std::vector<ExperimentSpec> experiments;
  std::filesystem::path output_dir;
  std::string tool_version;
  std::string config_hash;  // FNV-1a of the canonical manifest text, 16 hex digits
};

/// Parses and validates a manifest: {tool_version?, output_dir?, experiments: [{name, kind, config,
/// acceptance, seed}]}. Names must be unique and non-empty. Throws ErrorKind::usage with the
/// offending key or the parser's line/column.
RunManifest parse_manifest(const std::string& text, const std::string& origin);

std::string tool_version();

struct AcceptanceCheck {
  std::string metric;
  double value = 0.0;
  std::optional<double> lower, upper;
  bool pass = false;
};

struct ExperimentOutcome {
  std::string name;
  ExperimentKind kind = ExperimentKind::verify_analytic;
  bool ok = false;      // ran without a module error
  bool passed = false;  // ok and every check passed
  bool usage_error = false;  // the failure came from the experiment's own configuration
  std::string error;
  Json metrics = Json::object();
  std::vector<AcceptanceCheck> checks;
  std::string csv;  // data table; header documented per kind
  double wall_ms = 0.0;
};

/// Runs one experiment; module errors are captured in the outcome, configuration errors in the
/// spec (unknown acceptance metric, inconsistent parameters) are too.
ExperimentOutcome run_experiment(const ExperimentSpec& spec);

/// Evaluates the acceptance windows against the metrics. Unknown metric names raise ErrorKind::configuration.
std::vector<AcceptanceCheck> evaluate_acceptance(const Json& acceptance, const Json& metrics);

struct RunResult {
  int exit_code = 0;  // 0 all passed, 1 some experiment failed, 2 some experiment config was malformed
  std::vector<ExperimentOutcome> outcomes;
};

/// Runs the manifest (optionally a single experiment) into `out`, one subdirectory per experiment
/// holding data.csv and summary.json, plus a run-level summary.json. Files are written atomically and
/// contain no timings, so identical manifests give identical bytes. Experiments run on up to
/// thread_count() workers. Progress lines go to `log` when given. Throws ErrorKind::usage when `only`
/// names no experiment.
RunResult run(const RunManifest& manifest, const std::filesystem::path& out, const std::optional<std::string>& only,
              std::ostream* log);

/// JSON text with every floating-point number printed to 17 significant digits.
std::string dump_json17(const Json& j, int indent = 2);

struct LiouvilleConfig {
  std::vector<double> lengths{2.0, 4.0, 8.0};
  double spacing = 0.0625;
  double alpha = 1.0;
  double window_half_width = 0.5;  // window [-a, a] x [0, b]
  double window_height = 1.0;
  double perturbation = 1.0;  // case 1 data: U0 + delta x_n (L^2 + x_1^2) / (2 L^3)
  SolverConfig solver;
};

struct LiouvilleRow {
  int data_case = 1;  // 1 growth-compliant, 2 non-uniqueness datum
  double length = 0.0;
  double deviation = 0.0;  // sup over window nodes of |u_L - U0|
  double gap = 0.0;        // sup over window nodes of |N - U0|
  int iterations = 0;
  double residual_sup = 0.0;
  bool converged = false;
};

struct LiouvilleReport {
  std::vector<LiouvilleRow> rows;
  std::vector<double> decay_case1;  // deviation(L/2) / deviation(L)
  std::vector<double> gap_ratio_case2;  // deviation / gap
};

/// Dirichlet problems det D^2 u = x_2^alpha on [-L, L] x [0, L]. Throws ErrorKind::configuration when
/// the window comes within one window size of the far boundary for some L, or the lengths are not
/// increasing.
LiouvilleReport liouville_2d_experiment(const LiouvilleConfig& config);

/// Exact |S_h|^2 d_h^alpha / h^2 for the boundary sections of U0 in 2D (independent of h), by quadrature.
double u0_volume_ratio_2d(double alpha);

}  // namespace malab
