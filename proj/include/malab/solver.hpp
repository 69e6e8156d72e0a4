#pragma once

#include "malab/field.hpp"
#include "malab/monitor.hpp"
#include "malab/stencil.hpp"

#include <optional>
#include <string>
#include <vector>

namespace malab {

enum class RhsMode { degenerate_distance, explicit_function, eigen };

/// Right-hand side of det D^2 u = f.
///   degenerate_distance  f = g * d^alpha with d the distance to the boundary
///   explicit_function    f given pointwise
///   eigen                f = lambda^n |u_prev|^n at the nodes
struct RhsSpec {
  RhsMode mode = RhsMode::degenerate_distance;
  double alpha = 0.0;
  PointFunction g;         // defaults to 1
  PointFunction function;  // explicit mode
  double lambda = 1.0;     // eigen mode
  std::vector<double> previous;

  static RhsSpec degenerate(double alpha, PointFunction g = {});
  static RhsSpec explicit_rhs(PointFunction f);
  static RhsSpec eigen(double lambda, std::vector<double> previous);
};

/// Samples f at every node (zero off the interior). Throws ErrorKind::input on negative or
/// non-finite samples.
std::vector<double> sample_rhs(const RhsSpec& rhs, const ScalarField& field);

enum class SweepOrder { lexicographic, red_black };
enum class SolveMethod { newton, gauss_seidel };

struct SolverConfig {
  int stencil_width = 2;
  int max_iters = 200;
  double tol_residual = 1e-10;
  double damping = 1.0;
  SweepOrder sweep_order = SweepOrder::lexicographic;
  SolveMethod method = SolveMethod::newton;
};

enum class SolveStatus { converged, diverged };

std::string to_string(SweepOrder order);
std::string to_string(SolveMethod method);
std::string to_string(SolveStatus status);

struct SolveReport {
  SolveStatus status = SolveStatus::diverged;
  int iterations = 0;
  double residual_sup = 0.0;
  bool convexity_flag = false;
  double wall_ms = 0.0;
};

struct SolveResult {
  ScalarField field;
  SolveReport report;
};

/// Monotone wide-stencil value at an interior node: the minimum over orthogonal frames of the
/// product of positive parts of the directional second differences.
double discrete_ma_operator(const ScalarField& field, std::size_t node, const SolverConfig& config);

/// Solves det D^2 u = rhs with u = boundary_trace on the boundary. Non-convergence is reported
/// through the status, never thrown.
SolveResult solve_dirichlet(const ConvexDomain& domain, const Grid& grid, const RhsSpec& rhs,
                            const PointFunction& boundary_trace, const SolverConfig& config,
                            const std::optional<ScalarField>& initial = std::nullopt);

/// solve_dirichlet seeded by the same problem solved on grids coarsened by factors of 2 (at most `levels`
/// times, stopping before a coarse grid falls below 16 cells across the domain), each level interpolated
/// onto the next. The report's iterations and wall time count the finest solve only.
SolveResult solve_dirichlet_nested(const ConvexDomain& domain, const Grid& grid, const RhsSpec& rhs,
                                   const PointFunction& boundary_trace, const SolverConfig& config, int levels = 3);

/// Sup and L1 (cell-volume weighted) norms of operator minus rhs over interior nodes.
/// The report's context carries "l1" and "interior_nodes".
MonitorReport residual_report(const ScalarField& field, const RhsSpec& rhs, const SolverConfig& config);

struct EigenResult {
  double lambda = 0.0;
  ScalarField field;
  SolveReport report;
  std::vector<double> lambda_history;
};

struct EigenConfig {
  SolverConfig solver;
  int max_outer = 200;
  double tol_lambda = 1e-8;
};

/// Inverse iteration for (det D^2 u)^(1/n) = lambda |u| with zero boundary data. The optional
/// initial guess defaults to -d.
EigenResult solve_eigen(const ConvexDomain& domain, const Grid& grid, const EigenConfig& config,
                        const std::optional<std::vector<double>>& initial = std::nullopt);

struct IntervalEigenResult {
  double lambda = 0.0;
  std::vector<double> x, u;
  int iterations = 0;
  bool converged = false;
};

/// One-dimensional reduction u'' = lambda |u| on (-1, 1) with u(+-1) = 0 on `nodes` nodes.
IntervalEigenResult solve_eigen_interval(int nodes, int max_iters = 500, double tol = 1e-12);

/// Worker count from the MALAB_THREADS environment variable (default 1).
int thread_count();

}  // namespace malab
