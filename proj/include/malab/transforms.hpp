#pragma once

#include "malab/analytic.hpp"
#include "malab/field.hpp"

#include <vector>

namespace malab {

/// u*(xi) = max over field nodes of (x . xi - u(x)), sampled on a box domain covering `dual`.
ScalarField legendre_full(const ScalarField& field, const Grid& dual);

/// max over interior primal nodes of |u**(x) - u(x)| with u** computed back from the dual samples.
double legendre_involution_error(const ScalarField& field, const ScalarField& dual);

/// Partial Legendre transform in x_1 of a 2D field, one transform per x_n row of nodes:
/// ubar(p, x_n) = max_{x_1} (p x_1 - u(x_1, x_n)), sampled on a uniform p grid.
struct PartialLegendre {
  std::vector<double> p;        // slopes
  std::vector<double> xn;       // row heights
  std::vector<double> values;   // row-major, values[j * p.size() + i]
  [[nodiscard]] double at(std::size_t i, std::size_t j) const { return values[j * p.size() + i]; }
};

/// Throws ErrorKind::multivalued when a row is not strictly convex in x_1 and ErrorKind::domain for
/// 3D fields. Rows with fewer than 5 interior nodes are skipped.
PartialLegendre partial_legendre_2d(const ScalarField& field, int p_samples = 41);

/// max |ubar_yy + y^alpha ubar_pp| over interior (p, y) samples, by central differences.
double grushin_residual(const PartialLegendre& pl, double alpha);

/// Exact transform of U0 in 2D and its second derivatives.
double partial_legendre_u0(double p, double y, double alpha);
/// Second derivatives (ubar_pp, ubar_yy) of the partial transform from the Hessian of u at a point.
std::pair<double, double> partial_legendre_second_derivatives(const Mat& hessian_2d);
/// ubar_yy + y^alpha ubar_pp computed from the Hessian of u; vanishes when det D^2 u = y^alpha.
double grushin_residual_from_hessian(const Mat& hessian_2d, double y, double alpha);

/// Level set graph: x_n = -v(x', s) on {u = s}.
struct LevelSetSample {
  Vec xprime = Vec::Zero();
  double s = 0.0;
  double v = 0.0;
  double v_s = 0.0;
  Vec grad_v = Vec::Zero();                  // v_1..v_{n-1}
  Eigen::MatrixXd hessian;                   // D^2 v in (x', s), n x n
};

/// Solves u(x', -v) = s for v by bisection on x_n in [lo, hi] to 1e-12 and differentiates implicitly.
/// Throws ErrorKind::monotonicity if u is not strictly increasing in x_n on [lo, hi] (one-sided checks)
/// and ErrorKind::domain if s is not bracketed.
LevelSetSample level_set_point(const SmoothFunction& u, const Vec& xprime, double s, double lo, double hi);

/// Samples of the graph over a patch of x' points at fixed s; asserts convexity of v in x' by second
/// differences along each axis of the patch (ErrorKind::precondition otherwise).
std::vector<LevelSetSample> level_set_graph(const SmoothFunction& u, const std::vector<Vec>& patch, double s,
                                            double lo, double hi);

/// Gauss curvature of the graph of u by three routes: the normal map Jacobian, nu_{n+1}^{n+2} det D^2 u,
/// and (-nu_n)^{n+2} det D^2 v through the level set graph.
struct GaussIdentity {
  double normal_map = 0.0;
  double graph = 0.0;
  double level_set = 0.0;
  double weighted_lhs = 0.0;  // u_n^alpha det D^2 u
  double weighted_rhs = 0.0;  // |v_s|^-(n+2+alpha) det D^2 v
  [[nodiscard]] double max_deviation() const;
};
GaussIdentity gauss_identity(const SmoothFunction& u, const Vec& x, double alpha);

/// max over probed points of v_11 |u - sigma x_n|, on the patch {u - sigma x_n < 0} sampled on a grid of
/// `resolution` points per axis inside `box`. Context: max_u_n, max_abs_v1, depth (max |w|), half_width,
/// normalized (max * half_width^2 / depth^2).
MonitorReport levelset_pogorelov_monitor(const SmoothFunction& u, double sigma, const Box& box, int resolution);

}  // namespace malab
