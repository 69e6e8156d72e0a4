#pragma once

#include "malab/field.hpp"
#include "malab/monitor.hpp"

#include <Eigen/Core>

#include <vector>

namespace malab {

/// Sublevel set S_h(x0) = {u < u(x0) + p.(x - x0) + h} of a sampled field.
///
/// The measure integrates {phi < 0}, phi = u - plane - h, exactly on the piecewise-linear (2D, two
/// triangles per cell) or trilinear (3D, 4^3 subsamples per cell) interpolant; cells cut by the domain
/// boundary are subsampled (8x8 in 2D) against the domain itself. Mass pieces are kept so the center
/// can be recomputed after an affine map.
struct Section {
  int dimension = 2;
  Vec base_point = Vec::Zero();
  Vec slope = Vec::Zero();
  double height = 0.0;
  double base_value = 0.0;
  double spacing = 0.0;

  std::vector<Vec> nodes;
  std::vector<Vec> mass_points;
  std::vector<double> mass_weights;
  double measure = 0.0;
  Vec center = Vec::Zero();
  double d_h = 0.0;

  // phi on the index box [patch_lo, patch_hi] around the node set; NaN outside the domain.
  Index3 patch_lo = Index3::Zero(), patch_hi = Index3::Zero();
  std::vector<double> phi;
  ConvexDomain domain = ConvexDomain::half_ball(2, 1.0);

  [[nodiscard]] double phi_at(const Index3& m) const;
  [[nodiscard]] bool in_patch(const Index3& m) const;
};

/// Throws ErrorKind::input for h <= 0, ErrorKind::domain for x0 outside the closure,
/// ErrorKind::too_small when the node set spans fewer than 3 nodes along some axis and
/// ErrorKind::degenerate_section when the node set is not connected.
Section compute_section(const ScalarField& field, const Vec& x0, const Vec& slope, double h);

/// x -> x - tau x_n; the identity on {x_n = 0} with unit determinant.
struct SlidingMap {
  int dimension = 2;
  Vec tau = Vec::Zero();
  [[nodiscard]] Vec apply(const Vec& x) const;
  [[nodiscard]] Vec inverse(const Vec& x) const;
};

/// tau = x*' / d_h. Throws ErrorKind::degenerate_section when d_h is not positive (below 1e-9 grid spacings).
SlidingMap sliding_from_center(const Section& section);

/// Center of mass of the section's image under the map.
Vec mapped_center(const Section& section, const SlidingMap& map);

/// Maximum-volume ellipsoid inscribed in the slice S_h cap {x_n = level}: ascending semiaxes, their
/// directions as columns of `rotation` (x' coordinates) and the center. `containment` is the largest
/// gauge of a slice hull vertex, at most n - 1 by John's theorem (asserted).
struct SliceAxes {
  std::vector<double> semiaxes;
  Eigen::MatrixXd rotation;
  Eigen::VectorXd center;
  double containment = 1.0;
};

/// Throws ErrorKind::empty_slice when fewer than 2(n-1)+1 nodes of the level lie in the section.
SliceAxes slice_john_axes(const Section& section, double level);

/// d_n = (h^n / prod d_i^2)^(1/(2+alpha)).
double dn_from_axes(const std::vector<double>& axes, double h, double alpha);

struct NormalizationRecord {
  double h = 0.0;
  Vec tau = Vec::Zero();
  std::vector<double> axes;
  double d_n = 0.0;
  double d_h = 0.0;
  double measure = 0.0;
  double volume_ratio = 0.0;  // |S_h|^2 d_h^alpha / h^n
};

/// compute_section -> sliding_from_center -> slice at d_h -> slice_john_axes -> dn_from_axes.
NormalizationRecord normalize_section(const ScalarField& field, const Vec& x0, double h, double alpha,
                                      const Vec& slope = Vec::Zero());

/// Least-squares slopes of log d_i, log d_n and log d_h against log h.
struct ScalingFit {
  std::vector<double> axis_slopes;
  double tangential_slope = 0.0;  // mean over the tangential axes
  double normal_slope = 0.0;      // d_n
  double dh_slope = 0.0;
  double r2 = 0.0;                // smallest coefficient of determination among the fits
};

/// Throws ErrorKind::insufficient_data for fewer than 4 records or less than two decades of h.
ScalingFit scaling_fit(const std::vector<NormalizationRecord>& records);

/// Geometric ladder h_max, h_max/2, ... down to 100 h_grid^2.
std::vector<double> h_ladder(double h_max, double h_grid);

/// u - b x_n with b = min over nodes with x_n > 0 of (u - u(0))/x_n, so the supporting plane at the
/// origin becomes zero.
ScalarField subtract_supporting_plane(const ScalarField& field);

struct TangentConeProfile {
  std::vector<Vec> directions;
  std::vector<double> lambdas;
  std::vector<std::vector<double>> estimates;  // [direction][lambda]: u(lambda e + lambda e_n) / lambda
  std::vector<double> gamma;                   // Richardson limit from the two smallest lambdas
};

/// Throws ErrorKind::resolution when a lambda is below two grid spacings and ErrorKind::input when
/// lambdas are not strictly decreasing.
TangentConeProfile tangent_cone_profile(const ScalarField& field, const std::vector<Vec>& directions,
                                        const std::vector<double>& lambdas);

/// max of u(x)/|x|^(4/3) over non-exterior nodes with 0 < |x| <= radius. Context: convexity_flag.
MonitorReport growth_envelope(const ScalarField& field, double radius = 0.5);

/// max over interior section nodes of (second difference along direction) * |w|, w = u - plane - h.
/// Context: max_abs_u1, depth (max |w|), half_width (section extent along the direction),
/// normalized (max * half_width^2 / height^2). Throws ErrorKind::precondition if w >= 0 at a section node.
MonitorReport pogorelov_monitor(const ScalarField& field, const Section& section, const Index3& direction);

/// max over nodes with x_n >= 4 h_grid and |x| <= radius of u_n / x_n^(1+alpha), u_n by the fourth-order
/// centered difference (nodes whose stencil leaves the domain are skipped). Context: bound = 1/(1+alpha),
/// nodes.
MonitorReport normal_derivative_monitor(const ScalarField& field, double alpha, double radius = 0.5);

}  // namespace malab
