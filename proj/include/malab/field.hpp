#pragma once

#include "malab/domain.hpp"
#include "malab/grid.hpp"

#include <cstdint>
#include <memory>
#include <span>
#include <vector>

namespace malab {

enum class NodeKind : std::uint8_t { interior, boundary, exterior };

/// One side of a grid second difference. Arms that leave the domain are cut at the boundary
/// and carry the trace there.
struct Arm {
  double length = 0.0;
  double value = 0.0;
  std::ptrdiff_t node = -1;  // neighbor node when the arm ends on a grid node
  bool cut = false;
};

/// Second difference along an integer direction with possibly unequal arms:
/// delta = plus.w * u(+) + minus.w * u(-) + center_weight * u(center).
struct SecondDifference {
  Arm plus, minus;
  double plus_weight = 0.0, minus_weight = 0.0, center_weight = 0.0;
};

SecondDifference make_second_difference(const Arm& plus, const Arm& minus);

/// Node classification shared by all fields on the same (domain, grid) pair.
struct Layout {
  std::vector<NodeKind> kinds;
  std::vector<std::size_t> interior;
};

/// Convex function sampled on a grid: unknowns at interior nodes, the trace on boundary nodes
/// and at cut points, NaN outside. Immutable once built.
class ScalarField {
public:
  ScalarField(ConvexDomain domain, Grid grid, PointFunction trace, std::vector<double> values);

  [[nodiscard]] const ConvexDomain& domain() const { return domain_; }
  [[nodiscard]] const Grid& grid() const { return grid_; }
  [[nodiscard]] int dimension() const { return grid_.dimension(); }
  [[nodiscard]] const PointFunction& trace() const { return trace_; }
  [[nodiscard]] NodeKind kind(std::size_t k) const { return layout_->kinds[k]; }
  [[nodiscard]] const std::vector<std::size_t>& interior_nodes() const { return layout_->interior; }
  [[nodiscard]] std::span<const double> values() const { return values_; }
  [[nodiscard]] double value(std::size_t k) const { return values_[k]; }
  [[nodiscard]] bool convexity_flag() const { return convex_; }
  /// max - min over non-exterior nodes.
  [[nodiscard]] double range() const;

  /// Same domain, grid and trace with new nodal values (boundary values are re-imposed).
  [[nodiscard]] ScalarField with_values(std::vector<double> values) const;

  /// Arm from node k along the integer direction v (physical step v * spacing).
  [[nodiscard]] Arm arm(std::size_t k, const Index3& v) const;
  [[nodiscard]] SecondDifference second_difference(std::size_t k, const Index3& v) const;
  /// Evaluates a second difference with the current nodal values.
  [[nodiscard]] double apply(const SecondDifference& d, double center) const;

  /// Multilinear interpolation; corners outside the domain are dropped and the weights renormalized.
  [[nodiscard]] double value_at(const Vec& x) const;

private:
  ScalarField(ConvexDomain domain, Grid grid, PointFunction trace, std::shared_ptr<const Layout> layout,
              std::vector<double> values);
  void finalize();

  ConvexDomain domain_;
  Grid grid_;
  PointFunction trace_;
  std::shared_ptr<const Layout> layout_;
  std::vector<double> values_;
  bool convex_ = false;
};

/// Classifies nodes: boundary within 1e-6 spacing of the boundary, interior inside, exterior otherwise.
std::shared_ptr<const Layout> classify_nodes(const ConvexDomain& domain, const Grid& grid);

/// Samples interior_init at interior nodes and the trace on the boundary.
/// Throws ErrorKind::resolution when the spacing exceeds a quarter of the tangent ball radius and
/// ErrorKind::domain when the grid does not cover the domain.
ScalarField build_field(const ConvexDomain& domain, const Grid& grid, const PointFunction& interior_init,
                        const PointFunction& boundary_trace);

/// Discrete convexity: every second difference along the width-2 (2D) or width-1 (3D) directions
/// is at least -1e-8 * range at every interior node.
bool check_convexity(const ScalarField& field);

/// Central-difference Hessian at x (cross terms by diagonal differences). Throws
/// ErrorKind::near_boundary when x is within two cells of the boundary.
Mat numerical_hessian(const ScalarField& field, const Vec& x);

}  // namespace malab
