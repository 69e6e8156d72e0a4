#pragma once

#include "malab/geometry.hpp"

#include <string>
#include <vector>

namespace malab {

enum class ShapeKind { slab, ball, half_ball, superellipse, polytope };

std::string to_string(ShapeKind kind);
ShapeKind shape_from_string(const std::string& name);

/// Closed half-space { x : normal . x <= offset } with unit normal.
struct Halfspace {
  Vec normal;
  double offset;
};

struct Box {
  Vec lower = Vec::Zero();
  Vec upper = Vec::Zero();
};

/// A bounded (or, for slabs, possibly unbounded) convex region in dimension 2 or 3 with a
/// marked boundary point carrying an interior tangent ball.
///
/// Shapes:
///   slab          {|x_i| < half_width for i < n, 0 < x_n < height}; infinite parameters allowed
///   ball          {|x - center| < radius}
///   half_ball     {|x| < radius, x_n > 0}
///   superellipse  {sum_i |(x_i - c_i) / a_i|^p < 1}, p >= 1
///   polytope      interior of the convex hull of a vertex list
class ConvexDomain {
public:
  static ConvexDomain slab(int dim, double half_width, double height);
  static ConvexDomain ball(int dim, double radius, const Vec& center);
  /// Ball of the given radius centered at radius * e_n, tangent to {x_n = 0} at the origin.
  static ConvexDomain tangent_ball(int dim, double radius);
  static ConvexDomain half_ball(int dim, double radius);
  static ConvexDomain superellipse(int dim, const Vec& semi_axes, double exponent, const Vec& center);
  static ConvexDomain polytope(int dim, std::vector<Vec> vertices);
  static ConvexDomain box(int dim, const Vec& lower, const Vec& upper);

  [[nodiscard]] int dimension() const { return dim_; }
  [[nodiscard]] ShapeKind shape() const { return shape_; }
  [[nodiscard]] const Vec& marked_point() const { return marked_; }
  [[nodiscard]] double tangent_ball_radius() const { return rho_; }
  [[nodiscard]] bool bounded() const;
  [[nodiscard]] Box bounding_box() const;

  /// Overrides the marked point and the tangent ball radius (must describe a boundary point).
  void set_marked_point(const Vec& x, double rho);

  /// Signed inside margin: equals the distance to the boundary for points of the closure
  /// (exact for all shapes but the superellipse, where it only carries the sign), negative outside.
  [[nodiscard]] double margin(const Vec& x) const;
  [[nodiscard]] bool contains(const Vec& x, double tol = 0.0) const { return margin(x) >= -tol; }

  /// Euclidean distance to the boundary; throws ErrorKind::domain for points outside.
  [[nodiscard]] double boundary_distance(const Vec& x) const;

  /// Largest t in [0, t_max] with x + s * dir inside the closure for all s <= t.
  [[nodiscard]] double ray_exit(const Vec& x, const Vec& dir, double t_max) const;

  /// Face planes (polytopes and slabs with finite parameters only).
  [[nodiscard]] const std::vector<Halfspace>& faces() const { return faces_; }

private:
  ConvexDomain() = default;
  void build_polytope_faces();
  [[nodiscard]] double superellipse_distance(const Vec& x) const;
  [[nodiscard]] double superellipse_level(const Vec& x) const;

  int dim_ = 2;
  ShapeKind shape_ = ShapeKind::ball;
  double radius_ = 1.0;
  double half_width_ = 0.0;
  double height_ = 0.0;
  double exponent_ = 2.0;
  Vec center_ = Vec::Zero();
  Vec semi_axes_ = Vec::Ones();
  std::vector<Vec> vertices_;
  std::vector<Halfspace> faces_;
  Vec marked_ = Vec::Zero();
  double rho_ = 0.0;
};

}  // namespace malab
