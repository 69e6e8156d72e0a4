#pragma once

#include <Eigen/Core>

#include <vector>

namespace malab {

using Point2 = Eigen::Vector2d;

/// Counter-clockwise convex hull (Andrew's monotone chain); collinear points are dropped.
std::vector<Point2> convex_hull(std::vector<Point2> points);

/// Ellipse {center + B u : |u| <= 1} with B symmetric positive definite.
struct Ellipse {
  Point2 center = Point2::Zero();
  Eigen::Matrix2d shape = Eigen::Matrix2d::Identity();

  /// Semiaxes in ascending order with matching unit directions as columns of `rotation`.
  void axes(Eigen::Vector2d& semiaxes, Eigen::Matrix2d& rotation) const;
  [[nodiscard]] double area() const;
  /// Gauge |B^-1 (x - center)|; points with gauge <= k lie in the k-fold dilation about the center.
  [[nodiscard]] double gauge(const Point2& x) const;
};

/// Maximum-area ellipse inscribed in a convex polygon (hull vertices, counter-clockwise), computed by a
/// log-barrier path on (center, B) with Newton steps; the barrier weight is driven from 1 to 1e-10.
Ellipse max_inscribed_ellipse(const std::vector<Point2>& hull);

}  // namespace malab
