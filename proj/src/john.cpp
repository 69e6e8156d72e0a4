#include "malab/john.hpp"

#include "malab/error.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace malab {

namespace {

double cross(const Point2& o, const Point2& a, const Point2& b) {
  return (a - o).x() * (b - o).y() - (a - o).y() * (b - o).x();
}

struct Halfplane {
  Point2 a;  // unit outward normal
  double b;
};

// Barrier objective on theta = (c_x, c_y, p, q, r), B = [[p, q], [q, r]]:
//   -log det B - mu sum log(b_i - a_i.c - |B a_i|)
struct Barrier {
  const std::vector<Halfplane>& faces;
  double mu;

  static Eigen::Matrix2d shape(const Eigen::Matrix<double, 5, 1>& t) {
    Eigen::Matrix2d m;
    m << t[2], t[3], t[3], t[4];
    return m;
  }

  [[nodiscard]] bool feasible(const Eigen::Matrix<double, 5, 1>& t) const {
    const double det = t[2] * t[4] - t[3] * t[3];
    if (!(t[2] > 0 && det > 0)) return false;
    const Eigen::Matrix2d B = shape(t);
    for (const auto& f : faces)
      if (!(f.b - f.a.dot(t.head<2>()) - (B * f.a).norm() > 0)) return false;
    return true;
  }

  [[nodiscard]] double value(const Eigen::Matrix<double, 5, 1>& t) const {
    const Eigen::Matrix2d B = shape(t);
    double v = -std::log(t[2] * t[4] - t[3] * t[3]);
    for (const auto& f : faces) v -= mu * std::log(f.b - f.a.dot(t.head<2>()) - (B * f.a).norm());
    return v;
  }

  void derivatives(const Eigen::Matrix<double, 5, 1>& t, Eigen::Matrix<double, 5, 1>& g, Eigen::Matrix<double, 5, 5>& H) const {
    g.setZero();
    H.setZero();
    const double p = t[2], q = t[3], r = t[4];
    const double D = p * r - q * q;
    const Eigen::Vector3d dD(r, -2.0 * q, p);
    Eigen::Matrix3d d2D;
    d2D << 0, 0, 1, 0, -2, 0, 1, 0, 0;
    g.tail<3>() = -dD / D;
    H.bottomRightCorner<3, 3>() = dD * dD.transpose() / (D * D) - d2D / D;

    const Eigen::Matrix2d B = shape(t);
    for (const auto& f : faces) {
      Eigen::Matrix<double, 2, 3> L;
      L << f.a.x(), f.a.y(), 0.0, 0.0, f.a.x(), f.a.y();
      const Eigen::Vector2d v = B * f.a;
      const double nv = v.norm();
      const double s = f.b - f.a.dot(t.head<2>()) - nv;
      Eigen::Matrix<double, 5, 1> ds;
      ds.head<2>() = -f.a;
      ds.tail<3>() = -L.transpose() * v / nv;
      Eigen::Matrix<double, 5, 5> d2s = Eigen::Matrix<double, 5, 5>::Zero();
      const Eigen::Matrix2d P = Eigen::Matrix2d::Identity() / nv - v * v.transpose() / (nv * nv * nv);
      d2s.bottomRightCorner<3, 3>() = -L.transpose() * P * L;
      g -= mu * ds / s;
      H += mu * (ds * ds.transpose() / (s * s) - d2s / s);
    }
  }
};

}  // namespace

std::vector<Point2> convex_hull(std::vector<Point2> pts) {
  std::sort(pts.begin(), pts.end(), [](const Point2& a, const Point2& b) { return a.x() < b.x() || (a.x() == b.x() && a.y() < b.y()); });
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  if (pts.size() < 3) return pts;
  std::vector<Point2> hull(2 * pts.size());
  std::size_t k = 0;
  for (const auto& p : pts) {
    while (k >= 2 && cross(hull[k - 2], hull[k - 1], p) <= 0) --k;
    hull[k++] = p;
  }
  for (std::size_t i = pts.size() - 1, t = k + 1; i-- > 0;) {
    while (k >= t && cross(hull[k - 2], hull[k - 1], pts[i]) <= 0) --k;
    hull[k++] = pts[i];
  }
  hull.resize(k - 1);
  return hull;
}

void Ellipse::axes(Eigen::Vector2d& semiaxes, Eigen::Matrix2d& rotation) const {
  const Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(shape);
  semiaxes = es.eigenvalues();
  rotation = es.eigenvectors();
}

double Ellipse::area() const { return std::numbers::pi * shape.determinant(); }

double Ellipse::gauge(const Point2& x) const { return shape.ldlt().solve(x - center).norm(); }

Ellipse max_inscribed_ellipse(const std::vector<Point2>& hull) {
  if (hull.size() < 3) throw Error(ErrorKind::empty_slice, "inscribed ellipse needs a polygon with interior");
  std::vector<Halfplane> faces;
  for (std::size_t i = 0; i < hull.size(); ++i) {
    const Point2& p = hull[i];
    const Point2& q = hull[(i + 1) % hull.size()];
    const Point2 d = q - p;
    const Point2 a = Point2(d.y(), -d.x()).normalized();
    faces.push_back({a, a.dot(p)});
  }
  Point2 c = Point2::Zero();
  for (const auto& p : hull) c += p;
  c /= static_cast<double>(hull.size());
  double depth = std::numeric_limits<double>::infinity();
  for (const auto& f : faces) depth = std::min(depth, f.b - f.a.dot(c));
  if (!(depth > 0)) throw Error(ErrorKind::empty_slice, "polygon has no interior");

  Eigen::Matrix<double, 5, 1> t;
  t << c.x(), c.y(), 0.5 * depth, 0.0, 0.5 * depth;
  for (double mu = 1.0; mu >= 1e-10; mu *= 0.1) {
    const Barrier f{faces, mu};
    for (int it = 0; it < 100; ++it) {
      Eigen::Matrix<double, 5, 1> g;
      Eigen::Matrix<double, 5, 5> H;
      f.derivatives(t, g, H);
      const Eigen::Matrix<double, 5, 1> step = -H.ldlt().solve(g);
      const double decrement = -g.dot(step);
      if (!(decrement > 1e-14)) break;
      const double f0 = f.value(t);
      double s = 1.0;
      while (s > 1e-12) {
        const Eigen::Matrix<double, 5, 1> trial = t + s * step;
        if (f.feasible(trial) && f.value(trial) <= f0 - 0.25 * s * decrement) break;
        s *= 0.5;
      }
      if (s <= 1e-12) break;
      t += s * step;
    }
  }
  Ellipse e;
  e.center = t.head<2>();
  e.shape = Barrier::shape(t);
  return e;
}

}  // namespace malab
