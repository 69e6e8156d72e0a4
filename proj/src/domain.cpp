#include "malab/domain.hpp"

#include "malab/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace malab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double signed_pow(double t, double e) { return std::copysign(std::pow(std::abs(t), e), t); }

}  // namespace

std::string to_string(ShapeKind kind) {
  switch (kind) {
    case ShapeKind::slab: return "slab";
    case ShapeKind::ball: return "ball";
    case ShapeKind::half_ball: return "half_ball";
    case ShapeKind::superellipse: return "superellipse";
    case ShapeKind::polytope: return "polytope";
  }
  return "unknown";
}

ShapeKind shape_from_string(const std::string& name) {
  if (name == "slab" || name == "half_space" || name == "half-space") return ShapeKind::slab;
  if (name == "ball") return ShapeKind::ball;
  if (name == "half_ball" || name == "half-ball") return ShapeKind::half_ball;
  if (name == "superellipse") return ShapeKind::superellipse;
  if (name == "polytope" || name == "box") return ShapeKind::polytope;
  throw Error(ErrorKind::usage, "unknown shape '" + name + "'");
}

ConvexDomain ConvexDomain::slab(int dim, double half_width, double height) {
  if (dim != 2 && dim != 3) throw Error(ErrorKind::input, "dimension must be 2 or 3");
  if (!(half_width > 0) || !(height > 0)) throw Error(ErrorKind::input, "slab parameters must be positive");
  ConvexDomain d;
  d.dim_ = dim;
  d.shape_ = ShapeKind::slab;
  d.half_width_ = half_width;
  d.height_ = height;
  d.faces_.push_back({-unit(dim - 1), 0.0});
  if (std::isfinite(height)) d.faces_.push_back({unit(dim - 1), height});
  if (std::isfinite(half_width)) {
    for (int i = 0; i + 1 < dim; ++i) {
      d.faces_.push_back({unit(i), half_width});
      d.faces_.push_back({-unit(i), half_width});
    }
  }
  d.marked_ = Vec::Zero();
  const double cap = std::min(half_width, 0.5 * height);
  d.rho_ = std::isfinite(cap) ? cap : 0.5;
  return d;
}

ConvexDomain ConvexDomain::ball(int dim, double radius, const Vec& center) {
  if (dim != 2 && dim != 3) throw Error(ErrorKind::input, "dimension must be 2 or 3");
  if (!(radius > 0)) throw Error(ErrorKind::input, "ball radius must be positive");
  ConvexDomain d;
  d.dim_ = dim;
  d.shape_ = ShapeKind::ball;
  d.radius_ = radius;
  d.center_ = center;
  for (int i = dim; i < 3; ++i) d.center_[i] = 0.0;
  d.marked_ = d.center_ - radius * unit(dim - 1);
  d.rho_ = radius;
  return d;
}

ConvexDomain ConvexDomain::tangent_ball(int dim, double radius) {
  return ball(dim, radius, radius * unit(dim - 1));
}

ConvexDomain ConvexDomain::half_ball(int dim, double radius) {
  if (dim != 2 && dim != 3) throw Error(ErrorKind::input, "dimension must be 2 or 3");
  if (!(radius > 0)) throw Error(ErrorKind::input, "half-ball radius must be positive");
  ConvexDomain d;
  d.dim_ = dim;
  d.shape_ = ShapeKind::half_ball;
  d.radius_ = radius;
  d.marked_ = Vec::Zero();
  d.rho_ = 0.5 * radius;
  return d;
}

ConvexDomain ConvexDomain::superellipse(int dim, const Vec& semi_axes, double exponent, const Vec& center) {
  if (dim != 2 && dim != 3) throw Error(ErrorKind::input, "dimension must be 2 or 3");
  if (!(exponent >= 1.0)) throw Error(ErrorKind::input, "superellipse exponent must be >= 1");
  for (int i = 0; i < dim; ++i)
    if (!(semi_axes[i] > 0)) throw Error(ErrorKind::input, "superellipse semi-axes must be positive");
  ConvexDomain d;
  d.dim_ = dim;
  d.shape_ = ShapeKind::superellipse;
  d.semi_axes_ = semi_axes;
  d.exponent_ = exponent;
  d.center_ = center;
  for (int i = dim; i < 3; ++i) d.center_[i] = 0.0;
  d.marked_ = d.center_ - semi_axes[dim - 1] * unit(dim - 1);
  // Largest ball tangent at the marked point, found by bisection on sampled containment.
  const int samples = dim == 2 ? 256 : 48;
  auto fits = [&](double r) {
    const Vec c = d.marked_ + r * unit(dim - 1);
    for (int a = 0; a < samples; ++a) {
      const double th = 2.0 * std::numbers::pi * a / samples;
      if (dim == 2) {
        if (d.superellipse_level(c + r * Vec(std::cos(th), std::sin(th), 0.0)) < -1e-12) return false;
      } else {
        for (int b = 1; b < samples / 2; ++b) {
          const double ph = std::numbers::pi * b / (samples / 2);
          const Vec dir(std::sin(ph) * std::cos(th), std::sin(ph) * std::sin(th), std::cos(ph));
          if (d.superellipse_level(c + r * dir) < -1e-12) return false;
        }
      }
    }
    return true;
  };
  double lo = 0.0;
  double hi = semi_axes.head(dim).minCoeff();
  for (int it = 0; it < 40; ++it) {
    const double mid = 0.5 * (lo + hi);
    (fits(mid) ? lo : hi) = mid;
  }
  d.rho_ = lo;
  return d;
}

ConvexDomain ConvexDomain::polytope(int dim, std::vector<Vec> vertices) {
  if (dim != 2 && dim != 3) throw Error(ErrorKind::input, "dimension must be 2 or 3");
  // Deduplicate vertices closer than 1e-12.
  std::vector<Vec> unique;
  for (Vec v : vertices) {
    for (int i = dim; i < 3; ++i) v[i] = 0.0;
    const bool dup = std::any_of(unique.begin(), unique.end(), [&](const Vec& u) { return (u - v).norm() < 1e-12; });
    if (!dup) unique.push_back(v);
  }
  if (static_cast<int>(unique.size()) < dim + 1) throw Error(ErrorKind::input, "polytope needs at least n+1 vertices");
  ConvexDomain d;
  d.dim_ = dim;
  d.shape_ = ShapeKind::polytope;
  d.vertices_ = std::move(unique);
  d.build_polytope_faces();
  if (d.faces_.size() < static_cast<size_t>(dim + 1)) throw Error(ErrorKind::input, "degenerate polytope");

  Vec centroid = Vec::Zero();
  for (const auto& v : d.vertices_) centroid += v;
  centroid /= static_cast<double>(d.vertices_.size());
  Vec marked = Vec::Zero();
  if (std::abs(d.margin(marked)) > 1e-12) {
    marked = centroid - d.ray_exit(centroid, -unit(dim - 1), 1e6) * unit(dim - 1);
  }
  d.marked_ = marked;
  // The tangent ball at a face point is limited by the remaining faces.
  const Vec inward = unit(dim - 1);
  double lo = 0.0;
  double hi = d.margin(centroid) + (centroid - marked).norm();
  for (int it = 0; it < 60; ++it) {
    const double mid = 0.5 * (lo + hi);
    const Vec c = marked + mid * inward;
    (d.margin(c) >= mid - 1e-12 ? lo : hi) = mid;
  }
  d.rho_ = lo;
  return d;
}

ConvexDomain ConvexDomain::box(int dim, const Vec& lower, const Vec& upper) {
  std::vector<Vec> verts;
  const int corners = 1 << dim;
  for (int m = 0; m < corners; ++m) {
    Vec v = Vec::Zero();
    for (int i = 0; i < dim; ++i) v[i] = (m >> i) & 1 ? upper[i] : lower[i];
    verts.push_back(v);
  }
  return polytope(dim, std::move(verts));
}

void ConvexDomain::build_polytope_faces() {
  faces_.clear();
  const auto& v = vertices_;
  const size_t m = v.size();
  auto add_face = [&](Vec normal, double offset) {
    const double len = normal.norm();
    normal /= len;
    offset /= len;
    for (const auto& f : faces_)
      if ((f.normal - normal).norm() < 1e-9 && std::abs(f.offset - offset) < 1e-9) return;
    faces_.push_back({normal, offset});
  };
  auto supporting = [&](const Vec& normal, double offset, double tol) {
    for (const auto& p : v)
      if (normal.dot(p) > offset + tol) return false;
    return true;
  };
  if (dim_ == 2) {
    for (size_t a = 0; a < m; ++a)
      for (size_t b = 0; b < m; ++b) {
        if (a == b) continue;
        const Vec e = v[b] - v[a];
        Vec normal(e[1], -e[0], 0.0);
        if (normal.norm() < 1e-14) continue;
        const double off = normal.dot(v[a]);
        if (supporting(normal, off, 1e-12 * normal.norm())) add_face(normal, off);
      }
  } else {
    for (size_t a = 0; a < m; ++a)
      for (size_t b = a + 1; b < m; ++b)
        for (size_t c = b + 1; c < m; ++c) {
          Vec normal = (v[b] - v[a]).cross(v[c] - v[a]);
          if (normal.norm() < 1e-14) continue;
          for (int sgn = 0; sgn < 2; ++sgn) {
            const double off = normal.dot(v[a]);
            if (supporting(normal, off, 1e-12 * normal.norm())) add_face(normal, off);
            normal = -normal;
          }
        }
  }
}

bool ConvexDomain::bounded() const {
  if (shape_ == ShapeKind::slab) return std::isfinite(half_width_) && std::isfinite(height_);
  return true;
}

Box ConvexDomain::bounding_box() const {
  Box b;
  switch (shape_) {
    case ShapeKind::slab:
      for (int i = 0; i + 1 < dim_; ++i) {
        b.lower[i] = -half_width_;
        b.upper[i] = half_width_;
      }
      b.lower[dim_ - 1] = 0.0;
      b.upper[dim_ - 1] = height_;
      break;
    case ShapeKind::ball:
      for (int i = 0; i < dim_; ++i) {
        b.lower[i] = center_[i] - radius_;
        b.upper[i] = center_[i] + radius_;
      }
      break;
    case ShapeKind::half_ball:
      for (int i = 0; i < dim_; ++i) {
        b.lower[i] = -radius_;
        b.upper[i] = radius_;
      }
      b.lower[dim_ - 1] = 0.0;
      break;
    case ShapeKind::superellipse:
      for (int i = 0; i < dim_; ++i) {
        b.lower[i] = center_[i] - semi_axes_[i];
        b.upper[i] = center_[i] + semi_axes_[i];
      }
      break;
    case ShapeKind::polytope:
      for (int i = 0; i < dim_; ++i) {
        b.lower[i] = kInf;
        b.upper[i] = -kInf;
        for (const auto& v : vertices_) {
          b.lower[i] = std::min(b.lower[i], v[i]);
          b.upper[i] = std::max(b.upper[i], v[i]);
        }
      }
      break;
  }
  return b;
}

void ConvexDomain::set_marked_point(const Vec& x, double rho) {
  if (std::abs(margin(x)) > 1e-9) throw Error(ErrorKind::domain, "marked point must lie on the boundary");
  if (!(rho > 0)) throw Error(ErrorKind::input, "tangent ball radius must be positive");
  marked_ = x;
  rho_ = rho;
}

double ConvexDomain::superellipse_level(const Vec& x) const {
  double s = 0.0;
  for (int i = 0; i < dim_; ++i) s += std::pow(std::abs((x[i] - center_[i]) / semi_axes_[i]), exponent_);
  return (1.0 - std::pow(s, 1.0 / exponent_)) * semi_axes_.head(dim_).minCoeff();
}

double ConvexDomain::margin(const Vec& x) const {
  switch (shape_) {
    case ShapeKind::slab:
    case ShapeKind::polytope: {
      double m = kInf;
      for (const auto& f : faces_) m = std::min(m, f.offset - f.normal.dot(x));
      return m;
    }
    case ShapeKind::ball: return radius_ - (x - center_).head(dim_).norm();
    case ShapeKind::half_ball: return std::min(x[dim_ - 1], radius_ - x.head(dim_).norm());
    case ShapeKind::superellipse: return superellipse_level(x);
  }
  return -kInf;
}

double ConvexDomain::superellipse_distance(const Vec& x) const {
  const double e = 2.0 / exponent_;
  auto boundary2 = [&](double th) {
    return Vec(center_[0] + semi_axes_[0] * signed_pow(std::cos(th), e),
               center_[1] + semi_axes_[1] * signed_pow(std::sin(th), e), 0.0);
  };
  auto boundary3 = [&](double th, double ph) {
    const double cp = signed_pow(std::cos(ph), e);
    return Vec(center_[0] + semi_axes_[0] * cp * signed_pow(std::cos(th), e),
               center_[1] + semi_axes_[1] * cp * signed_pow(std::sin(th), e),
               center_[2] + semi_axes_[2] * signed_pow(std::sin(ph), e));
  };
  if (dim_ == 2) {
    constexpr int kSamples = 4096;
    double best = kInf;
    double best_th = 0.0;
    for (int a = 0; a < kSamples; ++a) {
      const double th = 2.0 * std::numbers::pi * a / kSamples;
      const double dd = (boundary2(th) - x).norm();
      if (dd < best) {
        best = dd;
        best_th = th;
      }
    }
    // Golden-section refinement around the best sample.
    double lo = best_th - 2.0 * std::numbers::pi / kSamples;
    double hi = best_th + 2.0 * std::numbers::pi / kSamples;
    const double g = 0.5 * (std::sqrt(5.0) - 1.0);
    double c = hi - g * (hi - lo), d = lo + g * (hi - lo);
    for (int it = 0; it < 80; ++it) {
      if ((boundary2(c) - x).norm() < (boundary2(d) - x).norm()) hi = d;
      else lo = c;
      c = hi - g * (hi - lo);
      d = lo + g * (hi - lo);
    }
    return std::min(best, (boundary2(0.5 * (lo + hi)) - x).norm());
  }
  constexpr int kTh = 256, kPh = 128;
  double best = kInf, bth = 0.0, bph = 0.0;
  for (int a = 0; a < kTh; ++a)
    for (int b = 0; b <= kPh; ++b) {
      const double th = 2.0 * std::numbers::pi * a / kTh;
      const double ph = -0.5 * std::numbers::pi + std::numbers::pi * b / kPh;
      const double dd = (boundary3(th, ph) - x).norm();
      if (dd < best) {
        best = dd;
        bth = th;
        bph = ph;
      }
    }
  double step = std::numbers::pi / kPh;
  while (step > 1e-10) {
    bool improved = false;
    for (int k = 0; k < 4; ++k) {
      const double th = bth + (k == 0 ? step : k == 1 ? -step : 0.0);
      const double ph = std::clamp(bph + (k == 2 ? step : k == 3 ? -step : 0.0), -0.5 * std::numbers::pi,
                                   0.5 * std::numbers::pi);
      const double dd = (boundary3(th, ph) - x).norm();
      if (dd < best) {
        best = dd;
        bth = th;
        bph = ph;
        improved = true;
      }
    }
    if (!improved) step *= 0.5;
  }
  return best;
}

double ConvexDomain::boundary_distance(const Vec& x) const {
  const double m = margin(x);
  if (m < -1e-12) throw Error(ErrorKind::domain, "point outside the domain");
  if (shape_ == ShapeKind::superellipse) return superellipse_distance(x);
  return std::max(m, 0.0);
}

double ConvexDomain::ray_exit(const Vec& x, const Vec& dir, double t_max) const {
  if (margin(x + t_max * dir) >= 0.0) return t_max;
  double lo = 0.0, hi = t_max;
  for (int it = 0; it < 100 && hi - lo > 1e-15 * t_max; ++it) {
    const double mid = 0.5 * (lo + hi);
    (margin(x + mid * dir) >= 0.0 ? lo : hi) = mid;
  }
  return lo;
}

}  // namespace malab
