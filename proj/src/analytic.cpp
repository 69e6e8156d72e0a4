#include "malab/analytic.hpp"

#include "malab/error.hpp"

#include <Eigen/LU>

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

namespace malab {

namespace {

void require_upper(const Vec& x, int dim) {
  if (x[dim - 1] < 0) throw Error(ErrorKind::domain, "closed forms are defined for x_n >= 0");
}

double det_active(const Mat& m, int dim) { return dim == 2 ? m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0) : m.determinant(); }

}  // namespace

double u0_value(const Vec& x, int dim, double alpha) {
  const double y = x[dim - 1];
  return 0.5 * tangential_norm2(x, dim) + std::pow(y, 2.0 + alpha) / ((1.0 + alpha) * (2.0 + alpha));
}

double ClosedFormSolution::value(const Vec& x) const {
  require_upper(x, dimension);
  const double a = alpha;
  const double y = x[dimension - 1];
  if (kind == ClosedFormKind::u0) return u0_value(x, dimension, a);
  double v = x[0] * x[0] / (2.0 * (1.0 + y));
  for (int i = 1; i + 1 < dimension; ++i) v += 0.5 * x[i] * x[i];
  return v + std::pow(y, 2.0 + a) / ((1.0 + a) * (2.0 + a)) + std::pow(y, 3.0 + a) / ((2.0 + a) * (3.0 + a));
}

Vec ClosedFormSolution::gradient(const Vec& x) const {
  require_upper(x, dimension);
  const int n = dimension;
  const double a = alpha;
  const double y = x[n - 1];
  Vec g = Vec::Zero();
  for (int i = 0; i + 1 < n; ++i) g[i] = x[i];
  g[n - 1] = std::pow(y, 1.0 + a) / (1.0 + a);
  if (kind == ClosedFormKind::nonuniqueness) {
    const double s = 1.0 + y;
    g[0] = x[0] / s;
    g[n - 1] += -x[0] * x[0] / (2.0 * s * s) + std::pow(y, 2.0 + a) / (2.0 + a);
  }
  return g;
}

Mat ClosedFormSolution::hessian(const Vec& x) const {
  require_upper(x, dimension);
  const int n = dimension;
  const double y = x[n - 1];
  Mat h = Mat::Zero();
  for (int i = 0; i + 1 < n; ++i) h(i, i) = 1.0;
  h(n - 1, n - 1) = std::pow(y, alpha);
  if (kind == ClosedFormKind::nonuniqueness) {
    const double s = 1.0 + y;
    h(0, 0) = 1.0 / s;
    h(0, n - 1) = h(n - 1, 0) = -x[0] / (s * s);
    h(n - 1, n - 1) = x[0] * x[0] / (s * s * s) + std::pow(y, alpha) * s;
  }
  return h;
}

SmoothFunction ClosedFormSolution::smooth() const {
  const ClosedFormSolution self = *this;
  return {dimension, [self](const Vec& x) { return self.value(x); }, [self](const Vec& x) { return self.gradient(x); },
          [self](const Vec& x) { return self.hessian(x); }};
}

PointFunction ClosedFormSolution::function() const {
  const ClosedFormSolution self = *this;
  return [self](const Vec& x) { return self.value(x); };
}

std::vector<Vec> half_space_samples(int dim, int count, std::uint64_t seed, double extent, double height) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> tang(-extent, extent), norm(0.0, height);
  std::vector<Vec> out;
  out.reserve(static_cast<std::size_t>(count));
  for (int s = 0; s < count; ++s) {
    Vec x = Vec::Zero();
    for (int i = 0; i + 1 < dim; ++i) x[i] = tang(rng);
    double y = 0.0;
    while (y == 0.0) y = norm(rng);
    x[dim - 1] = y;
    out.push_back(x);
  }
  return out;
}

MonitorReport verify_ma_identity(const ClosedFormSolution& sol, const std::vector<Vec>& samples) {
  MonitorReport rep;
  rep.name = sol.kind == ClosedFormKind::u0 ? "u0_identity" : "nonuniqueness_identity";
  double trace_dev = 0.0;
  const int n = sol.dimension;
  for (const Vec& x : samples) {
    const double dev = std::abs(det_active(sol.hessian(x), n) - std::pow(x[n - 1], sol.alpha));
    if (dev > rep.max_value) {
      rep.max_value = dev;
      rep.argmax = x;
    }
    Vec xb = x;
    xb[n - 1] = 0.0;
    trace_dev = std::max(trace_dev, std::abs(sol.value(xb) - 0.5 * tangential_norm2(xb, n)));
  }
  rep.context["trace_deviation"] = trace_dev;
  rep.context["samples"] = static_cast<double>(samples.size());
  rep.context["pass"] = rep.max_value <= 1e-10 && trace_dev <= 1e-12 ? 1.0 : 0.0;
  return rep;
}

WbarDerivatives wbar_derivatives(double r, double y, double gamma) {
  if (!(r > 0) || y < 0) throw Error(ErrorKind::domain, "w-bar needs r > 0 and y >= 0");
  WbarDerivatives d;
  d.t = y * std::pow(r, -1.5);
  if (d.t >= 1.0) return d;  // outside the support all derivatives vanish
  const double tg = std::pow(d.t, gamma);
  d.g = 1.0 - tg;
  d.value = r * r * d.g;
  d.w_r = r * (2.0 * d.g + 1.5 * gamma * tg);
  d.w_rr = 2.0 * d.g + 1.5 * gamma * (3.0 - 1.5 * gamma) * tg;
  // At y = 0 the y-derivatives are infinite (t^(gamma-1) and t^(gamma-2) blow up).
  d.w_y = -gamma * std::sqrt(r) * std::pow(d.t, gamma - 1.0);
  d.w_yy = gamma * (1.0 - gamma) * std::pow(d.t, gamma - 2.0) / r;
  d.w_ry = gamma * std::pow(d.t, gamma - 1.0) * (-2.0 + 1.5 * gamma) / std::sqrt(r);
  return d;
}

double wbar_det_constant(double gamma) {
  // det = r^-1 gamma t^(2 gamma - 2) [(1-gamma)(2 t^-gamma - k) - gamma (2 - 1.5 gamma)^2], k = (2-1.5g)(1-1.5g);
  // the bracket is smallest at t = 1.
  const double k = (2.0 - 1.5 * gamma) * (1.0 - 1.5 * gamma);
  return gamma * ((1.0 - gamma) * (2.0 - k) - gamma * (2.0 - 1.5 * gamma) * (2.0 - 1.5 * gamma));
}

std::string to_string(BarrierKind kind) {
  switch (kind) {
    case BarrierKind::w1: return "w1";
    case BarrierKind::w2: return "w2";
    case BarrierKind::w3: return "w3";
    case BarrierKind::V: return "V";
  }
  return "unknown";
}

BarrierKind barrier_from_string(const std::string& name) {
  if (name == "w1") return BarrierKind::w1;
  if (name == "w2") return BarrierKind::w2;
  if (name == "w3") return BarrierKind::w3;
  if (name == "V" || name == "v") return BarrierKind::V;
  throw Error(ErrorKind::usage, "unknown barrier '" + name + "'");
}

BarrierSpec BarrierSpec::w1(int dim, double gamma) {
  BarrierSpec s;
  s.kind = BarrierKind::w1;
  s.dimension = dim;
  s.gamma = gamma;
  return s;
}

BarrierSpec BarrierSpec::w2(int dim, double c_prime, double h, double t) {
  BarrierSpec s;
  s.kind = BarrierKind::w2;
  s.dimension = dim;
  s.c_prime = c_prime;
  s.h = h;
  s.t = t;
  return s;
}

BarrierSpec BarrierSpec::w3(int dim, double c, std::vector<double> d, double d_h, double h, double t) {
  if (static_cast<int>(d.size()) != dim - 1) throw Error(ErrorKind::input, "w3 needs n-1 tangential axes");
  BarrierSpec s;
  s.kind = BarrierKind::w3;
  s.dimension = dim;
  s.c = c;
  s.d = std::move(d);
  s.d_h = d_h;
  s.h = h;
  s.t = t;
  return s;
}

BarrierSpec BarrierSpec::v(int dim, double alpha, double epsilon) {
  BarrierSpec s;
  s.kind = BarrierKind::V;
  s.dimension = dim;
  s.alpha = alpha;
  s.epsilon = epsilon;
  return s;
}

double BarrierSpec::value(const Vec& x) const {
  const int n = dimension;
  const double xn = x[n - 1];
  const double r2 = tangential_norm2(x, n);
  switch (kind) {
    case BarrierKind::w1: {
      const double r = std::sqrt(r2);
      if (r == 0.0) return 0.0;
      return c_prime * wbar_derivatives(r, C_prime * xn, gamma).value;
    }
    case BarrierKind::w2: return c_prime * h * (r2 / h + xn * xn / std::pow(h, 1.5)) + t * xn;
    case BarrierKind::w3: {
      double s = 0.0;
      for (int i = 0; i + 1 < n; ++i) s += (x[i] / d[static_cast<std::size_t>(i)]) * (x[i] / d[static_cast<std::size_t>(i)]);
      return c * h * (s + (xn / d_h) * (xn / d_h)) + t * xn;
    }
    case BarrierKind::V:
      return 0.5 * (1.0 + epsilon) * r2 +
             std::pow(1.0 + epsilon, 1.0 - n) * std::pow(xn, 2.0 + alpha) / ((2.0 + alpha) * (1.0 + alpha)) - epsilon * xn;
  }
  return 0.0;
}

Mat BarrierSpec::hessian(const Vec& x) const {
  const int n = dimension;
  const double xn = x[n - 1];
  Mat H = Mat::Zero();
  switch (kind) {
    case BarrierKind::w1: {
      const double r = std::sqrt(tangential_norm2(x, n));
      if (r == 0.0) throw Error(ErrorKind::domain, "w1 is singular on the x_n axis");
      const auto d = wbar_derivatives(r, C_prime * xn, gamma);
      if (d.t >= 1.0) return H;
      Vec e = Vec::Zero();
      for (int i = 0; i + 1 < n; ++i) e[i] = x[i] / r;
      for (int i = 0; i + 1 < n; ++i) {
        for (int j = 0; j + 1 < n; ++j) H(i, j) = d.w_rr * e[i] * e[j] + (d.w_r / r) * ((i == j ? 1.0 : 0.0) - e[i] * e[j]);
        H(i, n - 1) = H(n - 1, i) = C_prime * d.w_ry * e[i];
      }
      H(n - 1, n - 1) = C_prime * C_prime * d.w_yy;
      return c_prime * H;
    }
    case BarrierKind::w2:
      for (int i = 0; i + 1 < n; ++i) H(i, i) = 2.0 * c_prime;
      H(n - 1, n - 1) = 2.0 * c_prime / std::sqrt(h);
      return H;
    case BarrierKind::w3:
      for (int i = 0; i + 1 < n; ++i) H(i, i) = 2.0 * c * h / (d[static_cast<std::size_t>(i)] * d[static_cast<std::size_t>(i)]);
      H(n - 1, n - 1) = 2.0 * c * h / (d_h * d_h);
      return H;
    case BarrierKind::V:
      for (int i = 0; i + 1 < n; ++i) H(i, i) = 1.0 + epsilon;
      H(n - 1, n - 1) = std::pow(1.0 + epsilon, 1.0 - n) * std::pow(xn, alpha);
      return H;
  }
  return H;
}

double BarrierSpec::det_hessian(const Vec& x) const { return det_active(hessian(x), dimension); }

namespace {

struct MarginTracker {
  double margin = std::numeric_limits<double>::infinity();
  Vec where = Vec::Zero();
  void add(double m, const Vec& x) {
    if (m < margin) {
      margin = m;
      where = x;
    }
  }
};

Vec random_direction(int k, std::mt19937_64& rng) {
  std::normal_distribution<double> nd;
  Vec e = Vec::Zero();
  double len = 0.0;
  while (len < 1e-12) {
    for (int i = 0; i < k; ++i) e[i] = nd(rng);
    len = e.norm();
  }
  return e / len;
}

}  // namespace

MonitorReport verify_barrier(const BarrierSpec& spec, const BarrierRegion& region) {
  const int n = spec.dimension;
  if (n != 2 && n != 3) throw Error(ErrorKind::input, "barrier dimension must be 2 or 3");
  std::mt19937_64 rng(region.seed);
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  MonitorReport rep;
  rep.name = "barrier_" + to_string(spec.kind);
  const int count = region.samples;

  switch (spec.kind) {
    case BarrierKind::w1: {
      if (!(spec.gamma > 0) || spec.gamma * n >= 2.0) throw Error(ErrorKind::domain, "w1 needs 0 < n gamma < 2");
      MarginTracker det, structure;
      const double rhs = 1.0 / region.rho_prime;
      const double c0 = wbar_det_constant(spec.gamma);
      for (int s = 0; s < count; ++s) {
        // Sample {w1 > 0} inside B_radius: pick r, then x_n below the support curve C' x_n = r^(3/2).
        Vec x;
        do {
          const double r = region.radius * std::pow(uni(rng), 1.0 / (n - 1));
          const Vec e = random_direction(n - 1, rng);
          x = r * e;
          x[n - 1] = (1.0 - uni(rng)) * std::pow(r, 1.5) / spec.C_prime * (1.0 - 1e-9);
        } while (x.norm() >= region.radius || tangential_norm2(x, n) == 0.0);
        det.add((spec.det_hessian(x) - rhs) / rhs, x);
        const double r = std::sqrt(tangential_norm2(x, n));
        const auto d = wbar_derivatives(r, spec.C_prime * x[n - 1], spec.gamma);
        structure.add(d.det() * r / std::pow(d.t, 2.0 * spec.gamma - 2.0) - c0, x);
      }
      rep.max_value = det.margin;
      rep.argmax = det.where;
      rep.context["det_margin"] = det.margin;
      rep.context["wbar_det_margin"] = structure.margin;
      rep.context["wbar_det_constant"] = c0;
      rep.context["c_prime"] = spec.c_prime;
      rep.context["C_prime"] = spec.C_prime;
      rep.context["gamma"] = spec.gamma;
      rep.context["pass"] = det.margin > 0 && structure.margin >= -1e-12 ? 1.0 : 0.0;
      break;
    }
    case BarrierKind::w2:
    case BarrierKind::w3: {
      if (!(spec.h > 0)) throw Error(ErrorKind::domain, "section height must be positive");
      const bool w2 = spec.kind == BarrierKind::w2;
      if (!w2 && !(spec.d_h > 0)) throw Error(ErrorKind::domain, "w3 needs d_h > 0");
      std::vector<double> axes(static_cast<std::size_t>(n - 1), std::sqrt(region.box * spec.h));
      if (!w2)
        for (int i = 0; i + 1 < n; ++i) axes[static_cast<std::size_t>(i)] = std::sqrt(region.box) * spec.d[static_cast<std::size_t>(i)];
      const double top = w2 ? region.box * std::pow(spec.h, 0.75) : region.box * spec.d_h;
      const double rhs_sup = std::pow(top, spec.alpha) / region.rho_prime;
      const double share = w2 ? 0.5 : 0.25;  // boundary data dominates share * mu |x'|^2
      MarginTracker det, level, boundary;
      for (int s = 0; s < count; ++s) {
        // Interior of the section box.
        Vec x = std::pow(uni(rng), 1.0 / (n - 1)) * random_direction(n - 1, rng);
        for (int i = 0; i + 1 < n; ++i) x[i] *= axes[static_cast<std::size_t>(i)];
        x[n - 1] = (1.0 - uni(rng)) * top;
        const double rhs = std::pow(x[n - 1], spec.alpha) / region.rho_prime;
        det.add((spec.det_hessian(x) - rhs) / rhs_sup, x);
        level.add((spec.h - spec.value(x)) / spec.h, x);
        // Boundary pieces below the curved boundary x_n <= curvature |x'|^2.
        Vec b = x;
        b[n - 1] = std::min(top, region.curvature * tangential_norm2(b, n) * uni(rng));
        const double q = share * region.mu * tangential_norm2(b, n);
        if (q > 0) boundary.add((q - spec.value(b)) / q, b);
      }
      rep.max_value = std::min({det.margin, level.margin, boundary.margin});
      rep.argmax = rep.max_value == det.margin ? det.where : rep.max_value == level.margin ? level.where : boundary.where;
      rep.context["det_margin"] = det.margin;
      rep.context["level_margin"] = level.margin;
      rep.context["boundary_margin"] = boundary.margin;
      rep.context["pass"] = rep.max_value > 0 ? 1.0 : 0.0;
      break;
    }
    case BarrierKind::V: {
      const double a = spec.alpha, eps = spec.epsilon;
      const double c2 = 1.0 + (n - 1) / ((1.0 + a) * (2.0 + a));
      const double c1 = 2.0 * std::sqrt(c2);
      const ClosedFormSolution u0{ClosedFormKind::u0, a, n};
      double det_dev = 0.0;
      MarginTracker bottom, side, top;
      for (int s = 0; s < count; ++s) {
        Vec e = random_direction(n - 1, rng);
        Vec x = c1 * std::pow(uni(rng), 1.0 / (n - 1)) * e;
        x[n - 1] = 1.0 - uni(rng);
        det_dev = std::max(det_dev, std::abs(spec.det_hessian(x) - std::pow(x[n - 1], a)) / std::max(1.0, std::pow(x[n - 1], a)));
        Vec xb = x;
        xb[n - 1] = 0.0;
        bottom.add(spec.value(xb) - u0.value(xb), xb);
        Vec xs = c1 * e;
        xs[n - 1] = x[n - 1];
        side.add(spec.value(xs) - u0.value(xs), xs);
        Vec xt = x;
        xt[n - 1] = 1.0;
        top.add(spec.value(xt) - (u0.value(xt) - c2 * eps), xt);
      }
      rep.max_value = std::min({bottom.margin, side.margin, top.margin});
      rep.argmax = rep.max_value == bottom.margin ? bottom.where : rep.max_value == side.margin ? side.where : top.where;
      rep.context["det_deviation"] = det_dev;
      rep.context["bottom_margin"] = bottom.margin;
      rep.context["side_margin"] = side.margin;
      rep.context["top_margin"] = top.margin;
      rep.context["C1"] = c1;
      rep.context["C2"] = c2;
      rep.context["pass"] = det_dev <= 1e-12 && rep.max_value >= 0 ? 1.0 : 0.0;
      break;
    }
  }
  rep.context["samples"] = count;
  return rep;
}

BarrierSpec tune_w1(BarrierSpec spec, const BarrierRegion& region, int max_doublings) {
  spec.C_prime = 1.0;
  for (int k = 0; k <= max_doublings; ++k) {
    if (verify_barrier(spec, region).context.at("det_margin") > 0) return spec;
    spec.C_prime *= 2.0;
  }
  throw Error(ErrorKind::configuration, "no C' found for the w1 barrier");
}

}  // namespace malab
