#include "malab/field.hpp"

#include "malab/error.hpp"
#include "malab/stencil.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace malab {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

}  // namespace

SecondDifference make_second_difference(const Arm& plus, const Arm& minus) {
  SecondDifference d;
  d.plus = plus;
  d.minus = minus;
  const double sum = plus.length + minus.length;
  d.plus_weight = 2.0 / (sum * plus.length);
  d.minus_weight = 2.0 / (sum * minus.length);
  d.center_weight = -(d.plus_weight + d.minus_weight);
  return d;
}

std::shared_ptr<const Layout> classify_nodes(const ConvexDomain& domain, const Grid& grid) {
  auto layout = std::make_shared<Layout>();
  layout->kinds.resize(grid.size());
  const double tol = 1e-6 * grid.spacing();
  for (std::size_t k = 0; k < grid.size(); ++k) {
    const double m = domain.margin(grid.point(k));
    NodeKind kind = NodeKind::exterior;
    if (m > tol) kind = NodeKind::interior;
    else if (m >= -tol) kind = NodeKind::boundary;
    layout->kinds[k] = kind;
    if (kind == NodeKind::interior) layout->interior.push_back(k);
  }
  return layout;
}

ScalarField::ScalarField(ConvexDomain domain, Grid grid, PointFunction trace, std::vector<double> values)
    : domain_(std::move(domain)), grid_(std::move(grid)), trace_(std::move(trace)), values_(std::move(values)) {
  if (domain_.dimension() != grid_.dimension()) throw Error(ErrorKind::input, "domain and grid dimensions differ");
  if (values_.size() != grid_.size()) throw Error(ErrorKind::input, "value count does not match the grid");
  layout_ = classify_nodes(domain_, grid_);
  finalize();
}

ScalarField::ScalarField(ConvexDomain domain, Grid grid, PointFunction trace, std::shared_ptr<const Layout> layout,
                         std::vector<double> values)
    : domain_(std::move(domain)),
      grid_(std::move(grid)),
      trace_(std::move(trace)),
      layout_(std::move(layout)),
      values_(std::move(values)) {
  if (values_.size() != grid_.size()) throw Error(ErrorKind::input, "value count does not match the grid");
  finalize();
}

void ScalarField::finalize() {
  for (std::size_t k = 0; k < values_.size(); ++k) {
    switch (layout_->kinds[k]) {
      case NodeKind::exterior: values_[k] = kNaN; break;
      case NodeKind::boundary: values_[k] = trace_(grid_.point(k)); break;
      case NodeKind::interior:
        if (!std::isfinite(values_[k])) throw Error(ErrorKind::input, "interior value is not finite");
        break;
    }
  }
  convex_ = check_convexity(*this);
}

ScalarField ScalarField::with_values(std::vector<double> values) const {
  return ScalarField(domain_, grid_, trace_, layout_, std::move(values));
}

double ScalarField::range() const {
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (double v : values_) {
    if (std::isnan(v)) continue;
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  return hi >= lo ? hi - lo : 0.0;
}

Arm ScalarField::arm(std::size_t k, const Index3& v) const {
  const Index3 m = grid_.multi(k) + v;
  const double step = grid_.spacing() * v.cast<double>().norm();
  Arm a;
  if (grid_.in_range(m)) {
    const std::size_t nb = grid_.linear(m);
    if (layout_->kinds[nb] != NodeKind::exterior) {
      a.length = step;
      a.value = values_[nb];
      a.node = static_cast<std::ptrdiff_t>(nb);
      return a;
    }
  }
  const Vec x = grid_.point(k);
  const Vec dir = grid_.spacing() * v.cast<double>();
  const double t = domain_.ray_exit(x, dir, 1.0);
  a.length = t * step;
  a.value = trace_(x + t * dir);
  a.cut = true;
  return a;
}

SecondDifference ScalarField::second_difference(std::size_t k, const Index3& v) const {
  return make_second_difference(arm(k, v), arm(k, Index3(-v)));
}

double ScalarField::apply(const SecondDifference& d, double center) const {
  const double up = d.plus.node >= 0 ? values_[static_cast<std::size_t>(d.plus.node)] : d.plus.value;
  const double um = d.minus.node >= 0 ? values_[static_cast<std::size_t>(d.minus.node)] : d.minus.value;
  return d.plus_weight * up + d.minus_weight * um + d.center_weight * center;
}

double ScalarField::value_at(const Vec& x) const {
  const int dim = grid_.dimension();
  const Index3 c = grid_.cell_of(x);
  const double h = grid_.spacing();
  Vec frac = Vec::Zero();
  for (int a = 0; a < dim; ++a) frac[a] = std::clamp(x[a] / h - c[a], 0.0, 1.0);
  double sum = 0.0, wsum = 0.0;
  for (int corner = 0; corner < (1 << dim); ++corner) {
    Index3 m = c;
    double w = 1.0;
    for (int a = 0; a < dim; ++a) {
      const int bit = (corner >> a) & 1;
      m[a] += bit;
      w *= bit ? frac[a] : 1.0 - frac[a];
    }
    if (w == 0.0) continue;
    const double v = values_[grid_.linear(m)];
    if (std::isnan(v)) continue;
    sum += w * v;
    wsum += w;
  }
  return wsum > 0.0 ? sum / wsum : kNaN;
}

ScalarField build_field(const ConvexDomain& domain, const Grid& grid, const PointFunction& interior_init,
                        const PointFunction& boundary_trace) {
  if (grid.spacing() > 0.25 * domain.tangent_ball_radius())
    throw Error(ErrorKind::resolution, "grid spacing exceeds a quarter of the tangent ball radius");
  const Box dom = domain.bounding_box();
  const Box cov = grid.bounds();
  const double tol = 1e-9 * grid.spacing();
  for (int a = 0; a < domain.dimension(); ++a)
    if (cov.lower[a] > dom.lower[a] + tol || cov.upper[a] < dom.upper[a] - tol)
      throw Error(ErrorKind::domain, "grid does not cover the domain");
  std::vector<double> values(grid.size());
  for (std::size_t k = 0; k < grid.size(); ++k) {
    const Vec x = grid.point(k);
    values[k] = domain.margin(x) > 1e-6 * grid.spacing() ? interior_init(x) : 0.0;
  }
  return ScalarField(domain, grid, boundary_trace, std::move(values));
}

bool check_convexity(const ScalarField& field) {
  const int dim = field.dimension();
  const DirectionSet dirs = make_directions(dim, dim == 2 ? 2 : 1);
  const double tol = 1e-8 * field.range();
  for (std::size_t k : field.interior_nodes()) {
    const double u0 = field.value(k);
    for (const auto& v : dirs.directions) {
      const SecondDifference d = field.second_difference(k, v);
      // Compare the undivided difference so the tolerance is in units of u.
      const double scale = 0.5 * d.plus.length * d.minus.length;
      if (field.apply(d, u0) * scale < -tol) return false;
    }
  }
  return true;
}

Mat numerical_hessian(const ScalarField& field, const Vec& x) {
  const int dim = field.dimension();
  const double h = field.grid().spacing();
  const double m = field.domain().margin(x);
  if (m < 0) throw Error(ErrorKind::domain, "point outside the domain");
  if (m < 2.0 * h) throw Error(ErrorKind::near_boundary, "Hessian stencil leaves the domain");
  auto u = [&](const Vec& y) {
    const double v = field.value_at(y);
    if (std::isnan(v)) throw Error(ErrorKind::near_boundary, "Hessian stencil leaves the domain");
    return v;
  };
  const double u0 = u(x);
  Mat hess = Mat::Zero();
  for (int i = 0; i < dim; ++i) {
    const Vec ei = h * unit(i);
    hess(i, i) = (u(x + ei) - 2.0 * u0 + u(x - ei)) / (h * h);
    for (int j = i + 1; j < dim; ++j) {
      const Vec ej = h * unit(j);
      const double c = (u(x + ei + ej) - u(x + ei - ej) - u(x - ei + ej) + u(x - ei - ej)) / (4.0 * h * h);
      hess(i, j) = hess(j, i) = c;
    }
  }
  return hess;
}

}  // namespace malab
