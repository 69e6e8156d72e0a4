#include "malab/sections.hpp"

#include "malab/error.hpp"
#include "malab/john.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <deque>
#include <limits>
#include <numeric>

namespace malab {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::size_t patch_index(const Section& s, const Index3& m) {
  const Index3 ext = s.patch_hi - s.patch_lo + Index3::Ones();
  const Index3 r = m - s.patch_lo;
  return static_cast<std::size_t>(r[0]) + static_cast<std::size_t>(ext[0]) * (static_cast<std::size_t>(r[1]) + static_cast<std::size_t>(ext[1]) * static_cast<std::size_t>(r[2]));
}

struct Piece {
  double weight = 0.0;
  Vec centroid = Vec::Zero();
};

// Area and centroid of {phi < 0} inside a triangle with linear phi.
Piece clip_triangle(const std::array<Vec, 3>& p, const std::array<double, 3>& f) {
  std::vector<Vec> poly;
  for (int i = 0; i < 3; ++i) {
    const int j = (i + 1) % 3;
    if (f[i] < 0) poly.push_back(p[i]);
    if ((f[i] < 0) != (f[j] < 0)) poly.push_back(p[i] + (p[j] - p[i]) * (f[i] / (f[i] - f[j])));
  }
  Piece out;
  if (poly.size() < 3) return out;
  double a2 = 0.0;
  Vec c = Vec::Zero();
  for (std::size_t i = 0; i < poly.size(); ++i) {
    const Vec& a = poly[i];
    const Vec& b = poly[(i + 1) % poly.size()];
    const double cr = a[0] * b[1] - b[0] * a[1];
    a2 += cr;
    c += cr * (a + b);
  }
  if (a2 == 0.0) return out;
  out.weight = std::abs(0.5 * a2);
  out.centroid = c / (3.0 * a2);
  return out;
}

// Least-squares slope and coefficient of determination of y against x.
std::pair<double, double> fit_line(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxx = 0, sxy = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  const double slope = sxy / sxx;
  const double r2 = syy > 0 ? sxy * sxy / (sxx * syy) : 1.0;
  return {slope, r2};
}

Index3 nearest_index(const Vec& x, double h) {
  return Index3(static_cast<int>(std::lround(x[0] / h)), static_cast<int>(std::lround(x[1] / h)),
                static_cast<int>(std::lround(x[2] / h)));
}

}  // namespace

bool Section::in_patch(const Index3& m) const {
  for (int a = 0; a < 3; ++a)
    if (m[a] < patch_lo[a] || m[a] > patch_hi[a]) return false;
  return true;
}

double Section::phi_at(const Index3& m) const { return in_patch(m) ? phi[patch_index(*this, m)] : kNaN; }

Section compute_section(const ScalarField& field, const Vec& x0, const Vec& slope, double h) {
  if (!(h > 0)) throw Error(ErrorKind::input, "section height must be positive");
  const ConvexDomain& dom = field.domain();
  if (!dom.contains(x0, 1e-9)) throw Error(ErrorKind::domain, "base point outside the domain");
  const Grid& grid = field.grid();
  const int n = field.dimension();
  const double hg = grid.spacing();

  Section s;
  s.dimension = n;
  s.base_point = x0;
  s.slope = slope;
  s.height = h;
  s.base_value = field.value_at(x0);
  s.spacing = hg;
  s.domain = dom;
  const auto level = [&](const Vec& x, double u) { return u - s.base_value - slope.dot(x - x0) - h; };

  std::vector<std::size_t> members;
  Index3 lo = grid.hi(), hi = grid.lo();
  for (std::size_t k = 0; k < grid.size(); ++k) {
    if (field.kind(k) == NodeKind::exterior) continue;
    const Vec x = grid.point(k);
    if (level(x, field.value(k)) < 0) {
      members.push_back(k);
      const Index3 m = grid.multi(k);
      lo = lo.cwiseMin(m);
      hi = hi.cwiseMax(m);
    }
  }
  if (members.empty()) throw Error(ErrorKind::too_small, "section contains no grid node");
  for (int a = 0; a < n; ++a)
    if (hi[a] - lo[a] < 2) throw Error(ErrorKind::too_small, "section spans fewer than 3 nodes along an axis");

  // Connectedness over the full 3^n - 1 neighborhood.
  {
    std::vector<char> in(grid.size(), 0), seen(grid.size(), 0);
    for (std::size_t k : members) in[k] = 1;
    std::deque<std::size_t> queue{members.front()};
    seen[members.front()] = 1;
    std::size_t reached = 1;
    const int zr = n == 3 ? 1 : 0;
    while (!queue.empty()) {
      const Index3 m = grid.multi(queue.front());
      queue.pop_front();
      for (int dz = -zr; dz <= zr; ++dz)
        for (int dy = -1; dy <= 1; ++dy)
          for (int dx = -1; dx <= 1; ++dx) {
            const Index3 q = m + Index3(dx, dy, dz);
            if (!grid.in_range(q)) continue;
            const std::size_t kq = grid.linear(q);
            if (in[kq] && !seen[kq]) {
              seen[kq] = 1;
              ++reached;
              queue.push_back(kq);
            }
          }
    }
    if (reached != members.size()) throw Error(ErrorKind::degenerate_section, "section node set is not connected");
  }

  for (std::size_t k : members) s.nodes.push_back(grid.point(k));
  s.patch_lo = (lo - Index3::Constant(2)).cwiseMax(grid.lo());
  s.patch_hi = (hi + Index3::Constant(2)).cwiseMin(grid.hi());
  if (n == 2) s.patch_lo[2] = s.patch_hi[2] = 0;
  const Index3 ext = s.patch_hi - s.patch_lo + Index3::Ones();
  s.phi.assign(static_cast<std::size_t>(ext.prod()), kNaN);
  for (int z = s.patch_lo[2]; z <= s.patch_hi[2]; ++z)
    for (int y = s.patch_lo[1]; y <= s.patch_hi[1]; ++y)
      for (int x = s.patch_lo[0]; x <= s.patch_hi[0]; ++x) {
        const Index3 m(x, y, z);
        const std::size_t k = grid.linear(m);
        if (field.kind(k) != NodeKind::exterior) s.phi[patch_index(s, m)] = level(grid.point(m), field.value(k));
      }

  // Mass pieces, one per cell.
  const auto add_piece = [&](const Piece& p) {
    if (p.weight > 0) {
      s.mass_points.push_back(p.centroid);
      s.mass_weights.push_back(p.weight);
    }
  };
  const auto subsample = [&](const Index3& c, int per_axis, bool exact_phi) {
    Piece piece;
    const double cell = std::pow(hg, n) / std::pow(per_axis, n);
    const int zr = n == 3 ? per_axis : 1;
    for (int kz = 0; kz < zr; ++kz)
      for (int ky = 0; ky < per_axis; ++ky)
        for (int kx = 0; kx < per_axis; ++kx) {
          const double t[3] = {(kx + 0.5) / per_axis, (ky + 0.5) / per_axis, n == 3 ? (kz + 0.5) / per_axis : 0.0};
          Vec x = grid.point(c);
          for (int a = 0; a < n; ++a) x[a] += t[a] * hg;
          double f;
          if (exact_phi) {
            f = 0.0;
            for (int corner = 0; corner < (1 << n); ++corner) {
              double w = 1.0;
              Index3 m = c;
              for (int a = 0; a < n; ++a) {
                const int bit = (corner >> a) & 1;
                m[a] += bit;
                w *= bit ? t[a] : 1.0 - t[a];
              }
              f += w * s.phi_at(m);
            }
          } else {
            if (!dom.contains(x)) continue;
            f = level(x, field.value_at(x));
          }
          if (f < 0) {
            piece.weight += cell;
            piece.centroid += cell * x;
          }
        }
    if (piece.weight > 0) piece.centroid /= piece.weight;
    add_piece(piece);
  };

  const int zmax = n == 3 ? s.patch_hi[2] - 1 : 0;
  for (int z = s.patch_lo[2]; z <= zmax; ++z)
    for (int y = s.patch_lo[1]; y < s.patch_hi[1]; ++y)
      for (int x = s.patch_lo[0]; x < s.patch_hi[0]; ++x) {
        const Index3 c(x, y, z);
        bool all_valid = true, any_below = false, any_valid = false;
        for (int corner = 0; corner < (1 << n); ++corner) {
          Index3 m = c;
          for (int a = 0; a < n; ++a) m[a] += (corner >> a) & 1;
          const double f = s.phi_at(m);
          if (std::isnan(f)) all_valid = false;
          else {
            any_valid = true;
            any_below = any_below || f < 0;
          }
        }
        if (!any_valid) continue;
        if (!all_valid) {
          subsample(c, n == 2 ? 8 : 4, false);
          continue;
        }
        if (!any_below) continue;
        if (n == 3) {
          subsample(c, 4, true);
          continue;
        }
        const Index3 c10 = c + Index3(1, 0, 0), c11 = c + Index3(1, 1, 0), c01 = c + Index3(0, 1, 0);
        const Vec p00 = grid.point(c), p10 = grid.point(c10), p11 = grid.point(c11), p01 = grid.point(c01);
        const double f00 = s.phi_at(c), f10 = s.phi_at(c10), f11 = s.phi_at(c11), f01 = s.phi_at(c01);
        const Piece a = clip_triangle({p00, p10, p11}, {f00, f10, f11});
        const Piece b = clip_triangle({p00, p11, p01}, {f00, f11, f01});
        Piece both;
        both.weight = a.weight + b.weight;
        if (both.weight > 0) both.centroid = (a.weight * a.centroid + b.weight * b.centroid) / both.weight;
        add_piece(both);
      }

  for (std::size_t i = 0; i < s.mass_points.size(); ++i) {
    s.measure += s.mass_weights[i];
    s.center += s.mass_weights[i] * s.mass_points[i];
  }
  if (!(s.measure > 0)) throw Error(ErrorKind::too_small, "section has zero measure");
  s.center /= s.measure;
  s.d_h = s.center[n - 1];
  return s;
}

Vec SlidingMap::apply(const Vec& x) const { return x - tau * x[dimension - 1]; }

Vec SlidingMap::inverse(const Vec& x) const { return x + tau * x[dimension - 1]; }

SlidingMap sliding_from_center(const Section& section) {
  if (!(section.d_h > 1e-9 * section.spacing)) throw Error(ErrorKind::degenerate_section, "section center is not above the boundary plane");
  SlidingMap m;
  const int n = section.dimension;
  m.dimension = n;
  for (int i = 0; i + 1 < n; ++i) m.tau[i] = section.center[i] / section.d_h;
  return m;
}

Vec mapped_center(const Section& section, const SlidingMap& map) {
  Vec c = Vec::Zero();
  double w = 0.0;
  for (std::size_t i = 0; i < section.mass_points.size(); ++i) {
    c += section.mass_weights[i] * map.apply(section.mass_points[i]);
    w += section.mass_weights[i];
  }
  return c / w;
}

SliceAxes slice_john_axes(const Section& s, double level) {
  const int n = s.dimension;
  const double hg = s.spacing;
  const double sl = level / hg;
  int j0 = static_cast<int>(std::floor(sl));
  double t = sl - j0;
  if (t < 1e-12) t = 0.0;
  if (t > 1.0 - 1e-12) {
    ++j0;
    t = 0.0;
  }
  const int axis = n - 1;
  // phi on the level, interpolated between the two node layers around it
  const auto at_level = [&](Index3 m) {
    m[axis] = j0;
    const double f0 = s.phi_at(m);
    if (t == 0.0) return f0;
    m[axis] = j0 + 1;
    return (1.0 - t) * f0 + t * s.phi_at(m);
  };
  const auto point_of = [&](const Index3& m) {
    Vec x = hg * m.cast<double>();
    x[axis] = level;
    return x;
  };

  SliceAxes out;
  if (n == 2) {
    int count = 0, imin = std::numeric_limits<int>::max(), imax = std::numeric_limits<int>::min();
    for (int i = s.patch_lo[0]; i <= s.patch_hi[0]; ++i)
      if (at_level(Index3(i, 0, 0)) < 0) {
        ++count;
        imin = std::min(imin, i);
        imax = std::max(imax, i);
      }
    if (count < 3) throw Error(ErrorKind::empty_slice, "slice holds fewer than 3 nodes");
    const auto end = [&](int inside, int step) {
      const double fi = at_level(Index3(inside, 0, 0));
      const double fo = at_level(Index3(inside + step, 0, 0));
      const Vec xi = point_of(Index3(inside, 0, 0));
      if (!std::isnan(fo)) return xi[0] + step * hg * fi / (fi - fo);
      return xi[0] + step * s.domain.ray_exit(xi, step * unit(0), hg);
    };
    const double left = end(imin, -1), right = end(imax, +1);
    out.semiaxes = {0.5 * (right - left)};
    out.rotation = Eigen::MatrixXd::Identity(1, 1);
    out.center = Eigen::VectorXd::Constant(1, 0.5 * (left + right));
    out.containment = 1.0;
    return out;
  }

  std::vector<Point2> pts;
  int count = 0;
  for (int y = s.patch_lo[1]; y <= s.patch_hi[1]; ++y)
    for (int x = s.patch_lo[0]; x <= s.patch_hi[0]; ++x) {
      const Index3 m(x, y, 0);
      const double f = at_level(m);
      if (!(f < 0)) continue;
      ++count;
      const Vec p = point_of(m);
      pts.emplace_back(p[0], p[1]);
      for (int a = 0; a < 2; ++a)
        for (int step : {-1, 1}) {
          Index3 q = m;
          q[a] += step;
          const double fq = at_level(q);
          if (fq < 0) continue;
          Vec e = Vec::Zero();
          e[a] = step;
          const double len = std::isnan(fq) ? s.domain.ray_exit(p, e, hg) : hg * f / (f - fq);
          const Vec c = p + len * e;
          pts.emplace_back(c[0], c[1]);
        }
    }
  if (count < 5) throw Error(ErrorKind::empty_slice, "slice holds fewer than 5 nodes");
  const auto hull = convex_hull(pts);
  const Ellipse e = max_inscribed_ellipse(hull);
  double worst = 0.0;
  for (const auto& v : hull) worst = std::max(worst, e.gauge(v));
  if (worst > 2.0 * (1.0 + 1e-6)) throw Error(ErrorKind::degenerate_section, "inscribed ellipse fails John containment");
  Eigen::Vector2d ax;
  Eigen::Matrix2d rot;
  e.axes(ax, rot);
  out.semiaxes = {ax[0], ax[1]};
  out.rotation = rot;
  out.center = e.center;
  out.containment = worst;
  return out;
}

double dn_from_axes(const std::vector<double>& axes, double h, double alpha) {
  double prod = 1.0;
  for (double d : axes) {
    if (!(d > 0)) throw Error(ErrorKind::input, "axes must be positive");
    prod *= d * d;
  }
  const int n = static_cast<int>(axes.size()) + 1;
  return std::pow(std::pow(h, n) / prod, 1.0 / (2.0 + alpha));
}

NormalizationRecord normalize_section(const ScalarField& field, const Vec& x0, double h, double alpha, const Vec& slope) {
  const Section s = compute_section(field, x0, slope, h);
  const SlidingMap map = sliding_from_center(s);
  const SliceAxes axes = slice_john_axes(s, s.d_h);
  NormalizationRecord r;
  const int n = s.dimension;
  r.h = h;
  r.tau = map.tau;
  r.axes = axes.semiaxes;
  r.d_n = dn_from_axes(r.axes, h, alpha);
  r.d_h = s.d_h;
  r.measure = s.measure;
  r.volume_ratio = s.measure * s.measure * std::pow(s.d_h, alpha) / std::pow(h, n);
  double prod = std::pow(r.d_n, 2.0 + alpha);
  for (double d : r.axes) prod *= d * d;
  if (std::abs(prod / std::pow(h, n) - 1.0) > 1e-10) throw Error(ErrorKind::degenerate_section, "closure relation violated");
  return r;
}

ScalingFit scaling_fit(const std::vector<NormalizationRecord>& records) {
  if (records.size() < 4) throw Error(ErrorKind::insufficient_data, "need at least 4 records");
  double hmin = std::numeric_limits<double>::infinity(), hmax = 0.0;
  for (const auto& r : records) {
    hmin = std::min(hmin, r.h);
    hmax = std::max(hmax, r.h);
  }
  if (hmax / hmin < 100.0 * (1.0 - 1e-9)) throw Error(ErrorKind::insufficient_data, "records span less than two decades of h");
  std::vector<NormalizationRecord> sorted = records;
  std::sort(sorted.begin(), sorted.end(), [](const auto& a, const auto& b) { return a.h < b.h; });
  std::vector<double> lh;
  for (const auto& r : sorted) lh.push_back(std::log(r.h));
  ScalingFit fit;
  fit.r2 = 1.0;
  const auto fit_of = [&](auto get) {
    std::vector<double> y;
    for (const auto& r : sorted) y.push_back(std::log(get(r)));
    const auto [slope, r2] = fit_line(lh, y);
    fit.r2 = std::min(fit.r2, r2);
    return slope;
  };
  const std::size_t k = sorted.front().axes.size();
  for (std::size_t i = 0; i < k; ++i) fit.axis_slopes.push_back(fit_of([i](const auto& r) { return r.axes[i]; }));
  fit.tangential_slope = std::accumulate(fit.axis_slopes.begin(), fit.axis_slopes.end(), 0.0) / static_cast<double>(k);
  fit.normal_slope = fit_of([](const auto& r) { return r.d_n; });
  fit.dh_slope = fit_of([](const auto& r) { return r.d_h; });
  return fit;
}

std::vector<double> h_ladder(double h_max, double h_grid) {
  std::vector<double> out;
  const double floor = 100.0 * h_grid * h_grid;
  for (double h = h_max; h >= floor * (1.0 - 1e-12); h *= 0.5) out.push_back(h);
  return out;
}

ScalarField subtract_supporting_plane(const ScalarField& field) {
  const Grid& grid = field.grid();
  const int n = field.dimension();
  const double u0 = field.value_at(Vec::Zero());
  double b = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < grid.size(); ++k) {
    if (field.kind(k) == NodeKind::exterior) continue;
    const Vec x = grid.point(k);
    if (x[n - 1] > 0) b = std::min(b, (field.value(k) - u0) / x[n - 1]);
  }
  if (!std::isfinite(b)) throw Error(ErrorKind::domain, "no nodes above the boundary plane");
  std::vector<double> values(field.values().begin(), field.values().end());
  for (std::size_t k = 0; k < grid.size(); ++k)
    if (field.kind(k) != NodeKind::exterior) values[k] -= b * grid.point(k)[n - 1];
  const PointFunction trace = field.trace();
  return ScalarField(field.domain(), grid, [trace, b, n](const Vec& x) { return trace(x) - b * x[n - 1]; }, std::move(values));
}

TangentConeProfile tangent_cone_profile(const ScalarField& field, const std::vector<Vec>& directions,
                                        const std::vector<double>& lambdas) {
  const int n = field.dimension();
  if (lambdas.size() < 2) throw Error(ErrorKind::input, "need at least two scales");
  for (std::size_t i = 0; i < lambdas.size(); ++i) {
    if (i > 0 && !(lambdas[i] < lambdas[i - 1])) throw Error(ErrorKind::input, "scales must decrease strictly");
    if (lambdas[i] < 2.0 * field.grid().spacing()) throw Error(ErrorKind::resolution, "scale below two grid spacings");
  }
  TangentConeProfile out;
  out.directions = directions;
  out.lambdas = lambdas;
  for (const Vec& e : directions) {
    if (e[n - 1] != 0.0) throw Error(ErrorKind::input, "directions must be tangential");
    std::vector<double> row;
    for (double l : lambdas) {
      Vec x = l * e;
      x[n - 1] = l;
      if (!field.domain().contains(x)) throw Error(ErrorKind::domain, "probe point outside the domain");
      row.push_back(field.value_at(x) / l);
    }
    const std::size_t m = lambdas.size();
    const double l1 = lambdas[m - 2], l2 = lambdas[m - 1];
    out.gamma.push_back((l1 * row[m - 1] - l2 * row[m - 2]) / (l1 - l2));
    out.estimates.push_back(std::move(row));
  }
  return out;
}

MonitorReport growth_envelope(const ScalarField& field, double radius) {
  MonitorReport rep;
  rep.name = "growth_envelope";
  const Grid& grid = field.grid();
  bool any = false;
  for (std::size_t k = 0; k < grid.size(); ++k) {
    if (field.kind(k) == NodeKind::exterior) continue;
    const Vec x = grid.point(k);
    const double r = x.norm();
    if (r == 0.0 || r > radius) continue;
    const double v = field.value(k) / std::pow(r, 4.0 / 3.0);
    if (!any || v > rep.max_value) {
      rep.max_value = v;
      rep.argmax = x;
      any = true;
    }
  }
  rep.context["convexity_flag"] = field.convexity_flag() ? 1.0 : 0.0;
  rep.context["radius"] = radius;
  return rep;
}

MonitorReport pogorelov_monitor(const ScalarField& field, const Section& section, const Index3& direction) {
  const Grid& grid = field.grid();
  const int n = field.dimension();
  Vec dir = direction.cast<double>();
  if (dir[n - 1] != 0.0 || dir.norm() == 0.0) throw Error(ErrorKind::input, "direction must be a nonzero tangential lattice vector");
  dir.normalize();
  MonitorReport rep;
  rep.name = "pogorelov";
  double depth = 0.0, max_u1 = 0.0;
  double pmin = std::numeric_limits<double>::infinity(), pmax = -pmin;
  bool any = false;
  for (const Vec& x : section.nodes) {
    const Index3 m = nearest_index(x, grid.spacing());
    if (!grid.in_range(m)) throw Error(ErrorKind::precondition, "section node outside the field's grid");
    const std::size_t k = grid.linear(m);
    const double w = field.value(k) - section.base_value - section.slope.dot(x - section.base_point) - section.height;
    if (!(w < 0)) throw Error(ErrorKind::precondition, "u - plane - h is nonnegative at a section node");
    depth = std::max(depth, -w);
    pmin = std::min(pmin, dir.dot(x));
    pmax = std::max(pmax, dir.dot(x));
    if (field.kind(k) != NodeKind::interior) continue;
    const SecondDifference d = field.second_difference(k, direction);
    const double d2 = field.apply(d, field.value(k));
    const double up = d.plus.node >= 0 ? field.value(static_cast<std::size_t>(d.plus.node)) : d.plus.value;
    const double um = d.minus.node >= 0 ? field.value(static_cast<std::size_t>(d.minus.node)) : d.minus.value;
    max_u1 = std::max(max_u1, std::abs(up - um) / (d.plus.length + d.minus.length));
    const double v = d2 * std::abs(w);
    if (!any || v > rep.max_value) {
      rep.max_value = v;
      rep.argmax = x;
      any = true;
    }
  }
  const double half_width = 0.5 * (pmax - pmin);
  rep.context["max_abs_u1"] = max_u1;
  rep.context["depth"] = depth;
  rep.context["half_width"] = half_width;
  rep.context["height"] = section.height;
  rep.context["normalized"] = rep.max_value * half_width * half_width / (section.height * section.height);
  return rep;
}

MonitorReport normal_derivative_monitor(const ScalarField& field, double alpha, double radius) {
  const Grid& grid = field.grid();
  const int n = field.dimension();
  const double hg = grid.spacing();
  MonitorReport rep;
  rep.name = "normal_derivative";
  int count = 0;
  for (std::size_t k = 0; k < grid.size(); ++k) {
    if (field.kind(k) == NodeKind::exterior) continue;
    const Index3 m = grid.multi(k);
    const Vec x = grid.point(m);
    if (x[n - 1] < 4.0 * hg * (1.0 - 1e-12) || x.norm() > radius) continue;
    double u[5];
    bool ok = true;
    for (int s = -2; s <= 2 && ok; ++s) {
      Index3 q = m;
      q[n - 1] += s;
      if (!grid.in_range(q) || field.kind(grid.linear(q)) == NodeKind::exterior) ok = false;
      else u[s + 2] = field.value(grid.linear(q));
    }
    if (!ok) continue;
    const double un = (u[0] - 8.0 * u[1] + 8.0 * u[3] - u[4]) / (12.0 * hg);
    const double ratio = un / std::pow(x[n - 1], 1.0 + alpha);
    if (count == 0 || ratio > rep.max_value) {
      rep.max_value = ratio;
      rep.argmax = x;
    }
    ++count;
  }
  rep.context["bound"] = 1.0 / (1.0 + alpha);
  rep.context["nodes"] = count;
  rep.context["radius"] = radius;
  return rep;
}

}  // namespace malab
