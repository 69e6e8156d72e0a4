#include "malab/transforms.hpp"

#include "malab/error.hpp"

#include <Eigen/LU>

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>

namespace malab {

namespace {

struct PointCloud {
  std::vector<Vec> x;
  std::vector<double> u;

  [[nodiscard]] double conjugate(const Vec& xi) const {
    double best = -std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < x.size(); ++k) best = std::max(best, x[k].dot(xi) - u[k]);
    return best;
  }
};

// Implicit derivatives of the level set graph through the point X (u_n must be positive).
LevelSetSample implicit_sample(const SmoothFunction& u, const Vec& X) {
  const int n = u.dimension;
  const Vec g = u.gradient(X);
  const Mat H = u.hessian(X);
  const double un = g[n - 1];
  if (!(un > 0)) throw Error(ErrorKind::monotonicity, "u is not increasing in x_n at the probed point");
  LevelSetSample s;
  s.xprime = X;
  s.xprime[n - 1] = 0.0;
  s.s = u.value(X);
  s.v = -X[n - 1];
  s.v_s = -1.0 / un;
  for (int i = 0; i + 1 < n; ++i) s.grad_v[i] = g[i] / un;
  Eigen::MatrixXd J = Eigen::MatrixXd::Zero(n, n);
  for (int a = 0; a + 1 < n; ++a) {
    J(a, a) = 1.0;
    J(n - 1, a) = -s.grad_v[a];
  }
  J(n - 1, n - 1) = -s.v_s;
  s.hessian = J.transpose() * H.topLeftCorner(n, n) * J / un;
  return s;
}

}  // namespace

ScalarField legendre_full(const ScalarField& field, const Grid& dual) {
  if (dual.dimension() != field.dimension()) throw Error(ErrorKind::input, "dual grid dimension differs");
  auto cloud = std::make_shared<PointCloud>();
  const Grid& g = field.grid();
  for (std::size_t k = 0; k < g.size(); ++k) {
    if (field.kind(k) == NodeKind::exterior) continue;
    cloud->x.push_back(g.point(k));
    cloud->u.push_back(field.value(k));
  }
  const Box b = dual.bounds();
  const ConvexDomain box = ConvexDomain::box(dual.dimension(), b.lower, b.upper);
  std::vector<double> values(dual.size());
  for (std::size_t k = 0; k < dual.size(); ++k) values[k] = cloud->conjugate(dual.point(k));
  return ScalarField(box, dual, [cloud](const Vec& xi) { return cloud->conjugate(xi); }, std::move(values));
}

double legendre_involution_error(const ScalarField& field, const ScalarField& dual) {
  PointCloud cloud;
  const Grid& dg = dual.grid();
  for (std::size_t k = 0; k < dg.size(); ++k) {
    if (dual.kind(k) == NodeKind::exterior) continue;
    cloud.x.push_back(dg.point(k));
    cloud.u.push_back(dual.value(k));
  }
  double err = 0.0;
  for (std::size_t k : field.interior_nodes())
    err = std::max(err, std::abs(cloud.conjugate(field.grid().point(k)) - field.value(k)));
  return err;
}

PartialLegendre partial_legendre_2d(const ScalarField& field, int p_samples) {
  if (field.dimension() != 2) throw Error(ErrorKind::domain, "partial Legendre transform is 2D only");
  if (p_samples < 5) throw Error(ErrorKind::input, "need at least 5 slope samples");
  const Grid& g = field.grid();
  struct Row {
    double y;
    std::vector<double> x, u;
  };
  std::vector<Row> rows;
  for (int j = g.lo()[1]; j <= g.hi()[1]; ++j) {
    Row row{g.spacing() * j, {}, {}};
    for (int i = g.lo()[0]; i <= g.hi()[0]; ++i) {
      const std::size_t k = g.linear(Index3(i, j, 0));
      if (field.kind(k) == NodeKind::exterior) continue;
      row.x.push_back(g.point(k)[0]);
      row.u.push_back(field.value(k));
    }
    if (row.x.size() >= 5) rows.push_back(std::move(row));
  }
  if (rows.size() < 3) throw Error(ErrorKind::insufficient_data, "too few rows for a partial Legendre transform");

  double pmin = -std::numeric_limits<double>::infinity(), pmax = -pmin;
  for (const auto& row : rows) {
    const double scale = std::max(1.0, std::abs(row.u.front()) + std::abs(row.u.back()));
    for (std::size_t i = 1; i + 1 < row.x.size(); ++i) {
      const double d2 = row.u[i - 1] - 2.0 * row.u[i] + row.u[i + 1];
      if (d2 <= 1e-12 * scale) throw Error(ErrorKind::multivalued, "row is not strictly convex in x_1");
    }
    const std::size_t m = row.x.size();
    pmin = std::max(pmin, (row.u[1] - row.u[0]) / (row.x[1] - row.x[0]));
    pmax = std::min(pmax, (row.u[m - 1] - row.u[m - 2]) / (row.x[m - 1] - row.x[m - 2]));
  }
  if (!(pmax > pmin)) throw Error(ErrorKind::insufficient_data, "rows share no common slope range");

  PartialLegendre out;
  for (int i = 0; i < p_samples; ++i) out.p.push_back(pmin + (pmax - pmin) * i / (p_samples - 1));
  for (const auto& row : rows) out.xn.push_back(row.y);
  out.values.resize(out.p.size() * rows.size());
  for (std::size_t j = 0; j < rows.size(); ++j)
    for (std::size_t i = 0; i < out.p.size(); ++i) {
      double best = -std::numeric_limits<double>::infinity();
      for (std::size_t k = 0; k < rows[j].x.size(); ++k) best = std::max(best, out.p[i] * rows[j].x[k] - rows[j].u[k]);
      out.values[j * out.p.size() + i] = best;
    }
  return out;
}

double grushin_residual(const PartialLegendre& pl, double alpha) {
  double worst = 0.0;
  const std::size_t np = pl.p.size(), ny = pl.xn.size();
  for (std::size_t j = 1; j + 1 < ny; ++j) {
    const double hy0 = pl.xn[j] - pl.xn[j - 1], hy1 = pl.xn[j + 1] - pl.xn[j];
    for (std::size_t i = 1; i + 1 < np; ++i) {
      const double hp = pl.p[i] - pl.p[i - 1];
      const double upp = (pl.at(i - 1, j) - 2.0 * pl.at(i, j) + pl.at(i + 1, j)) / (hp * hp);
      const double uyy = 2.0 / (hy0 + hy1) * ((pl.at(i, j + 1) - pl.at(i, j)) / hy1 - (pl.at(i, j) - pl.at(i, j - 1)) / hy0);
      worst = std::max(worst, std::abs(uyy + std::pow(pl.xn[j], alpha) * upp));
    }
  }
  return worst;
}

double partial_legendre_u0(double p, double y, double alpha) {
  if (y < 0) throw Error(ErrorKind::domain, "x_n must be nonnegative");
  return 0.5 * p * p - std::pow(y, 2.0 + alpha) / ((1.0 + alpha) * (2.0 + alpha));
}

std::pair<double, double> partial_legendre_second_derivatives(const Mat& h) {
  if (!(h(0, 0) > 0)) throw Error(ErrorKind::multivalued, "u_11 must be positive");
  const double det = h(0, 0) * h(1, 1) - h(0, 1) * h(1, 0);
  return {1.0 / h(0, 0), -det / h(0, 0)};
}

double grushin_residual_from_hessian(const Mat& hessian_2d, double y, double alpha) {
  const auto [upp, uyy] = partial_legendre_second_derivatives(hessian_2d);
  return uyy + std::pow(y, alpha) * upp;
}

LevelSetSample level_set_point(const SmoothFunction& u, const Vec& xprime, double s, double lo, double hi) {
  const int n = u.dimension;
  if (!(hi > lo)) throw Error(ErrorKind::input, "empty bracket");
  auto at = [&](double xn) {
    Vec X = xprime;
    X[n - 1] = xn;
    return u.value(X);
  };
  constexpr int kChecks = 32;
  double prev = at(lo);
  for (int k = 1; k <= kChecks; ++k) {
    const double cur = at(lo + (hi - lo) * k / kChecks);
    if (!(cur > prev)) throw Error(ErrorKind::monotonicity, "u is not strictly increasing in x_n on the probed line");
    prev = cur;
  }
  if (!(at(lo) <= s && s <= at(hi))) throw Error(ErrorKind::domain, "level not bracketed on the probed line");
  double a = lo, b = hi;
  for (int it = 0; it < 200 && b - a > 1e-12 * std::max(1.0, std::abs(a)); ++it) {
    const double mid = 0.5 * (a + b);
    (at(mid) < s ? a : b) = mid;
  }
  Vec X = xprime;
  X[n - 1] = 0.5 * (a + b);
  LevelSetSample out = implicit_sample(u, X);
  out.s = s;
  return out;
}

std::vector<LevelSetSample> level_set_graph(const SmoothFunction& u, const std::vector<Vec>& patch, double s,
                                            double lo, double hi) {
  std::vector<LevelSetSample> out;
  out.reserve(patch.size());
  for (const Vec& xp : patch) out.push_back(level_set_point(u, xp, s, lo, hi));
  // Convexity of v in x' by second differences along each axis through the probed points.
  const int n = u.dimension;
  const double step = 1e-3;
  for (const auto& sample : out) {
    for (int a = 0; a + 1 < n; ++a) {
      Vec e = Vec::Zero();
      e[a] = step;
      try {
        const double vp = level_set_point(u, sample.xprime + e, s, lo, hi).v;
        const double vm = level_set_point(u, sample.xprime - e, s, lo, hi).v;
        if (vp - 2.0 * sample.v + vm < -1e-9) throw Error(ErrorKind::precondition, "level set graph is not convex");
      } catch (const Error& err) {
        if (err.kind() == ErrorKind::precondition) throw;
        // Neighbor probe left the bracketed patch; nothing to compare against.
      }
    }
  }
  return out;
}

double GaussIdentity::max_deviation() const {
  return std::max({std::abs(normal_map - graph), std::abs(level_set - graph), std::abs(weighted_lhs - weighted_rhs)});
}

GaussIdentity gauss_identity(const SmoothFunction& u, const Vec& x, double alpha) {
  const int n = u.dimension;
  const Vec g = u.gradient(x);
  const Eigen::MatrixXd H = u.hessian(x).topLeftCorner(n, n);
  const Eigen::VectorXd gn = g.head(n);
  const double W = 1.0 + gn.squaredNorm();
  GaussIdentity out;
  const Eigen::MatrixXd M = H / std::sqrt(W) - gn * (gn.transpose() * H) / std::pow(W, 1.5);
  out.normal_map = M.determinant();
  const double detH = H.determinant();
  out.graph = std::pow(W, -0.5 * (n + 2)) * detH;
  const LevelSetSample s = implicit_sample(u, x);
  const double detV = s.hessian.determinant();
  const double un = gn[n - 1];
  out.level_set = std::pow(un / std::sqrt(W), n + 2) * detV;
  out.weighted_lhs = std::pow(un, alpha) * detH;
  out.weighted_rhs = std::pow(std::abs(s.v_s), -(n + 2 + alpha)) * detV;
  return out;
}

MonitorReport levelset_pogorelov_monitor(const SmoothFunction& u, double sigma, const Box& box, int resolution) {
  const int n = u.dimension;
  if (resolution < 3) throw Error(ErrorKind::input, "resolution must be at least 3");
  MonitorReport rep;
  rep.name = "levelset_pogorelov";
  double max_un = 0.0, max_v1 = 0.0, depth = 0.0;
  double x1min = std::numeric_limits<double>::infinity(), x1max = -x1min;
  bool any = false;
  const int kmax = n == 3 ? resolution : 1;
  for (int i = 0; i < resolution; ++i)
    for (int j = 0; j < resolution; ++j)
      for (int k = 0; k < kmax; ++k) {
        Vec x = Vec::Zero();
        const int idx[3] = {i, j, k};
        for (int a = 0; a < n; ++a)
          x[a] = box.lower[a] + (box.upper[a] - box.lower[a]) * (idx[a] + 0.5) / resolution;
        const double w = u.value(x) - sigma * x[n - 1];
        if (!(w < 0)) continue;
        const LevelSetSample s = implicit_sample(u, x);
        const double val = s.hessian(0, 0) * std::abs(w);
        if (!any || val > rep.max_value) {
          rep.max_value = val;
          rep.argmax = x;
        }
        any = true;
        max_un = std::max(max_un, -1.0 / s.v_s);
        max_v1 = std::max(max_v1, std::abs(s.grad_v[0]));
        depth = std::max(depth, std::abs(w));
        x1min = std::min(x1min, x[0]);
        x1max = std::max(x1max, x[0]);
      }
  if (!any) throw Error(ErrorKind::precondition, "u - sigma x_n is nonnegative on the probed box");
  const double half_width = 0.5 * (x1max - x1min);
  rep.context["max_u_n"] = max_un;
  rep.context["max_abs_v1"] = max_v1;
  rep.context["depth"] = depth;
  rep.context["half_width"] = half_width;
  rep.context["normalized"] = rep.max_value * half_width * half_width / (depth * depth);
  return rep;
}

}  // namespace malab
