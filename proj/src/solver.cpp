#include "malab/solver.hpp"

#include "malab/error.hpp"

#include <Eigen/SparseLU>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <numeric>
#include <thread>

namespace malab {

namespace {

using Clock = std::chrono::steady_clock;

template <class F>
void parallel_for(std::size_t n, F&& body) {
  const auto workers = static_cast<std::size_t>(thread_count());
  if (workers <= 1 || n < 4096) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::vector<std::thread> pool;
  const std::size_t chunk = (n + workers - 1) / workers;
  for (std::size_t w = 0; w < workers; ++w) {
    const std::size_t b = w * chunk, e = std::min(n, b + chunk);
    if (b >= e) break;
    pool.emplace_back([&, b, e] {
      for (std::size_t i = b; i < e; ++i) body(i);
    });
  }
  for (auto& t : pool) t.join();
}

// Second differences of every interior node along every stencil direction, built once per solve.
class Discretization {
public:
  Discretization(const ScalarField& field, int width)
      : dirs_(make_directions(field.dimension(), width)), interior_(field.interior_nodes()) {
    const std::size_t nd = dirs_.directions.size();
    position_.assign(field.grid().size(), -1);
    for (std::size_t i = 0; i < interior_.size(); ++i) position_[interior_[i]] = static_cast<std::ptrdiff_t>(i);
    diffs_.resize(interior_.size() * nd);
    parallel_for(interior_.size(), [&](std::size_t i) {
      for (std::size_t d = 0; d < nd; ++d) diffs_[i * nd + d] = field.second_difference(interior_[i], dirs_.directions[d]);
    });
  }

  [[nodiscard]] std::size_t unknowns() const { return interior_.size(); }
  [[nodiscard]] std::size_t directions() const { return dirs_.directions.size(); }
  [[nodiscard]] const DirectionSet& direction_set() const { return dirs_; }
  [[nodiscard]] std::size_t node(std::size_t i) const { return interior_[i]; }
  [[nodiscard]] std::ptrdiff_t position(std::ptrdiff_t node) const { return node < 0 ? -1 : position_[static_cast<std::size_t>(node)]; }
  [[nodiscard]] const SecondDifference& diff(std::size_t i, std::size_t d) const { return diffs_[i * directions() + d]; }

  // Off-center part c+ u+ + c- u- of a second difference.
  [[nodiscard]] double offcenter(const std::vector<double>& u, const SecondDifference& s) const {
    const double up = s.plus.node >= 0 ? u[static_cast<std::size_t>(s.plus.node)] : s.plus.value;
    const double um = s.minus.node >= 0 ? u[static_cast<std::size_t>(s.minus.node)] : s.minus.value;
    return s.plus_weight * up + s.minus_weight * um;
  }

  // Operator value at interior position i with the given center value; optionally reports the
  // active frame and the directional differences.
  double apply(const std::vector<double>& u, std::size_t i, double center, int* active = nullptr,
               double* deltas = nullptr) const {
    const std::size_t nd = directions();
    double local[64];
    double* dl = deltas ? deltas : local;
    for (std::size_t d = 0; d < nd; ++d) {
      const auto& s = diff(i, d);
      dl[d] = offcenter(u, s) + s.center_weight * center;
    }
    double best = std::numeric_limits<double>::infinity();
    int arg = 0;
    for (std::size_t f = 0; f < dirs_.frames.size(); ++f) {
      double p = 1.0;
      for (int d : dirs_.frames[f]) p *= std::max(dl[d], 0.0);
      if (p < best) {
        best = p;
        arg = static_cast<int>(f);
      }
    }
    if (active) *active = arg;
    return best;
  }

  // Solves apply(center) = f for the center value by bisection on the nonincreasing map.
  [[nodiscard]] double local_solve(const std::vector<double>& u, std::size_t i, double f) const {
    const std::size_t nd = directions();
    double hi = std::numeric_limits<double>::infinity();
    double cmin = std::numeric_limits<double>::infinity();
    for (std::size_t d = 0; d < nd; ++d) {
      const auto& s = diff(i, d);
      hi = std::min(hi, offcenter(u, s) / -s.center_weight);
      cmin = std::min(cmin, -s.center_weight);
    }
    if (f <= 0.0) return hi;
    const int n = dirs_.dimension;
    double lo = hi - std::pow(f, 1.0 / n) / cmin;
    for (int it = 0; it < 200; ++it) {
      const double mid = 0.5 * (lo + hi);
      if (mid <= lo || mid >= hi) break;
      (apply(u, i, mid) >= f ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
  }

private:
  DirectionSet dirs_;
  std::vector<std::size_t> interior_;
  std::vector<std::ptrdiff_t> position_;
  std::vector<SecondDifference> diffs_;
};

double sup_residual(const Discretization& disc, const std::vector<double>& u, const std::vector<double>& f,
                    std::vector<double>* out = nullptr) {
  std::vector<double> r(disc.unknowns());
  parallel_for(disc.unknowns(), [&](std::size_t i) {
    const std::size_t k = disc.node(i);
    r[i] = disc.apply(u, i, u[k]) - f[k];
  });
  double sup = 0.0;
  for (double v : r) sup = std::max(sup, std::abs(v));
  if (out) *out = std::move(r);
  return sup;
}

// Sum of axis second differences equal to n f^(1/n); an upper bound for the trace by AM-GM.
std::vector<double> poisson_guess(const Discretization& disc, const std::vector<double>& base,
                                  const std::vector<double>& f, int n) {
  const std::size_t m = disc.unknowns();
  std::vector<Eigen::Triplet<double>> trip;
  Eigen::VectorXd b(static_cast<Eigen::Index>(m));
  for (std::size_t i = 0; i < m; ++i) {
    double rhs = n * std::pow(f[disc.node(i)], 1.0 / n);
    double diag = 0.0;
    for (int a = 0; a < n; ++a) {
      const auto& s = disc.diff(i, static_cast<std::size_t>(a));
      diag += s.center_weight;
      for (const auto& [arm, w] : {std::pair{s.plus, s.plus_weight}, std::pair{s.minus, s.minus_weight}}) {
        const std::ptrdiff_t p = disc.position(arm.node);
        if (p >= 0) trip.emplace_back(static_cast<int>(i), static_cast<int>(p), w);
        else rhs -= w * (arm.node >= 0 ? base[static_cast<std::size_t>(arm.node)] : arm.value);
      }
    }
    trip.emplace_back(static_cast<int>(i), static_cast<int>(i), diag);
    b[static_cast<Eigen::Index>(i)] = rhs;
  }
  Eigen::SparseMatrix<double> a(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(m));
  a.setFromTriplets(trip.begin(), trip.end());
  Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
  lu.compute(a);
  std::vector<double> u = base;
  if (lu.info() != Eigen::Success) return u;
  const Eigen::VectorXd x = lu.solve(b);
  for (std::size_t i = 0; i < m; ++i) u[disc.node(i)] = x[static_cast<Eigen::Index>(i)];
  return u;
}

struct GaussSeidel {
  const Discretization& disc;
  const std::vector<double>& f;
  SweepOrder order;

  void sweep(std::vector<double>& u, double omega) const {
    const std::size_t m = disc.unknowns();
    if (order == SweepOrder::lexicographic) {
      for (std::size_t i = 0; i < m; ++i) {
        const std::size_t k = disc.node(i);
        u[k] += omega * (disc.local_solve(u, i, f[k]) - u[k]);
      }
      return;
    }
    // Red-black: each color is updated from a frozen copy, so the result does not depend on the
    // number of workers.
    std::vector<double> next(m);
    for (int color = 0; color < 2; ++color) {
      parallel_for(m, [&](std::size_t i) {
        const std::size_t k = disc.node(i);
        next[i] = disc.local_solve(u, i, f[k]);
      });
      for (std::size_t i = 0; i < m; ++i) {
        const std::size_t k = disc.node(i);
        const Index3 idx = multi_of(k);
        if (((idx[0] + idx[1] + idx[2]) & 1) == color) u[k] += omega * (next[i] - u[k]);
      }
    }
  }

  std::function<Index3(std::size_t)> multi_of;
};

// Semismooth Newton on the active-frame products with the stencil pattern analyzed once.
class Newton {
public:
  Newton(const Discretization& disc, const std::vector<double>& f) : disc_(disc), f_(f) {
    const std::size_t m = disc.unknowns();
    const std::size_t nd = disc.directions();
    for (std::size_t i = 0; i < m; ++i) {
      pattern_.emplace_back(static_cast<int>(i), static_cast<int>(i), 0.0);
      for (std::size_t d = 0; d < nd; ++d) {
        const auto& s = disc.diff(i, d);
        for (const Arm* arm : {&s.plus, &s.minus}) {
          const std::ptrdiff_t p = disc.position(arm->node);
          if (p >= 0) pattern_.emplace_back(static_cast<int>(i), static_cast<int>(p), 0.0);
        }
      }
    }
    double fmax = 0.0;
    for (std::size_t i = 0; i < m; ++i) fmax = std::max(fmax, f[disc.node(i)]);
    floor_ = 1e-12 * std::max(1.0, fmax);
  }

  // Residual vector and Jacobian at u; returns false if the factorization fails.
  bool linearize(const std::vector<double>& u, Eigen::VectorXd& residual) {
    const std::size_t m = disc_.unknowns();
    const int n = disc_.direction_set().dimension;
    std::vector<Eigen::Triplet<double>> trip = pattern_;
    residual.resize(static_cast<Eigen::Index>(m));
    double deltas[64];
    for (std::size_t i = 0; i < m; ++i) {
      const std::size_t k = disc_.node(i);
      int active = 0;
      residual[static_cast<Eigen::Index>(i)] = disc_.apply(u, i, u[k], &active, deltas) - f_[k];
      const auto& frame = disc_.direction_set().frames[static_cast<std::size_t>(active)];
      for (int a = 0; a < n; ++a) {
        double factor = 1.0;
        for (int b = 0; b < n; ++b)
          if (b != a) factor *= std::max(deltas[frame[b]], floor_);
        const auto& s = disc_.diff(i, static_cast<std::size_t>(frame[a]));
        trip.emplace_back(static_cast<int>(i), static_cast<int>(i), factor * s.center_weight);
        for (const auto& [arm, w] : {std::pair{s.plus, s.plus_weight}, std::pair{s.minus, s.minus_weight}}) {
          const std::ptrdiff_t p = disc_.position(arm.node);
          if (p >= 0) trip.emplace_back(static_cast<int>(i), static_cast<int>(p), factor * w);
        }
      }
    }
    jac_.resize(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(m));
    jac_.setFromTriplets(trip.begin(), trip.end());
    if (!analyzed_) {
      lu_.analyzePattern(jac_);
      analyzed_ = true;
    }
    lu_.factorize(jac_);
    return lu_.info() == Eigen::Success;
  }

  Eigen::VectorXd solve(const Eigen::VectorXd& rhs) { return lu_.solve(rhs); }

private:
  const Discretization& disc_;
  const std::vector<double>& f_;
  std::vector<Eigen::Triplet<double>> pattern_;
  Eigen::SparseMatrix<double> jac_;
  Eigen::SparseLU<Eigen::SparseMatrix<double>> lu_;
  bool analyzed_ = false;
  double floor_ = 0.0;
};

double l2(const std::vector<double>& r) {
  double s = 0.0;
  for (double v : r) s += v * v;
  return std::sqrt(s);
}

}  // namespace

int thread_count() {
  if (const char* env = std::getenv("MALAB_THREADS")) {
    const int n = std::atoi(env);
    if (n >= 1) return n;
  }
  return 1;
}

std::string to_string(SweepOrder order) { return order == SweepOrder::lexicographic ? "lexicographic" : "red-black"; }
std::string to_string(SolveMethod method) { return method == SolveMethod::newton ? "newton" : "gauss_seidel"; }
std::string to_string(SolveStatus status) { return status == SolveStatus::converged ? "converged" : "diverged"; }

RhsSpec RhsSpec::degenerate(double alpha, PointFunction g) {
  RhsSpec r;
  r.mode = RhsMode::degenerate_distance;
  r.alpha = alpha;
  r.g = std::move(g);
  return r;
}

RhsSpec RhsSpec::explicit_rhs(PointFunction f) {
  RhsSpec r;
  r.mode = RhsMode::explicit_function;
  r.function = std::move(f);
  return r;
}

RhsSpec RhsSpec::eigen(double lambda, std::vector<double> previous) {
  RhsSpec r;
  r.mode = RhsMode::eigen;
  r.lambda = lambda;
  r.previous = std::move(previous);
  return r;
}

std::vector<double> sample_rhs(const RhsSpec& rhs, const ScalarField& field) {
  if (!std::isfinite(rhs.alpha) || rhs.alpha < 0) throw Error(ErrorKind::input, "alpha must be finite and >= 0");
  const Grid& grid = field.grid();
  const int n = field.dimension();
  std::vector<double> f(grid.size(), 0.0);
  if (rhs.mode == RhsMode::eigen && rhs.previous.size() != grid.size())
    throw Error(ErrorKind::input, "eigen right-hand side needs one previous value per node");
  if (rhs.mode == RhsMode::explicit_function && !rhs.function)
    throw Error(ErrorKind::input, "explicit right-hand side needs a function");
  for (std::size_t k : field.interior_nodes()) {
    const Vec x = grid.point(k);
    double v = 0.0;
    switch (rhs.mode) {
      case RhsMode::degenerate_distance: {
        const double g = rhs.g ? rhs.g(x) : 1.0;
        if (!(g > 0) || !std::isfinite(g)) throw Error(ErrorKind::input, "g must be positive and finite");
        const double d = field.domain().boundary_distance(x);
        v = rhs.alpha == 0.0 ? g : g * std::pow(d, rhs.alpha);
        break;
      }
      case RhsMode::explicit_function: v = rhs.function(x); break;
      case RhsMode::eigen: v = std::pow(rhs.lambda * std::abs(rhs.previous[k]), n); break;
    }
    if (!(v >= 0) || !std::isfinite(v)) throw Error(ErrorKind::input, "right-hand side must be finite and >= 0");
    f[k] = v;
  }
  return f;
}

double discrete_ma_operator(const ScalarField& field, std::size_t node, const SolverConfig& config) {
  const DirectionSet dirs = make_directions(field.dimension(), config.stencil_width);
  std::vector<double> deltas;
  for (const auto& v : dirs.directions) deltas.push_back(field.apply(field.second_difference(node, v), field.value(node)));
  double best = std::numeric_limits<double>::infinity();
  for (const auto& frame : dirs.frames) {
    double p = 1.0;
    for (int d : frame) p *= std::max(deltas[static_cast<std::size_t>(d)], 0.0);
    best = std::min(best, p);
  }
  return best;
}

SolveResult solve_dirichlet(const ConvexDomain& domain, const Grid& grid, const RhsSpec& rhs,
                            const PointFunction& boundary_trace, const SolverConfig& config,
                            const std::optional<ScalarField>& initial) {
  const auto start = Clock::now();
  if (!(config.tol_residual > 0)) throw Error(ErrorKind::input, "tol_residual must be positive");
  if (!(config.damping > 0 && config.damping <= 1)) throw Error(ErrorKind::input, "damping must lie in (0, 1]");
  const int n = domain.dimension();

  if (initial && !(initial->grid() == grid)) throw Error(ErrorKind::input, "initial field on a different grid");
  ScalarField shape = build_field(domain, grid, [](const Vec&) { return 0.0; }, boundary_trace);
  const std::vector<double> f = sample_rhs(rhs, shape);
  const Discretization disc(shape, config.stencil_width);

  std::vector<double> u(shape.values().begin(), shape.values().end());
  if (initial) {
    for (std::size_t k : shape.interior_nodes()) u[k] = initial->value(k);
  } else {
    u = poisson_guess(disc, u, f, n);
  }

  SolveReport report;
  double res = sup_residual(disc, u, f);
  int iter = 0;
  GaussSeidel gs{disc, f, config.sweep_order, [&grid](std::size_t k) { return grid.multi(k); }};

  if (config.method == SolveMethod::gauss_seidel) {
    double omega = config.damping;
    while (res > config.tol_residual && iter < config.max_iters) {
      gs.sweep(u, omega);
      ++iter;
      const double next = sup_residual(disc, u, f);
      if (next > res) omega = std::min(omega, 0.5);
      res = next;
    }
  } else {
    Newton newton(disc, f);
    std::vector<double> r;
    res = sup_residual(disc, u, f, &r);
    while (res > config.tol_residual && iter < config.max_iters) {
      ++iter;
      Eigen::VectorXd fr;
      bool stepped = false;
      if (newton.linearize(u, fr)) {
        const Eigen::VectorXd step = newton.solve(-fr);
        const double base = l2(r);
        std::vector<double> trial(u.size());
        for (double t = config.damping; t >= 1.0 / 4096; t *= 0.5) {
          trial = u;
          for (std::size_t i = 0; i < disc.unknowns(); ++i) trial[disc.node(i)] += t * step[static_cast<Eigen::Index>(i)];
          std::vector<double> rt;
          const double sup = sup_residual(disc, trial, f, &rt);
          if (std::isfinite(sup) && l2(rt) <= (1.0 - 1e-4 * t) * base) {
            u.swap(trial);
            r.swap(rt);
            res = sup;
            stepped = true;
            break;
          }
        }
      }
      if (stepped && res > config.tol_residual) {
        // Nodes whose frame went flat make the Jacobian nearly singular there; solve them locally.
        bool touched = false;
        for (std::size_t i = 0; i < disc.unknowns(); ++i) {
          const std::size_t k = disc.node(i);
          if (std::abs(r[i]) >= 0.25 * res) {
            u[k] = disc.local_solve(u, i, f[k]);
            touched = true;
          }
        }
        if (touched) res = sup_residual(disc, u, f, &r);
      }
      if (!stepped) {
        // Newton stalled: a few monotone sweeps move the iterate before retrying.
        for (int s = 0; s < 10; ++s) gs.sweep(u, 1.0);
        res = sup_residual(disc, u, f, &r);
      }
    }
  }

  report.iterations = iter;
  report.residual_sup = res;
  report.status = res <= config.tol_residual ? SolveStatus::converged : SolveStatus::diverged;
  ScalarField out = shape.with_values(std::move(u));
  report.convexity_flag = out.convexity_flag();
  report.wall_ms = std::chrono::duration<double, std::milli>(Clock::now() - start).count();
  return {std::move(out), report};
}

SolveResult solve_dirichlet_nested(const ConvexDomain& domain, const Grid& grid, const RhsSpec& rhs,
                                   const PointFunction& boundary_trace, const SolverConfig& config, int levels) {
  const Box box = grid.bounds();
  double extent = std::numeric_limits<double>::infinity();
  for (int a = 0; a < grid.dimension(); ++a) extent = std::min(extent, box.upper[a] - box.lower[a]);
  const double coarse = 2.0 * grid.spacing();
  if (levels <= 0 || extent / coarse < 16.0 || coarse > 0.25 * domain.tangent_ball_radius())
    return solve_dirichlet(domain, grid, rhs, boundary_trace, config);
  const Grid cgrid = Grid::covering(grid.dimension(), coarse, box);
  const SolveResult c = solve_dirichlet_nested(domain, cgrid, rhs, boundary_trace, config, levels - 1);
  const ScalarField seed = build_field(domain, grid, [&](const Vec& x) {
    const double v = c.field.value_at(x);
    return std::isnan(v) ? boundary_trace(x) : v;
  }, boundary_trace);
  // Bilinear interpolation leaves kinks at the coarse nodes; a few monotone sweeps remove them.
  SolverConfig smooth = config;
  smooth.method = SolveMethod::gauss_seidel;
  smooth.max_iters = 3;
  const SolveResult pre = solve_dirichlet(domain, grid, rhs, boundary_trace, smooth, seed);
  return solve_dirichlet(domain, grid, rhs, boundary_trace, config, pre.field);
}

MonitorReport residual_report(const ScalarField& field, const RhsSpec& rhs, const SolverConfig& config) {
  const std::vector<double> f = sample_rhs(rhs, field);
  const Discretization disc(field, config.stencil_width);
  const std::vector<double> u(field.values().begin(), field.values().end());
  std::vector<double> r;
  (void)sup_residual(disc, u, f, &r);
  MonitorReport rep;
  rep.name = "residual";
  double l1 = 0.0;
  const double cell = std::pow(field.grid().spacing(), field.dimension());
  for (std::size_t i = 0; i < r.size(); ++i) {
    const double a = std::abs(r[i]);
    l1 += a * cell;
    if (a > rep.max_value || i == 0) {
      rep.max_value = a;
      rep.argmax = field.grid().point(disc.node(i));
    }
  }
  rep.context["l1"] = l1;
  rep.context["interior_nodes"] = static_cast<double>(r.size());
  return rep;
}

EigenResult solve_eigen(const ConvexDomain& domain, const Grid& grid, const EigenConfig& config,
                        const std::optional<std::vector<double>>& initial) {
  const auto start = Clock::now();
  const auto zero = [](const Vec&) { return 0.0; };
  ScalarField shape = build_field(domain, grid, zero, zero);
  std::vector<double> u(grid.size(), 0.0);
  if (initial) {
    if (initial->size() != grid.size()) throw Error(ErrorKind::input, "initial guess size does not match the grid");
    u = *initial;
  } else {
    for (std::size_t k : shape.interior_nodes()) u[k] = -domain.boundary_distance(grid.point(k));
  }
  auto normalize = [&](std::vector<double>& v) {
    double sup = 0.0;
    for (std::size_t k : shape.interior_nodes()) sup = std::max(sup, std::abs(v[k]));
    if (!(sup > 0)) throw Error(ErrorKind::input, "eigen iterate vanished");
    for (std::size_t k : shape.interior_nodes()) v[k] /= sup;
    return sup;
  };
  normalize(u);

  EigenResult result{0.0, shape, {}, {}};
  double lambda = 1.0;
  std::optional<ScalarField> guess;
  SolveReport last;
  bool converged = false;
  int outer = 0;
  while (outer < config.max_outer) {
    ++outer;
    auto solved = solve_dirichlet(domain, grid, RhsSpec::eigen(lambda, u), zero, config.solver, guess);
    last = solved.report;
    std::vector<double> w(solved.field.values().begin(), solved.field.values().end());
    for (auto& v : w)
      if (std::isnan(v)) v = 0.0;
    guess = solved.field;
    const double sup = normalize(w);
    const double next = lambda / sup;
    result.lambda_history.push_back(next);
    u = std::move(w);
    const double change = std::abs(next - lambda);
    lambda = next;
    if (last.status == SolveStatus::converged && change <= config.tol_lambda * lambda) {
      converged = true;
      break;
    }
  }
  result.lambda = lambda;
  result.field = shape.with_values(u);
  result.report = last;
  result.report.iterations = outer;
  result.report.status = converged ? SolveStatus::converged : SolveStatus::diverged;
  result.report.convexity_flag = result.field.convexity_flag();
  result.report.wall_ms = std::chrono::duration<double, std::milli>(Clock::now() - start).count();
  return result;
}

IntervalEigenResult solve_eigen_interval(int nodes, int max_iters, double tol) {
  if (nodes < 8) throw Error(ErrorKind::resolution, "interval needs at least 8 nodes");
  const int m = nodes - 2;
  const double h = 2.0 / (nodes - 1);
  IntervalEigenResult out;
  out.x.resize(static_cast<std::size_t>(nodes));
  for (int i = 0; i < nodes; ++i) out.x[static_cast<std::size_t>(i)] = -1.0 + i * h;
  std::vector<double> u(static_cast<std::size_t>(m));
  for (int i = 0; i < m; ++i) u[static_cast<std::size_t>(i)] = -(1.0 - std::abs(out.x[static_cast<std::size_t>(i + 1)]));
  double lambda = 1.0;
  std::vector<double> c(static_cast<std::size_t>(m)), d(static_cast<std::size_t>(m)), w(static_cast<std::size_t>(m));
  for (int it = 0; it < max_iters; ++it) {
    // Thomas algorithm for (w[i-1] - 2 w[i] + w[i+1]) / h^2 = lambda |u[i]|.
    for (int i = 0; i < m; ++i) {
      const double rhs = lambda * std::abs(u[static_cast<std::size_t>(i)]) * h * h;
      const double denom = -2.0 - (i > 0 ? c[static_cast<std::size_t>(i - 1)] : 0.0);
      c[static_cast<std::size_t>(i)] = 1.0 / denom;
      d[static_cast<std::size_t>(i)] = (rhs - (i > 0 ? d[static_cast<std::size_t>(i - 1)] : 0.0)) / denom;
    }
    for (int i = m - 1; i >= 0; --i)
      w[static_cast<std::size_t>(i)] = d[static_cast<std::size_t>(i)] - (i + 1 < m ? c[static_cast<std::size_t>(i)] * w[static_cast<std::size_t>(i + 1)] : 0.0);
    double sup = 0.0;
    for (double v : w) sup = std::max(sup, std::abs(v));
    const double next = lambda / sup;
    for (int i = 0; i < m; ++i) u[static_cast<std::size_t>(i)] = w[static_cast<std::size_t>(i)] / sup;
    out.iterations = it + 1;
    const double change = std::abs(next - lambda);
    lambda = next;
    if (change <= tol * lambda) {
      out.converged = true;
      break;
    }
  }
  out.lambda = lambda;
  out.u.assign(static_cast<std::size_t>(nodes), 0.0);
  for (int i = 0; i < m; ++i) out.u[static_cast<std::size_t>(i + 1)] = u[static_cast<std::size_t>(i)];
  return out;
}

}  // namespace malab
