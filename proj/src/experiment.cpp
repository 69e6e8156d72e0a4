#include "malab/experiment.hpp"

#include "malab/analytic.hpp"
#include "malab/error.hpp"
#include "malab/sections.hpp"
#include "malab/solver.hpp"
#include "malab/transforms.hpp"

#include <boost/math/differentiation/autodiff.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>
#include <ostream>
#include <random>
#include <set>
#include <sstream>
#include <thread>

namespace malab {

namespace {

using Clock = std::chrono::steady_clock;

constexpr std::pair<ExperimentKind, const char*> kKindNames[] = {
    {ExperimentKind::dirichlet_convergence, "dirichlet-convergence"},
    {ExperimentKind::localization_scaling, "localization-scaling"},
    {ExperimentKind::volume_invariant, "volume-invariant"},
    {ExperimentKind::eigen, "eigen"},
    {ExperimentKind::monitors, "monitors"},
    {ExperimentKind::verify_analytic, "verify-analytic"},
    {ExperimentKind::liouville_2d, "liouville-2d"},
};

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

Vec v2(double a, double b) { return Vec(a, b, 0.0); }

// Kind-specific parameters with the key path in every error.
class Params {
public:
  Params(const Json& j, std::string where) : j_(j), where_(std::move(where)) {
    if (!j_.is_object()) throw Error(ErrorKind::usage, where_ + ": expected an object");
  }

  double num(const char* key, double fallback) const {
    if (!j_.contains(key)) return fallback;
    if (!j_.at(key).is_number()) throw Error(ErrorKind::usage, where_ + "." + key + ": expected a number");
    return j_.at(key).get<double>();
  }

  int integer(const char* key, int fallback) const {
    const double v = num(key, fallback);
    if (v != std::floor(v)) throw Error(ErrorKind::usage, where_ + "." + key + ": expected an integer");
    return static_cast<int>(v);
  }

  std::vector<double> list(const char* key, std::vector<double> fallback) const {
    if (!j_.contains(key)) return fallback;
    const Json& v = j_.at(key);
    if (!v.is_array() || v.empty()) throw Error(ErrorKind::usage, where_ + "." + key + ": expected a non-empty array");
    std::vector<double> out;
    for (const auto& e : v) {
      if (!e.is_number()) throw Error(ErrorKind::usage, where_ + "." + key + ": expected numbers");
      out.push_back(e.get<double>());
    }
    return out;
  }

  SolverConfig solver(SolverConfig fallback) const {
    if (!j_.contains("solver")) return fallback;
    Json merged = Json::object();
    merged["tol_residual"] = fallback.tol_residual;
    merged["max_iters"] = fallback.max_iters;
    for (const auto& [k, v] : j_.at("solver").items()) merged[k] = v;
    return solver_config_from_json(merged);
  }

private:
  const Json& j_;
  std::string where_;
};

class Csv {
public:
  explicit Csv(const std::string& header) { out_ << header << '\n'; }

  template <class... T>
  void row(const T&... cells) {
    bool first = true;
    ((out_ << (first ? "" : ",") << cell(cells), first = false), ...);
    out_ << '\n';
  }

  [[nodiscard]] std::string str() const { return out_.str(); }

private:
  static std::string cell(double v) { return fmt17(v); }
  static std::string cell(int v) { return std::to_string(v); }
  static std::string cell(std::size_t v) { return std::to_string(v); }
  static std::string cell(bool v) { return v ? "1" : "0"; }
  static std::string cell(const std::string& v) { return v; }
  static std::string cell(const char* v) { return v; }

  std::ostringstream out_;
};

double log_slope(const std::vector<double>& x, const std::vector<double>& y) {
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) mx += std::log(x[i]), my += std::log(y[i]);
  mx /= static_cast<double>(x.size());
  my /= static_cast<double>(x.size());
  double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (std::log(x[i]) - mx) * (std::log(y[i]) - my);
    sxx += (std::log(x[i]) - mx) * (std::log(x[i]) - mx);
  }
  return sxy / sxx;
}

double spread(const std::vector<double>& v) {
  const auto [lo, hi] = std::minmax_element(v.begin(), v.end());
  return *hi / *lo;
}

SolverConfig experiment_solver() {
  SolverConfig c;
  c.tol_residual = 1e-8;
  return c;
}

ConvexDomain half_ball_from(const Params& p) { return ConvexDomain::half_ball(2, p.num("radius", 1.0)); }

Grid grid_from_cells(const ConvexDomain& dom, int cells) {
  if (cells < 8) throw Error(ErrorKind::configuration, "cells must be at least 8");
  return Grid::covering(dom, 1.0 / cells);
}

double sup_error(const ScalarField& f, const PointFunction& exact) {
  double e = 0.0;
  for (std::size_t k : f.interior_nodes()) e = std::max(e, std::abs(f.value(k) - exact(f.grid().point(k))));
  return e;
}

struct Result {
  Json metrics = Json::object();
  std::string csv;
};

// --- verify-analytic ------------------------------------------------------------------------

double wbar_autodiff_error(int samples, std::uint64_t seed, double& det_margin) {
  using namespace boost::math::differentiation;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  double worst = 0.0;
  det_margin = std::numeric_limits<double>::infinity();
  for (double gamma : {0.05, 0.1, 0.25}) {
    for (int s = 0; s < samples; ++s) {
      const double r = 0.05 + 1.9 * uni(rng);
      const double y = (0.01 + 0.98 * uni(rng)) * std::pow(r, 1.5);
      const auto vars = make_ftuple<double, 2, 2>(r, y);
      const auto& R = std::get<0>(vars);
      const auto& Y = std::get<1>(vars);
      const auto w = R * R * (1.0 - pow(Y * pow(R, -1.5), gamma));
      const auto d = wbar_derivatives(r, y, gamma);
      const auto rel = [](double got, double want) { return std::abs(got - want) / std::max(1.0, std::abs(want)); };
      const double displayed = gamma * (1 - gamma) * std::pow(d.t, gamma - 2) / r;
      for (double e : {rel(d.value, w.derivative(0, 0)), rel(d.w_r, w.derivative(1, 0)), rel(d.w_y, w.derivative(0, 1)),
                       rel(d.w_rr, w.derivative(2, 0)), rel(d.w_ry, w.derivative(1, 1)), rel(d.w_yy, w.derivative(0, 2)),
                       rel(d.w_yy, displayed)})
        worst = std::max(worst, e);
      const double bound = wbar_det_constant(gamma) / r * std::pow(d.t, 2 * gamma - 2);
      det_margin = std::min(det_margin, d.det() / bound - 1.0);
    }
  }
  return worst;
}

Result verify_analytic(const ExperimentSpec& spec) {
  const Params p(spec.config, spec.name + ".config");
  const int samples = p.integer("samples", 1000);
  const auto alphas = p.list("alphas", {0.0, 0.5, 1.0, 2.0});
  Csv csv("check,alpha,dimension,value");
  Result r;

  double identity = 0.0, trace = 0.0;
  for (double a : alphas)
    for (int n : {2, 3})
      for (auto kind : {ClosedFormKind::u0, ClosedFormKind::nonuniqueness}) {
        const auto rep = verify_ma_identity({kind, a, n}, half_space_samples(n, samples, spec.seed));
        const char* name = kind == ClosedFormKind::u0 ? "u0_identity" : "nonuniqueness_identity";
        csv.row(name, a, n, rep.max_value);
        csv.row(kind == ClosedFormKind::u0 ? "u0_trace" : "nonuniqueness_trace", a, n, rep.context.at("trace_deviation"));
        identity = std::max(identity, rep.max_value);
        trace = std::max(trace, rep.context.at("trace_deviation"));
      }
  r.metrics["identity_residual"] = identity;
  r.metrics["trace_deviation"] = trace;
  const ClosedFormSolution u0{ClosedFormKind::u0, 1.0, 2}, nu{ClosedFormKind::nonuniqueness, 1.0, 2};
  r.metrics["nonuniqueness_gap"] = std::abs(nu.value(v2(1, 1)) - u0.value(v2(1, 1)));

  BarrierRegion region;
  region.samples = p.integer("barrier_samples", 10000);
  region.seed = spec.seed;
  std::vector<std::pair<std::string, BarrierSpec>> barriers = {
      {"w1_2d", tune_w1(BarrierSpec::w1(2, 0.1), region)},
      {"w1_3d", tune_w1(BarrierSpec::w1(3, 1.0 / 6), region)},
      {"w2_2d", BarrierSpec::w2(2, 0.1, 1e-3, 0.0)},
      {"w2_3d", BarrierSpec::w2(3, 0.1, 1e-3, 0.0)},
      {"w3_2d", BarrierSpec::w3(2, 0.1, {0.1}, 0.02, 1e-2, 0.0)},
      {"w3_3d", BarrierSpec::w3(3, 0.1, {0.1, 0.1}, 0.02, 1e-2, 0.0)},
  };
  for (int n : {2, 3})
    for (double a : {0.0, 1.0, 2.0}) barriers.emplace_back("v_" + std::to_string(n) + "d", BarrierSpec::v(n, a, 0.01));
  int failed = 0;
  double margin = std::numeric_limits<double>::infinity();
  for (const auto& [name, b] : barriers) {
    const auto rep = verify_barrier(b, region);
    csv.row("barrier_" + name, b.alpha, b.dimension, rep.max_value);
    if (rep.context.at("pass") != 1.0) ++failed;
    margin = std::min(margin, rep.max_value);
  }
  r.metrics["barriers_failed"] = failed;
  r.metrics["barrier_min_margin"] = margin;

  double det_margin = 0.0;
  r.metrics["wbar_derivative_error"] = wbar_autodiff_error(p.integer("wbar_samples", 200), spec.seed, det_margin);
  r.metrics["wbar_det_margin"] = det_margin;

  // Legendre involution of a rotated quadratic, relative to the interpolation tolerance 2 h xi_max.
  {
    const double h = 1.0 / 32, xi_max = 2.0;
    const auto dom = ConvexDomain::box(2, v2(-1, -1), v2(1, 1));
    const auto u = [](const Vec& x) { return 0.5 * (1.3 * x[0] * x[0] + 0.4 * x[0] * x[1] + 0.9 * x[1] * x[1]) + 0.1 * x[0]; };
    const ScalarField field = build_field(dom, Grid::covering(dom, h), u, u);
    const ScalarField dual = legendre_full(field, Grid::covering(2, h, Box{v2(-xi_max, -xi_max), v2(xi_max, xi_max)}));
    const double ratio = legendre_involution_error(field, dual) / (2 * h * xi_max);
    csv.row("legendre_involution_ratio", 0.0, 2, ratio);
    r.metrics["legendre_involution_ratio"] = ratio;
  }
  // Partial transform of U0: discrete residual and the exact Hessian route.
  {
    double discrete = 0.0, exact = 0.0;
    const auto dom = ConvexDomain::box(2, v2(-1, 0), v2(1, 1));
    const double h = 1.0 / 32;
    {
      // Central differences are exact on the transform only when it is at most cubic in y.
      const double a = p.num("partial_legendre_alpha", 1.0);
      const ClosedFormSolution sol{ClosedFormKind::u0, a, 2};
      const ScalarField field = build_field(dom, Grid::covering(dom, h), sol.function(), sol.function());
      discrete = grushin_residual(partial_legendre_2d(field, static_cast<int>(std::lround(2.0 / h))), a);
      csv.row("partial_legendre_residual", a, 2, discrete);
    }
    for (double a : alphas) {
      const ClosedFormSolution sol{ClosedFormKind::u0, a, 2};
      for (const Vec& x : half_space_samples(2, 100, spec.seed)) {
        exact = std::max(exact, std::abs(grushin_residual_from_hessian(sol.hessian(x), x[1], a)));
      }
    }
    r.metrics["partial_legendre_residual"] = discrete;
    r.metrics["partial_legendre_exact_residual"] = exact;
  }
  // Gauss curvature identity on the closed forms (points where the level set is a graph).
  {
    double dev = 0.0;
    int count = 0;
    for (double a : alphas) {
      if (a == 0.0) continue;
      for (int n : {2, 3})
        for (auto kind : {ClosedFormKind::u0, ClosedFormKind::nonuniqueness}) {
          const SmoothFunction u = ClosedFormSolution{kind, a, n}.smooth();
          for (const Vec& x : half_space_samples(n, 50, spec.seed)) {
            if (u.gradient(x)[n - 1] < 0.05) continue;
            dev = std::max(dev, gauss_identity(u, x, a).max_deviation());
            ++count;
          }
        }
    }
    csv.row("gauss_identity_deviation", 0.0, 0, dev);
    r.metrics["gauss_identity_deviation"] = dev;
    r.metrics["gauss_identity_samples"] = count;
  }
  r.csv = csv.str();
  return r;
}

// --- dirichlet-convergence ------------------------------------------------------------------

Result dirichlet_convergence(const ExperimentSpec& spec) {
  const Params p(spec.config, spec.name + ".config");
  const double alpha = p.num("alpha", 1.0);
  const auto cells = p.list("cells", {64, 128, 256});
  const int quad_cells = p.integer("quadratic_cells", 32);
  const SolverConfig cfg = p.solver(experiment_solver());
  Csv csv("problem,cells,spacing,sup_error,iterations,residual_sup,converged");
  Result r;
  bool converged = true;

  const auto square = ConvexDomain::box(2, v2(-1, -1), v2(1, 1));
  const Grid qg = grid_from_cells(square, quad_cells);
  const auto quad = [](const Vec& x) { return 0.5 * x.squaredNorm(); };
  const auto qs = solve_dirichlet(square, qg, RhsSpec::degenerate(0.0), quad, cfg);
  const double qe = sup_error(qs.field, quad);
  csv.row("quadratic", quad_cells, qg.spacing(), qe, qs.report.iterations, qs.report.residual_sup,
          qs.report.status == SolveStatus::converged);
  converged = converged && qs.report.status == SolveStatus::converged;
  r.metrics["quadratic_error_over_h2"] = qe / (qg.spacing() * qg.spacing());

  const auto dom = half_ball_from(p);
  const ClosedFormSolution u0{ClosedFormKind::u0, alpha, 2};
  const auto rhs = RhsSpec::explicit_rhs([alpha](const Vec& x) { return std::pow(std::max(x[1], 0.0), alpha); });
  std::vector<double> hs, errs;
  for (double c : cells) {
    const Grid g = grid_from_cells(dom, static_cast<int>(c));
    const auto s = solve_dirichlet_nested(dom, g, rhs, u0.function(), cfg);
    const double e = sup_error(s.field, u0.function());
    csv.row("u0_half_ball", static_cast<int>(c), g.spacing(), e, s.report.iterations, s.report.residual_sup,
            s.report.status == SolveStatus::converged);
    converged = converged && s.report.status == SolveStatus::converged;
    hs.push_back(g.spacing());
    errs.push_back(e);
  }
  if (hs.size() < 2) throw Error(ErrorKind::configuration, "need at least two grids for a convergence slope");
  r.metrics["u0_slope"] = log_slope(hs, errs);
  r.metrics["u0_error_constant"] = errs.back() / hs.back();
  r.metrics["all_converged"] = converged ? 1 : 0;
  r.csv = csv.str();
  return r;
}

// --- localization-scaling -------------------------------------------------------------------

ScalarField solved_half_ball(const Params& p, double alpha, int default_cells, int& iterations, bool& converged) {
  const auto dom = half_ball_from(p);
  const Grid g = grid_from_cells(dom, p.integer("cells", default_cells));
  const auto s = solve_dirichlet_nested(dom, g, RhsSpec::degenerate(alpha), [](const Vec& x) { return 0.5 * x.squaredNorm(); },
                                        p.solver(experiment_solver()));
  iterations = s.report.iterations;
  converged = s.report.status == SolveStatus::converged && s.report.convexity_flag;
  return subtract_supporting_plane(s.field);
}

std::vector<NormalizationRecord> ladder_records(const ScalarField& f, double h_max, double alpha) {
  std::vector<NormalizationRecord> recs;
  for (double h : h_ladder(h_max, f.grid().spacing())) recs.push_back(normalize_section(f, Vec::Zero(), h, alpha));
  return recs;
}

Result localization_scaling(const ExperimentSpec& spec) {
  const Params p(spec.config, spec.name + ".config");
  const double alpha = p.num("alpha", 1.0);
  int iterations = 0;
  bool converged = false;
  const ScalarField f = solved_half_ball(p, alpha, 256, iterations, converged);
  const auto recs = ladder_records(f, p.num("h_max", 0.2), alpha);
  const ScalingFit fit = scaling_fit(recs);

  Csv csv("h,tau_1,d_1,d_n,d_h,measure,volume_ratio");
  std::vector<double> ratios, dh_dn;
  for (const auto& rec : recs) {
    csv.row(rec.h, rec.tau[0], rec.axes[0], rec.d_n, rec.d_h, rec.measure, rec.volume_ratio);
    ratios.push_back(rec.volume_ratio);
    dh_dn.push_back(rec.d_h / rec.d_n);
  }
  Result r;
  r.metrics["tangential_slope"] = fit.tangential_slope;
  r.metrics["normal_slope"] = fit.normal_slope;
  r.metrics["tangential_error"] = std::abs(fit.tangential_slope - 0.5);
  r.metrics["normal_error"] = std::abs(fit.normal_slope - 1.0 / (2.0 + alpha));
  r.metrics["dh_slope"] = fit.dh_slope;
  r.metrics["r2"] = fit.r2;
  r.metrics["decades"] = std::log10(recs.front().h / recs.back().h);
  r.metrics["volume_spread"] = spread(ratios);
  r.metrics["dh_over_dn_min"] = *std::min_element(dh_dn.begin(), dh_dn.end());
  r.metrics["dh_over_dn_max"] = *std::max_element(dh_dn.begin(), dh_dn.end());
  r.metrics["solver_iterations"] = iterations;
  r.metrics["converged"] = converged ? 1 : 0;
  r.csv = csv.str();
  return r;
}

// --- volume-invariant -----------------------------------------------------------------------

Result volume_invariant(const ExperimentSpec& spec) {
  const Params p(spec.config, spec.name + ".config");
  const double alpha = p.num("alpha", 1.0);
  int iterations = 0;
  bool converged = false;
  const ScalarField f = solved_half_ball(p, alpha, 128, iterations, converged);
  Csv csv("source,h,measure,d_h,volume_ratio,oracle");
  const double oracle = u0_volume_ratio_2d(alpha);
  std::vector<double> ratios;
  for (const auto& rec : ladder_records(f, p.num("h_max", 0.25), alpha)) {
    csv.row("solution", rec.h, rec.measure, rec.d_h, rec.volume_ratio, oracle);
    ratios.push_back(rec.volume_ratio);
  }
  if (ratios.size() < 2) throw Error(ErrorKind::insufficient_data, "volume ladder has fewer than two heights");

  const auto dom = half_ball_from(p);
  const ClosedFormSolution u0{ClosedFormKind::u0, alpha, 2};
  const Grid g = grid_from_cells(dom, p.integer("u0_cells", 256));
  const ScalarField exact = build_field(dom, g, u0.function(), u0.function());
  double worst = 0.0;
  for (double h : p.list("u0_heights", {0.1, 0.05, 0.025, 0.0125, 0.00625})) {
    const auto rec = normalize_section(exact, Vec::Zero(), h, alpha);
    csv.row("u0", h, rec.measure, rec.d_h, rec.volume_ratio, oracle);
    worst = std::max(worst, std::abs(rec.volume_ratio / oracle - 1.0));
  }
  Result r;
  r.metrics["solution_volume_spread"] = spread(ratios);
  r.metrics["u0_oracle"] = oracle;
  r.metrics["u0_relative_error"] = worst;
  r.metrics["converged"] = converged ? 1 : 0;
  r.csv = csv.str();
  return r;
}

// --- eigen ----------------------------------------------------------------------------------

Result eigen_experiment(const ExperimentSpec& spec) {
  const Params p(spec.config, spec.name + ".config");
  Csv csv("problem,cells,lambda,outer_iterations,ratio_lower,ratio_upper,converged");
  Result r;
  const IntervalEigenResult iv = solve_eigen_interval(p.integer("interval_nodes", 512));
  csv.row("interval", p.integer("interval_nodes", 512), iv.lambda, iv.iterations, 0.0, 0.0, iv.converged);
  r.metrics["interval_error"] = std::abs(iv.lambda - std::numbers::pi * std::numbers::pi / 4.0);

  const double radius = p.num("radius", 1.0);
  const auto dom = ConvexDomain::ball(2, radius, Vec::Zero());
  EigenConfig ec;
  ec.solver = p.solver(ec.solver);
  ec.tol_lambda = p.num("tol_lambda", ec.tol_lambda);
  std::vector<double> lambdas;
  double ratio = 0.0;
  bool converged = iv.converged;
  for (double c : p.list("cells", {16, 32, 64})) {
    const Grid g = grid_from_cells(dom, static_cast<int>(c));
    const EigenResult e = solve_eigen(dom, g, ec);
    // |u| / d away from the first layer of nodes, where d is below the grid resolution.
    double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
    for (std::size_t k : e.field.interior_nodes()) {
      const double d = dom.boundary_distance(g.point(k));
      if (d < 2.0 * g.spacing()) continue;
      const double q = std::abs(e.field.value(k)) / d;
      lo = std::min(lo, q);
      hi = std::max(hi, q);
    }
    csv.row("disk", static_cast<int>(c), e.lambda, e.lambda_history.size(), lo, hi, e.report.status == SolveStatus::converged);
    converged = converged && e.report.status == SolveStatus::converged;
    lambdas.push_back(e.lambda);
    ratio = hi / lo;
  }
  r.metrics["disk_lambda"] = lambdas.back();
  r.metrics["lambda_spread"] = spread(lambdas) - 1.0;
  r.metrics["distance_ratio"] = ratio;
  r.metrics["converged"] = converged ? 1 : 0;
  r.csv = csv.str();
  return r;
}

// --- monitors -------------------------------------------------------------------------------

Result monitors(const ExperimentSpec& spec) {
  const Params p(spec.config, spec.name + ".config");
  const double alpha = p.num("alpha", 1.0);
  Csv csv("monitor,parameter,value");
  Result r;
  int iterations = 0;
  bool converged = false;
  const ScalarField f = solved_half_ball(p, alpha, 128, iterations, converged);
  r.metrics["converged"] = converged ? 1 : 0;

  const double bound = 1.0 / (1.0 + alpha);
  const auto nd = normal_derivative_monitor(f, alpha, p.num("normal_radius", 0.25));
  csv.row("normal_derivative", p.num("normal_radius", 0.25), nd.max_value);
  r.metrics["normal_derivative_ratio"] = nd.max_value / bound;

  double equality = 0.0;
  const auto half = half_ball_from(p);
  const Grid g0 = grid_from_cells(half, p.integer("u0_cells", 64));
  for (double a : p.list("u0_alphas", {0.0, 0.5, 1.0, 2.0})) {
    const ClosedFormSolution u0{ClosedFormKind::u0, a, 2};
    const auto rep = normal_derivative_monitor(build_field(half, g0, u0.function(), u0.function()), a, 0.5);
    csv.row("normal_derivative_u0", a, rep.max_value);
    equality = std::max(equality, std::abs(rep.max_value * (1.0 + a) - 1.0));
  }
  r.metrics["u0_normal_equality_error"] = equality;

  std::vector<double> hs, vals;
  for (double h : p.list("heights", {0.2, 0.1, 0.05, 0.025, 0.0125, 0.00625})) {
    const auto rep = pogorelov_monitor(f, compute_section(f, Vec::Zero(), Vec::Zero(), h), Index3(1, 0, 0));
    csv.row("pogorelov_normalized", h, rep.context.at("normalized"));
    hs.push_back(h);
    vals.push_back(rep.context.at("normalized"));
  }
  r.metrics["pogorelov_log_slope"] = std::abs(log_slope(hs, vals));

  const auto ball = ConvexDomain::ball(2, 1.0, Vec::Zero());
  const auto bowl = [](const Vec& x) { return 0.5 * (x.squaredNorm() - 1.0); };
  const ScalarField bf = build_field(ball, grid_from_cells(ball, p.integer("ball_cells", 32)), bowl, bowl);
  const auto br = pogorelov_monitor(bf, compute_section(bf, Vec::Zero(), Vec::Zero(), 0.5), Index3(1, 0, 0));
  csv.row("pogorelov_ball", 0.5, br.max_value);
  r.metrics["ball_value"] = br.max_value;

  SmoothFunction tilted;
  tilted.dimension = 2;
  tilted.value = [](const Vec& x) { return 0.5 * x[0] * x[0] + x[1] + 0.5 * x[1] * x[1]; };
  tilted.gradient = [](const Vec& x) { return Vec(x[0], 1.0 + x[1], 0.0); };
  tilted.hessian = [](const Vec&) {
    Mat h = Mat::Zero();
    h(0, 0) = h(1, 1) = 1.0;
    return h;
  };
  std::vector<double> ds, ls;
  for (double delta : p.list("levelset_deltas", {0.1, 0.05, 0.025, 0.0125, 0.00625})) {
    const auto rep = levelset_pogorelov_monitor(tilted, 1.0 + delta, Box{v2(-delta, 0), v2(delta, 2 * delta)}, 60);
    csv.row("levelset_normalized", delta, rep.context.at("normalized"));
    ds.push_back(delta);
    ls.push_back(rep.context.at("normalized"));
  }
  r.metrics["levelset_log_slope"] = std::abs(log_slope(ds, ls));
  r.csv = csv.str();
  return r;
}

// --- liouville-2d ---------------------------------------------------------------------------

Result liouville(const ExperimentSpec& spec) {
  const Params p(spec.config, spec.name + ".config");
  LiouvilleConfig c;
  c.lengths = p.list("lengths", c.lengths);
  c.spacing = p.num("spacing", c.spacing);
  c.alpha = p.num("alpha", c.alpha);
  c.window_half_width = p.num("window_half_width", c.window_half_width);
  c.window_height = p.num("window_height", c.window_height);
  c.perturbation = p.num("perturbation", c.perturbation);
  c.solver = p.solver(experiment_solver());
  const LiouvilleReport rep = liouville_2d_experiment(c);
  Csv csv("case,L,deviation,gap,iterations,residual_sup,converged");
  bool converged = true;
  for (const auto& row : rep.rows) {
    csv.row(row.data_case, row.length, row.deviation, row.gap, row.iterations, row.residual_sup, row.converged);
    converged = converged && row.converged;
  }
  Result r;
  r.metrics["min_decay_case1"] = *std::min_element(rep.decay_case1.begin(), rep.decay_case1.end());
  r.metrics["min_gap_ratio_case2"] = *std::min_element(rep.gap_ratio_case2.begin(), rep.gap_ratio_case2.end());
  r.metrics["all_converged"] = converged ? 1 : 0;
  r.csv = csv.str();
  return r;
}

void dump_value(std::ostringstream& out, const Json& j, int indent, int depth) {
  const std::string pad(static_cast<std::size_t>(indent * (depth + 1)), ' ');
  const std::string close(static_cast<std::size_t>(indent * depth), ' ');
  const char* nl = indent > 0 ? "\n" : "";
  if (j.is_object() || j.is_array()) {
    const bool obj = j.is_object();
    if (j.empty()) {
      out << (obj ? "{}" : "[]");
      return;
    }
    out << (obj ? '{' : '[') << nl;
    bool first = true;
    for (auto it = j.begin(); it != j.end(); ++it) {
      if (!first) out << ',' << nl;
      first = false;
      out << pad;
      if (obj) out << Json(it.key()).dump() << (indent > 0 ? ": " : ":");
      dump_value(out, *it, indent, depth + 1);
    }
    out << nl << close << (obj ? '}' : ']');
  } else if (j.is_number_float()) {
    const double v = j.get<double>();
    if (std::isfinite(v)) out << fmt17(v);
    else out << "null";
  } else {
    out << j.dump();
  }
}

Json check_json(const AcceptanceCheck& c) {
  Json j;
  j["metric"] = c.metric;
  j["value"] = c.value;
  j["lower"] = c.lower ? Json(*c.lower) : Json(nullptr);
  j["upper"] = c.upper ? Json(*c.upper) : Json(nullptr);
  j["pass"] = c.pass;
  return j;
}

}  // namespace

std::string to_string(ExperimentKind kind) {
  for (const auto& [k, name] : kKindNames)
    if (k == kind) return name;
  return "unknown";
}

ExperimentKind experiment_kind_from_string(const std::string& name) {
  for (const auto& [k, n] : kKindNames)
    if (name == n) return k;
  throw Error(ErrorKind::usage, "unknown experiment kind '" + name + "'");
}

std::string tool_version() { return "malab 1.0.0"; }

RunManifest parse_manifest(const std::string& text, const std::string& origin) {
  const Json j = parse_json(text, origin);
  if (!j.is_object()) throw Error(ErrorKind::usage, origin + ": manifest must be a JSON object");
  if (!j.contains("experiments") || !j.at("experiments").is_array())
    throw Error(ErrorKind::usage, origin + ": key 'experiments' must be an array");
  RunManifest m;
  m.tool_version = j.value("tool_version", tool_version());
  if (j.contains("output_dir")) {
    if (!j.at("output_dir").is_string()) throw Error(ErrorKind::usage, origin + ": key 'output_dir' must be a string");
    m.output_dir = j.at("output_dir").get<std::string>();
  }
  std::set<std::string> names;
  std::size_t index = 0;
  for (const auto& e : j.at("experiments")) {
    const std::string where = origin + ": experiments[" + std::to_string(index++) + "]";
    if (!e.is_object()) throw Error(ErrorKind::usage, where + " must be an object");
    if (!e.contains("name") || !e.at("name").is_string() || e.at("name").get<std::string>().empty())
      throw Error(ErrorKind::usage, where + ".name must be a non-empty string");
    ExperimentSpec s;
    s.name = e.at("name").get<std::string>();
    if (s.name.find_first_of("/\\") != std::string::npos || s.name == "." || s.name == "..")
      throw Error(ErrorKind::usage, where + ".name must be usable as a directory name");
    if (!names.insert(s.name).second) throw Error(ErrorKind::usage, where + ".name '" + s.name + "' is not unique");
    if (!e.contains("kind") || !e.at("kind").is_string()) throw Error(ErrorKind::usage, where + ".kind must be a string");
    try {
      s.kind = experiment_kind_from_string(e.at("kind").get<std::string>());
    } catch (const Error& err) {
      throw Error(ErrorKind::usage, where + ".kind: " + err.what());
    }
    s.config = e.value("config", Json::object());
    if (!s.config.is_object()) throw Error(ErrorKind::usage, where + ".config must be an object");
    s.acceptance = e.value("acceptance", Json::object());
    if (!s.acceptance.is_object()) throw Error(ErrorKind::usage, where + ".acceptance must be an object");
    for (const auto& [metric, window] : s.acceptance.items()) {
      const bool ok = window.is_array() && window.size() == 2 &&
                      std::all_of(window.begin(), window.end(), [](const Json& w) { return w.is_null() || w.is_number(); });
      if (!ok) throw Error(ErrorKind::usage, where + ".acceptance." + metric + " must be [lower, upper] (numbers or null)");
    }
    if (e.contains("seed")) {
      if (!e.at("seed").is_number_unsigned()) throw Error(ErrorKind::usage, where + ".seed must be a non-negative integer");
      s.seed = e.at("seed").get<std::uint64_t>();
    }
    m.experiments.push_back(std::move(s));
  }
  char hash[17];
  std::snprintf(hash, sizeof hash, "%016llx", static_cast<unsigned long long>(fnv1a(j.dump())));
  m.config_hash = hash;
  return m;
}

std::vector<AcceptanceCheck> evaluate_acceptance(const Json& acceptance, const Json& metrics) {
  std::vector<AcceptanceCheck> out;
  for (const auto& [metric, window] : acceptance.items()) {
    if (!metrics.contains(metric)) throw Error(ErrorKind::configuration, "acceptance names unknown metric '" + metric + "'");
    AcceptanceCheck c;
    c.metric = metric;
    c.value = metrics.at(metric).get<double>();
    if (!window[0].is_null()) c.lower = window[0].get<double>();
    if (!window[1].is_null()) c.upper = window[1].get<double>();
    c.pass = std::isfinite(c.value) && (!c.lower || c.value >= *c.lower) && (!c.upper || c.value <= *c.upper);
    out.push_back(c);
  }
  return out;
}

ExperimentOutcome run_experiment(const ExperimentSpec& spec) {
  const auto start = Clock::now();
  ExperimentOutcome o;
  o.name = spec.name;
  o.kind = spec.kind;
  try {
    Result r;
    switch (spec.kind) {
      case ExperimentKind::dirichlet_convergence: r = dirichlet_convergence(spec); break;
      case ExperimentKind::localization_scaling: r = localization_scaling(spec); break;
      case ExperimentKind::volume_invariant: r = volume_invariant(spec); break;
      case ExperimentKind::eigen: r = eigen_experiment(spec); break;
      case ExperimentKind::monitors: r = monitors(spec); break;
      case ExperimentKind::verify_analytic: r = verify_analytic(spec); break;
      case ExperimentKind::liouville_2d: r = liouville(spec); break;
    }
    o.metrics = std::move(r.metrics);
    o.csv = std::move(r.csv);
    o.checks = evaluate_acceptance(spec.acceptance, o.metrics);
    o.ok = true;
    o.passed = std::all_of(o.checks.begin(), o.checks.end(), [](const AcceptanceCheck& c) { return c.pass; });
  } catch (const Error& e) {
    o.error = e.what();
    o.usage_error = e.kind() == ErrorKind::usage;
  } catch (const std::exception& e) {
    o.error = e.what();
  }
  o.wall_ms = std::chrono::duration<double, std::milli>(Clock::now() - start).count();
  return o;
}

std::string dump_json17(const Json& j, int indent) {
  std::ostringstream out;
  dump_value(out, j, indent, 0);
  out << '\n';
  return out.str();
}

RunResult run(const RunManifest& manifest, const std::filesystem::path& out, const std::optional<std::string>& only,
              std::ostream* log) {
  std::vector<const ExperimentSpec*> todo;
  for (const auto& s : manifest.experiments)
    if (!only || s.name == *only) todo.push_back(&s);
  if (only && todo.empty()) throw Error(ErrorKind::usage, "--only: no experiment named '" + *only + "'");

  RunResult result;
  result.outcomes.resize(todo.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < todo.size(); i = next++) {
      const ExperimentSpec& spec = *todo[i];
      ExperimentOutcome o = run_experiment(spec);
      Json summary;
      summary["name"] = spec.name;
      summary["kind"] = to_string(spec.kind);
      summary["config_hash"] = manifest.config_hash;
      summary["tool_version"] = manifest.tool_version;
      summary["seed"] = spec.seed;
      summary["status"] = !o.ok ? "error" : o.passed ? "pass" : "fail";
      if (!o.ok) summary["error"] = o.error;
      summary["metrics"] = o.metrics;
      Json checks = Json::array();
      for (const auto& c : o.checks) checks.push_back(check_json(c));
      summary["checks"] = checks;
      const auto dir = out / spec.name;
      try {
        write_file_atomic(dir / "data.csv", o.csv);
        write_file_atomic(dir / "summary.json", dump_json17(summary));
      } catch (const std::exception& e) {
        o.ok = o.passed = false;
        o.error = e.what();
      }
      result.outcomes[i] = std::move(o);
    }
  };
  const std::size_t workers = std::min<std::size_t>(static_cast<std::size_t>(thread_count()), todo.size());
  if (workers <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }

  Json run_summary;
  run_summary["tool_version"] = manifest.tool_version;
  run_summary["config_hash"] = manifest.config_hash;
  Json list = Json::array();
  bool all = true, usage = false;
  for (const auto& o : result.outcomes) {
    usage = usage || o.usage_error;
    Json e;
    e["name"] = o.name;
    e["kind"] = to_string(o.kind);
    e["status"] = !o.ok ? "error" : o.passed ? "pass" : "fail";
    list.push_back(e);
    all = all && o.passed;
    if (log) {
      *log << (o.passed ? "PASS " : o.ok ? "FAIL " : "ERROR ") << o.name << " (" << to_string(o.kind) << ", "
           << static_cast<long long>(o.wall_ms) << " ms)";
      if (!o.ok) *log << ": " << o.error;
      for (const auto& c : o.checks)
        if (!c.pass) *log << "\n  " << c.metric << " = " << fmt17(c.value) << " outside window";
      *log << '\n';
    }
  }
  run_summary["experiments"] = list;
  run_summary["passed"] = all;
  write_file_atomic(out / "summary.json", dump_json17(run_summary));
  result.exit_code = usage ? 2 : all ? 0 : 1;
  return result;
}

LiouvilleReport liouville_2d_experiment(const LiouvilleConfig& c) {
  if (c.lengths.empty()) throw Error(ErrorKind::configuration, "liouville: no box lengths");
  for (std::size_t i = 1; i < c.lengths.size(); ++i)
    if (!(c.lengths[i] > c.lengths[i - 1])) throw Error(ErrorKind::configuration, "liouville: lengths must increase");
  const double a = c.window_half_width, b = c.window_height;
  if (!(a > 0 && b > 0 && c.spacing > 0)) throw Error(ErrorKind::configuration, "liouville: window and spacing must be positive");
  for (double L : c.lengths)
    if (L - a < 2 * a || L - b < b)
      throw Error(ErrorKind::configuration, "liouville: window comes within one window size of the boundary at L = " + fmt17(L));

  const ClosedFormSolution u0{ClosedFormKind::u0, c.alpha, 2}, nu{ClosedFormKind::nonuniqueness, c.alpha, 2};
  const double alpha = c.alpha;
  const auto rhs = RhsSpec::explicit_rhs([alpha](const Vec& x) { return std::pow(std::max(x[1], 0.0), alpha); });
  const auto clamp = [](const Vec& x) { return v2(x[0], std::max(x[1], 0.0)); };
  LiouvilleReport rep;
  for (int data_case : {1, 2}) {
    for (double L : c.lengths) {
      const auto dom = ConvexDomain::box(2, v2(-L, 0), v2(L, L));
      const Grid g = Grid::covering(dom, c.spacing);
      PointFunction trace;
      if (data_case == 1) {
        const double delta = c.perturbation;
        trace = [=](const Vec& x) {
          const Vec y = clamp(x);
          return u0.value(y) + delta * y[1] * (L * L + y[0] * y[0]) / (2 * L * L * L);
        };
      } else {
        trace = [=](const Vec& x) { return nu.value(clamp(x)); };
      }
      const auto s = solve_dirichlet_nested(dom, g, rhs, trace, c.solver);
      LiouvilleRow row;
      row.data_case = data_case;
      row.length = L;
      row.iterations = s.report.iterations;
      row.residual_sup = s.report.residual_sup;
      row.converged = s.report.status == SolveStatus::converged;
      for (std::size_t k : s.field.interior_nodes()) {
        const Vec x = g.point(k);
        if (std::abs(x[0]) > a + 1e-12 || x[1] > b + 1e-12) continue;
        row.deviation = std::max(row.deviation, std::abs(s.field.value(k) - u0.value(x)));
        row.gap = std::max(row.gap, std::abs(nu.value(x) - u0.value(x)));
      }
      rep.rows.push_back(row);
    }
  }
  const std::size_t m = c.lengths.size();
  for (std::size_t i = 1; i < m; ++i) rep.decay_case1.push_back(rep.rows[i - 1].deviation / rep.rows[i].deviation);
  for (std::size_t i = 0; i < m; ++i) rep.gap_ratio_case2.push_back(rep.rows[m + i].deviation / rep.rows[m + i].gap);
  if (rep.decay_case1.empty()) throw Error(ErrorKind::configuration, "liouville: need at least two box lengths");
  return rep;
}

double u0_volume_ratio_2d(double alpha) {
  // S_h = {x_1^2/2 + y^(2+a)/c < h}, c = (1+a)(2+a). With y = T v, T^(2+a) = c h:
  //   |S_h| = 2 sqrt(2h) T I0,  d_h = T I1 / I0,  I_k = int_0^1 v^k sqrt(1 - v^(2+a)) dv,
  // so |S_h|^2 d_h^a / h^2 = 8 c I0^(2-a) I1^a.
  boost::math::quadrature::tanh_sinh<double> q;
  const double e = 2.0 + alpha;
  const double i0 = q.integrate([e](double v) { return std::sqrt(std::max(0.0, 1.0 - std::pow(v, e))); }, 0.0, 1.0);
  const double i1 = q.integrate([e](double v) { return v * std::sqrt(std::max(0.0, 1.0 - std::pow(v, e))); }, 0.0, 1.0);
  const double c = (1.0 + alpha) * (2.0 + alpha);
  return 8.0 * c * std::pow(i0, 2.0 - alpha) * std::pow(i1, alpha);
}

}  // namespace malab
