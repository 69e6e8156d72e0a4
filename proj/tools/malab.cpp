// Command-line front end: solve, sections, monitor, verify and run.
#include "malab/analytic.hpp"
#include "malab/error.hpp"
#include "malab/experiment.hpp"
#include "malab/io.hpp"
#include "malab/sections.hpp"
#include "malab/solver.hpp"
#include "malab/transforms.hpp"

#include "CLI11.hpp"

#include <cmath>
#include <filesystem>
#include <iostream>
#include <limits>
#include <string>

using namespace malab;

namespace {

constexpr int kUsage = 2;

Json load_config(const std::string& path) { return parse_json(read_file(path), path); }

Json section(const Json& cfg, const char* key) {
  if (!cfg.contains(key)) return Json::object();
  if (!cfg.at(key).is_object()) throw Error(ErrorKind::usage, std::string("key '") + key + "' must be an object");
  return cfg.at(key);
}

struct Problem {
  ConvexDomain domain;
  Grid grid;
  RhsSpec rhs;
  PointFunction trace;
  SolverConfig solver;
};

Problem problem_from(const Json& cfg) {
  if (!cfg.contains("domain")) throw Error(ErrorKind::usage, "config needs a 'domain' object");
  if (!cfg.contains("grid")) throw Error(ErrorKind::usage, "config needs a 'grid' object");
  ConvexDomain domain = domain_from_json(section(cfg, "domain"));
  Grid grid = grid_from_json(section(cfg, "grid"), domain);
  return {domain, grid, rhs_from_json(section(cfg, "rhs")), boundary_from_json(section(cfg, "boundary"), domain.dimension()),
          solver_config_from_json(section(cfg, "solver"))};
}

// The field examined by `sections` and `monitor`: a fresh solve (default) or a sampled closed form
// ({"field": {"source": "closed_form", "kind": "u0" | "nonuniqueness", "alpha": a}}).
ScalarField field_from(const Json& cfg, std::ostream& log) {
  const Problem p = problem_from(cfg);
  const Json f = section(cfg, "field");
  const std::string source = f.value("source", std::string("solve"));
  if (source == "closed_form") {
    const std::string kind = f.value("kind", std::string("u0"));
    if (kind != "u0" && kind != "nonuniqueness") throw Error(ErrorKind::usage, "field.kind must be u0 or nonuniqueness");
    const ClosedFormSolution sol{kind == "u0" ? ClosedFormKind::u0 : ClosedFormKind::nonuniqueness, f.value("alpha", 1.0),
                                 p.domain.dimension()};
    return build_field(p.domain, p.grid, sol.function(), sol.function());
  }
  if (source != "solve") throw Error(ErrorKind::usage, "field.source must be solve or closed_form");
  const SolveResult s = solve_dirichlet_nested(p.domain, p.grid, p.rhs, p.trace, p.solver);
  log << "solve: " << to_string(s.report.status) << ", " << s.report.iterations << " iterations, residual "
      << fmt17(s.report.residual_sup) << '\n';
  return f.value("subtract_plane", true) ? subtract_supporting_plane(s.field) : s.field;
}

Json report_json(const MonitorReport& r) {
  Json j;
  j["name"] = r.name;
  j["max_value"] = r.max_value;
  j["argmax"] = {r.argmax[0], r.argmax[1], r.argmax[2]};
  for (const auto& [k, v] : r.context) j["context"][k] = v;
  return j;
}

void emit(const Json& j, const std::string& out) {
  const std::string text = dump_json17(j);
  if (out.empty()) std::cout << text;
  else write_file_atomic(out, text);
}

int cmd_solve(const std::string& config, const std::string& prefix) {
  const Problem p = problem_from(load_config(config));
  const SolveResult s = solve_dirichlet(p.domain, p.grid, p.rhs, p.trace, p.solver);
  write_file_atomic(prefix + "_field.csv", field_csv(s.field));
  Json rep;
  rep["status"] = to_string(s.report.status);
  rep["iterations"] = s.report.iterations;
  rep["residual_sup"] = s.report.residual_sup;
  rep["convexity_flag"] = s.report.convexity_flag;
  rep["runtime_ms"] = s.report.wall_ms;
  write_file_atomic(prefix + "_report.json", dump_json17(rep));
  std::cout << dump_json17(rep);
  return s.report.status == SolveStatus::converged ? 0 : 1;
}

int cmd_sections(const std::string& config, const std::string& prefix) {
  const Json cfg = load_config(config);
  const ScalarField f = field_from(cfg, std::cerr);
  const Json s = section(cfg, "sections");
  const double alpha = s.value("alpha", section(cfg, "rhs").value("alpha", 0.0));
  const double h_max = s.value("h_max", 0.25);
  const int n = f.dimension();
  std::string csv = "h";
  for (int i = 1; i < n; ++i) csv += ",tau_" + std::to_string(i);
  for (int i = 1; i < n; ++i) csv += ",d_" + std::to_string(i);
  csv += ",d_n,d_h,measure,volume_ratio\n";
  std::vector<NormalizationRecord> recs;
  for (double h : h_ladder(h_max, f.grid().spacing())) {
    try {
      recs.push_back(normalize_section(f, f.domain().marked_point(), h, alpha));
    } catch (const Error& e) {
      std::cerr << "h = " << fmt17(h) << ": " << e.what() << '\n';
      continue;
    }
    const auto& r = recs.back();
    csv += fmt17(r.h);
    for (int i = 0; i < n - 1; ++i) csv += ',' + fmt17(r.tau[i]);
    for (double d : r.axes) csv += ',' + fmt17(d);
    csv += ',' + fmt17(r.d_n) + ',' + fmt17(r.d_h) + ',' + fmt17(r.measure) + ',' + fmt17(r.volume_ratio) + '\n';
  }
  write_file_atomic(prefix + "_records.csv", csv);
  const ScalingFit fit = scaling_fit(recs);
  Json j;
  j["tangential_slope"] = fit.tangential_slope;
  j["normal_slope"] = fit.normal_slope;
  j["dh_slope"] = fit.dh_slope;
  j["r2"] = fit.r2;
  j["axis_slopes"] = fit.axis_slopes;
  j["records"] = recs.size();
  write_file_atomic(prefix + "_fit.json", dump_json17(j));
  std::cout << dump_json17(j);
  return 0;
}

int cmd_monitor(const std::string& kind, const std::string& config, const std::string& out) {
  const Json cfg = load_config(config);
  const Json m = section(cfg, "monitor");
  const ScalarField f = field_from(cfg, std::cerr);
  const double alpha = m.value("alpha", section(cfg, "rhs").value("alpha", 0.0));
  const double radius = m.value("radius", 0.5);
  Json j;
  if (kind == "pogorelov") {
    Json series = Json::array();
    for (double h : m.value("heights", std::vector<double>{0.1, 0.05, 0.025, 0.0125})) {
      const auto r = pogorelov_monitor(f, compute_section(f, f.domain().marked_point(), Vec::Zero(), h), Index3(1, 0, 0));
      Json e = report_json(r);
      e["h"] = h;
      series.push_back(e);
    }
    j["series"] = series;
  } else if (kind == "normal-derivative") {
    j = report_json(normal_derivative_monitor(f, alpha, radius));
  } else if (kind == "growth") {
    j = report_json(growth_envelope(f, radius));
  } else if (kind == "tangent-cone") {
    std::vector<Vec> dirs;
    for (double t : {-1.0, -0.5, 0.0, 0.5, 1.0}) dirs.push_back(Vec(t, 0, 0));
    const auto lambdas = m.value("lambdas", std::vector<double>{0.2, 0.1, 0.05});
    const TangentConeProfile tc = tangent_cone_profile(f, dirs, lambdas);
    for (std::size_t i = 0; i < dirs.size(); ++i) {
      Json e;
      e["direction"] = dirs[i][0];
      e["estimates"] = tc.estimates[i];
      e["gamma"] = tc.gamma[i];
      j["profile"].push_back(e);
    }
  } else {
    throw Error(ErrorKind::usage, "unknown monitor kind '" + kind + "'");
  }
  emit(j, out);
  return 0;
}

int cmd_verify(const std::string& kind, std::uint64_t seed, int samples, const std::string& out) {
  Json j;
  j["kind"] = kind;
  double deviation = 0.0, margin = std::numeric_limits<double>::quiet_NaN();
  int count = 0;
  bool pass = true;
  const bool barrier_kind = kind.rfind("barrier-", 0) == 0;
  if (samples == 0) samples = barrier_kind ? 10000 : 1000;
  const BarrierRegion region{.samples = samples, .seed = seed};
  const auto barrier = [&](const std::vector<BarrierSpec>& specs) {
    margin = std::numeric_limits<double>::infinity();
    for (const auto& b : specs) {
      const auto r = verify_barrier(b, region);
      margin = std::min(margin, r.max_value);
      pass = pass && r.context.at("pass") == 1.0;
      count += static_cast<int>(r.context.at("samples"));
    }
  };
  if (kind == "u0" || kind == "nonuniqueness") {
    const auto k = kind == "u0" ? ClosedFormKind::u0 : ClosedFormKind::nonuniqueness;
    for (double a : {0.0, 0.5, 1.0, 2.0})
      for (int n : {2, 3}) {
        const auto r = verify_ma_identity({k, a, n}, half_space_samples(n, samples, seed));
        deviation = std::max({deviation, r.max_value, r.context.at("trace_deviation")});
        pass = pass && r.context.at("pass") == 1.0;
        count += samples;
      }
  } else if (kind == "barrier-w1") {
    barrier({tune_w1(BarrierSpec::w1(2, 0.1), region), tune_w1(BarrierSpec::w1(3, 1.0 / 6), region)});
  } else if (kind == "barrier-w2") {
    barrier({BarrierSpec::w2(2, 0.1, 1e-3, 0.0), BarrierSpec::w2(3, 0.1, 1e-3, 0.0)});
  } else if (kind == "barrier-w3") {
    barrier({BarrierSpec::w3(2, 0.1, {0.1}, 0.02, 1e-2, 0.0), BarrierSpec::w3(3, 0.1, {0.1, 0.1}, 0.02, 1e-2, 0.0)});
  } else if (kind == "barrier-v") {
    std::vector<BarrierSpec> specs;
    for (int n : {2, 3})
      for (double a : {0.0, 0.5, 1.0, 2.0}) specs.push_back(BarrierSpec::v(n, a, 0.01));
    barrier(specs);
  } else if (kind == "legendre" || kind == "partial-legendre" || kind == "levelset") {
    ExperimentSpec spec;
    spec.name = kind;
    spec.seed = seed;
    spec.config["samples"] = samples;
    const ExperimentOutcome o = run_experiment(spec);
    if (!o.ok) throw Error(ErrorKind::input, o.error);
    if (kind == "legendre") {
      deviation = o.metrics.at("legendre_involution_ratio").get<double>();
      pass = deviation <= 1.0;
    } else if (kind == "partial-legendre") {
      deviation = std::max(o.metrics.at("partial_legendre_residual").get<double>(),
                           o.metrics.at("partial_legendre_exact_residual").get<double>());
      pass = deviation <= 1e-9;
    } else {
      deviation = o.metrics.at("gauss_identity_deviation").get<double>();
      count = o.metrics.at("gauss_identity_samples").get<int>();
      pass = deviation <= 1e-8;
    }
  } else {
    throw Error(ErrorKind::usage, "unknown verify kind '" + kind + "'");
  }
  j["max_deviation"] = deviation;
  j["margin"] = std::isnan(margin) ? Json(nullptr) : Json(margin);
  j["samples"] = count;
  j["pass"] = pass;
  emit(j, out);
  return pass ? 0 : 1;
}

int cmd_run(const std::string& manifest_path, const std::string& out, const std::string& only) {
  RunManifest m = parse_manifest(read_file(manifest_path), manifest_path);
  std::filesystem::path dir = out.empty() ? m.output_dir : std::filesystem::path(out);
  if (dir.empty()) throw Error(ErrorKind::usage, "no output directory: pass --out or set output_dir");
  const RunResult r = run(m, dir, only.empty() ? std::nullopt : std::optional<std::string>(only), &std::cout);
  return r.exit_code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Degenerate Monge-Ampere laboratory"};
  app.require_subcommand(1);

  std::string config, out, kind, manifest, only;
  std::uint64_t seed = 1;
  int samples = 0;

  auto* solve = app.add_subcommand("solve", "Solve a Dirichlet problem; writes <out>_field.csv and <out>_report.json");
  solve->add_option("--config", config, "JSON problem file")->required();
  solve->add_option("--out", out, "output prefix")->required();

  auto* sections = app.add_subcommand("sections", "Section normalization ladder; writes <out>_records.csv and <out>_fit.json");
  sections->add_option("--config", config, "JSON problem file")->required();
  sections->add_option("--out", out, "output prefix")->required();

  auto* monitor = app.add_subcommand("monitor", "Evaluate a monitor on a solved or sampled field");
  monitor->add_option("--kind", kind, "monitor")->required()->check(
      CLI::IsMember({"pogorelov", "normal-derivative", "growth", "tangent-cone"}));
  monitor->add_option("--config", config, "JSON problem file")->required();
  monitor->add_option("--out", out, "JSON report path (stdout when omitted)");

  auto* verify = app.add_subcommand("verify", "Closed-form, barrier and transform checks");
  verify->add_option("--kind", kind, "check")->required()->check(
      CLI::IsMember({"u0", "nonuniqueness", "barrier-w1", "barrier-w2", "barrier-w3", "barrier-v", "legendre",
                     "partial-legendre", "levelset"}));
  verify->add_option("--seed", seed, "sampling seed");
  verify->add_option("--samples", samples, "samples per check (default 1000, barriers 10000)")->check(CLI::PositiveNumber);
  verify->add_option("--out", out, "JSON report path (stdout when omitted)");

  auto* runner = app.add_subcommand("run", "Run an experiment manifest");
  runner->add_option("--manifest", manifest, "JSON manifest")->required();
  runner->add_option("--out", out, "output directory");
  runner->add_option("--only", only, "run only the named experiment");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kUsage;
  }

  try {
    if (*solve) return cmd_solve(config, out);
    if (*sections) return cmd_sections(config, out);
    if (*monitor) return cmd_monitor(kind, config, out);
    if (*verify) return cmd_verify(kind, seed, samples, out);
    return cmd_run(manifest, out, only);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return e.kind() == ErrorKind::usage || e.kind() == ErrorKind::configuration ? kUsage : 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
