// Runs the ten acceptance criteria at their fixed tolerances and prints one PASS/FAIL line each.
// Exits 1 when any criterion fails.
#include "malab/experiment.hpp"
#include "malab/io.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>
#include <string>
#include <vector>

using namespace malab;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Bound {
  std::string metric;
  double lower = -kInf, upper = kInf;
};

struct Ran {
  ExperimentOutcome outcome;
  double seconds = 0.0;
};

Ran run_kind(const std::string& name, ExperimentKind kind, const Json& config, std::uint64_t seed = 1) {
  ExperimentSpec spec;
  spec.name = name;
  spec.kind = kind;
  spec.config = config;
  spec.seed = seed;
  const auto start = std::chrono::steady_clock::now();
  Ran r{run_experiment(spec), 0.0};
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return r;
}

int failures = 0;

// One criterion may draw on several runs; `limit_s` bounds their summed wall time.
void report(int id, const std::string& title, const std::vector<std::pair<const Ran*, std::vector<Bound>>>& parts,
            double limit_s = kInf) {
  bool pass = true;
  std::string detail;
  double seconds = 0.0;
  for (const auto& [ran, bounds] : parts) {
    seconds += ran->seconds;
    const auto& o = ran->outcome;
    if (!o.ok) {
      pass = false;
      detail += " [" + o.name + " error: " + o.error + "]";
      continue;
    }
    for (const auto& b : bounds) {
      const double v = o.metrics.contains(b.metric) ? o.metrics.at(b.metric).get<double>() : std::nan("");
      const bool ok = std::isfinite(v) && v >= b.lower && v <= b.upper;
      pass = pass && ok;
      detail += " " + o.name + "." + b.metric + "=" + fmt17(v) + (ok ? "" : "(!)");
    }
  }
  if (seconds > limit_s) {
    pass = false;
    detail += " runtime " + fmt17(seconds) + " s over " + fmt17(limit_s) + " s";
  } else {
    char buf[64];
    std::snprintf(buf, sizeof buf, " (%.1f s)", seconds);
    detail += buf;
  }
  if (!pass) ++failures;
  std::printf("%s criterion %d: %s;%s\n", pass ? "PASS" : "FAIL", id, title.c_str(), detail.c_str());
  std::fflush(stdout);
}

}  // namespace

int main() {
  const Ran analytic = run_kind("analytic", ExperimentKind::verify_analytic,
                                {{"samples", 1000}, {"alphas", {0, 0.5, 1, 2}}, {"barrier_samples", 10000}}, 42);
  report(1, "closed-form identities and traces",
         {{&analytic, {{"identity_residual", -kInf, 1e-10}, {"trace_deviation", -kInf, 1e-10}}}}, 5.0);

  const Ran dirichlet = run_kind("dirichlet", ExperimentKind::dirichlet_convergence,
                                 {{"alpha", 1}, {"cells", {64, 128, 256}}, {"quadratic_cells", 32}});
  report(2, "solver regression",
         {{&dirichlet, {{"quadratic_error_over_h2", -kInf, 5.0}, {"u0_slope", 0.8, kInf}, {"all_converged", 1, 1}}}},
         600.0);

  const Ran loc05 = run_kind("localization_a0.5", ExperimentKind::localization_scaling,
                             {{"alpha", 0.5}, {"cells", 256}, {"h_max", 0.2}});
  const Ran loc1 = run_kind("localization_a1", ExperimentKind::localization_scaling,
                            {{"alpha", 1}, {"cells", 256}, {"h_max", 0.2}});
  const std::vector<Bound> loc_bounds = {
      {"tangential_error", -kInf, 0.05}, {"normal_error", -kInf, 0.05}, {"decades", 2.0, kInf}, {"converged", 1, 1}};
  report(3, "localization scaling exponents", {{&loc05, loc_bounds}, {&loc1, loc_bounds}}, 900.0);

  const Ran volume = run_kind("volume", ExperimentKind::volume_invariant,
                              {{"alpha", 1}, {"cells", 128}, {"h_max", 0.25}, {"u0_cells", 256}});
  report(4, "volume invariant",
         {{&volume, {{"solution_volume_spread", -kInf, 4.0}, {"u0_relative_error", -kInf, 0.05}, {"converged", 1, 1}}}});

  const Ran monitors = run_kind("monitors", ExperimentKind::monitors, {{"alpha", 1}, {"cells", 128}, {"normal_radius", 0.25}});
  report(5, "normal-derivative bound",
         {{&monitors, {{"normal_derivative_ratio", -kInf, 1.1}, {"u0_normal_equality_error", -kInf, 0.01}, {"converged", 1, 1}}}});
  report(6, "Pogorelov monitors",
         {{&monitors,
           {{"pogorelov_log_slope", -kInf, 0.1}, {"levelset_log_slope", -kInf, 0.1}, {"ball_value", 0.5 - 1e-12, 0.5 + 1e-12}}}});

  const Ran eigen = run_kind("eigen", ExperimentKind::eigen, {{"cells", {16, 32, 64}}, {"interval_nodes", 512}});
  report(7, "eigenvalue problem",
         {{&eigen,
           {{"interval_error", -kInf, 1e-3}, {"lambda_spread", -kInf, 0.02}, {"distance_ratio", -kInf, 10.0}, {"converged", 1, 1}}}});

  const Ran liouville = run_kind("liouville", ExperimentKind::liouville_2d,
                                 {{"lengths", {2, 4, 8}}, {"spacing", 0.0625}, {"alpha", 1}});
  report(8, "Liouville dichotomy",
         {{&liouville, {{"min_decay_case1", 1.5, kInf}, {"min_gap_ratio_case2", 1.0, kInf}, {"all_converged", 1, 1}}}});

  report(9, "barrier suite",
         {{&analytic, {{"barriers_failed", 0, 0}, {"wbar_derivative_error", -kInf, 1e-10}, {"wbar_det_margin", -1e-12, kInf}}}});
  report(10, "transform identities",
         {{&analytic,
           {{"legendre_involution_ratio", -kInf, 1.0},
            {"partial_legendre_residual", -kInf, 1e-9},
            {"partial_legendre_exact_residual", -kInf, 1e-12},
            {"gauss_identity_deviation", -kInf, 1e-8}}}});

  std::printf("%d of 10 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
