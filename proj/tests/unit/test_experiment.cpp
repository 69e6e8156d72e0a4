#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "malab/error.hpp"
#include "malab/experiment.hpp"

#include <cmath>
#include <filesystem>
#include <functional>

using namespace malab;

namespace {

ErrorKind kind_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("no error thrown");
  return ErrorKind::input;
}

std::filesystem::path fresh_dir(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / ("malab_exp_" + name);
  std::filesystem::remove_all(dir);
  return dir;
}

const char* kSmallManifest = R"({
  "experiments": [
    {"name": "quick", "kind": "verify-analytic", "seed": 7,
     "config": {"samples": 50, "barrier_samples": 300, "wbar_samples": 20},
     "acceptance": {"identity_residual": [null, 1e-10], "barriers_failed": [0, 0]}},
    {"name": "broken", "kind": "dirichlet-convergence", "config": {"cells": [4, 8]}, "acceptance": {}}
  ]
})";

// Composite Simpson for the U0 boundary section {x1^2/2 + x2^(2+a)/((1+a)(2+a)) < h} in 2D.
double simpson_volume_ratio(double alpha, double h) {
  const double c = (1.0 + alpha) * (2.0 + alpha);
  const double top = std::pow(c * h, 1.0 / (2.0 + alpha));
  const int n = 200000;
  double area = 0.0, moment = 0.0;
  for (int i = 0; i <= n; ++i) {
    const double t = top * i / n;
    const double w = (i == 0 || i == n) ? 1.0 : (i % 2 ? 4.0 : 2.0);
    const double width = 2.0 * std::sqrt(std::max(0.0, 2.0 * (h - std::pow(t, 2.0 + alpha) / c)));
    area += w * width;
    moment += w * width * t;
  }
  area *= top / (3.0 * n);
  moment *= top / (3.0 * n);
  return area * area * std::pow(moment / area, alpha) / (h * h);
}

}  // namespace

TEST_CASE("kind names round-trip") {
  for (auto k : {ExperimentKind::dirichlet_convergence, ExperimentKind::localization_scaling, ExperimentKind::volume_invariant,
                 ExperimentKind::eigen, ExperimentKind::monitors, ExperimentKind::verify_analytic, ExperimentKind::liouville_2d})
    CHECK(experiment_kind_from_string(to_string(k)) == k);
  CHECK(kind_of([] { experiment_kind_from_string("astrology"); }) == ErrorKind::usage);
}

TEST_CASE("manifest validation") {
  const RunManifest m = parse_manifest(kSmallManifest, "m.json");
  REQUIRE(m.experiments.size() == 2);
  CHECK(m.experiments[0].seed == 7);
  CHECK(m.config_hash.size() == 16);
  CHECK(parse_manifest(kSmallManifest, "again").config_hash == m.config_hash);

  CHECK(kind_of([] { parse_manifest("{\"experiments\": [", "m"); }) == ErrorKind::usage);
  CHECK(kind_of([] { parse_manifest(R"({"experiments": {}})", "m"); }) == ErrorKind::usage);
  CHECK(kind_of([] {
          parse_manifest(R"({"experiments": [{"name": "a", "kind": "eigen"}, {"name": "a", "kind": "eigen"}]})", "m");
        }) == ErrorKind::usage);
  CHECK(kind_of([] { parse_manifest(R"({"experiments": [{"name": "../x", "kind": "eigen"}]})", "m"); }) == ErrorKind::usage);
  CHECK(kind_of([] { parse_manifest(R"({"experiments": [{"name": "a", "kind": "tarot"}]})", "m"); }) == ErrorKind::usage);
  CHECK(kind_of([] {
          parse_manifest(R"({"experiments": [{"name": "a", "kind": "eigen", "acceptance": {"x": [1]}}]})", "m");
        }) == ErrorKind::usage);
  try {
    parse_manifest("{\n\"experiments\": [\n  {\"name\": 3,}\n]}", "bad.json");
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("line 3") != std::string::npos);
  }
}

TEST_CASE("acceptance windows") {
  const Json metrics = {{"a", 1.0}, {"b", 5.0}, {"c", std::nan("")}};
  const auto checks = evaluate_acceptance(Json::parse(R"({"a": [null, 2], "b": [6, null], "c": [null, null]})"), metrics);
  REQUIRE(checks.size() == 3);
  CHECK(checks[0].pass);
  CHECK(!checks[1].pass);
  CHECK(!checks[2].pass);
  CHECK(kind_of([&] { evaluate_acceptance(Json::parse(R"({"zzz": [0, 1]})"), metrics); }) == ErrorKind::configuration);
}

TEST_CASE("dump_json17 prints full precision and nulls non-finite values") {
  const Json j = {{"x", 0.1}, {"y", std::numeric_limits<double>::infinity()}, {"n", 3}};
  const Json back = Json::parse(dump_json17(j));
  CHECK(back["x"].get<double>() == 0.1);
  CHECK(back["y"].is_null());
  CHECK(back["n"] == 3);
  CHECK(dump_json17(j).find("0.10000000000000001") != std::string::npos);
}

TEST_CASE("runs are byte-identical and failures stay isolated") {
  const RunManifest m = parse_manifest(kSmallManifest, "m.json");
  const auto a = fresh_dir("a"), b = fresh_dir("b");
  const RunResult ra = run(m, a, std::nullopt, nullptr);
  const RunResult rb = run(m, b, std::nullopt, nullptr);
  CHECK(ra.exit_code == 1);
  REQUIRE(ra.outcomes.size() == 2);
  CHECK(ra.outcomes[0].passed);
  CHECK(!ra.outcomes[1].ok);
  CHECK(!ra.outcomes[1].error.empty());
  for (const char* f : {"summary.json", "quick/summary.json", "quick/data.csv", "broken/summary.json"})
    CHECK(read_file(a / f) == read_file(b / f));
  CHECK(Json::parse(read_file(a / "broken/summary.json"))["status"] == "error");

  const RunResult only = run(m, fresh_dir("c"), std::string("quick"), nullptr);
  CHECK(only.exit_code == 0);
  CHECK(only.outcomes.size() == 1);
  CHECK(kind_of([&] { run(m, fresh_dir("d"), std::string("nope"), nullptr); }) == ErrorKind::usage);
  for (const char* d : {"a", "b", "c", "d"}) std::filesystem::remove_all(fresh_dir(d));
}

TEST_CASE("malformed experiment config maps to a usage exit") {
  const RunManifest m = parse_manifest(
      R"({"experiments": [{"name": "a", "kind": "verify-analytic", "config": {"samples": "many"}}]})", "m");
  const RunResult r = run(m, fresh_dir("e"), std::nullopt, nullptr);
  CHECK(r.exit_code == 2);
  CHECK(r.outcomes[0].usage_error);
  std::filesystem::remove_all(fresh_dir("e"));
}

TEST_CASE("liouville configuration guard") {
  LiouvilleConfig c;
  c.lengths = {4.0, 2.0};
  CHECK(kind_of([&] { liouville_2d_experiment(c); }) == ErrorKind::configuration);
  c.lengths = {2.0, 4.0};
  c.window_half_width = 1.0;  // L - a = 1 < 2a at L = 2
  CHECK(kind_of([&] { liouville_2d_experiment(c); }) == ErrorKind::configuration);
  c.window_half_width = 0.5;
  c.window_height = 1.5;  // L - b = 0.5 < b
  CHECK(kind_of([&] { liouville_2d_experiment(c); }) == ErrorKind::configuration);
}

TEST_CASE("U0 volume ratio oracle matches direct quadrature at several heights") {
  for (double alpha : {0.0, 0.5, 1.0, 2.0}) {
    const double oracle = u0_volume_ratio_2d(alpha);
    for (double h : {0.3, 0.01}) CHECK(simpson_volume_ratio(alpha, h) == doctest::Approx(oracle).epsilon(1e-5));
  }
}
