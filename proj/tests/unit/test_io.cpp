#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "malab/analytic.hpp"
#include "malab/error.hpp"
#include "malab/io.hpp"
#include "malab/solver.hpp"

#include <cmath>
#include <filesystem>
#include <sstream>

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

}  // namespace

TEST_CASE("fmt17 round-trips") {
  for (double v : {0.1, 1.0 / 3.0, -2.5e-300, 6.02214076e23}) CHECK(std::stod(fmt17(v)) == v);
  CHECK(fmt17(0.5) == "0.5");
}

TEST_CASE("atomic write replaces contents and leaves no temporaries") {
  const auto dir = std::filesystem::temp_directory_path() / "malab_io_test";
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  write_file_atomic(dir / "a.txt", "first");
  write_file_atomic(dir / "a.txt", "second");
  CHECK(read_file(dir / "a.txt") == "second");
  int files = 0;
  for ([[maybe_unused]] const auto& e : std::filesystem::directory_iterator(dir)) ++files;
  CHECK(files == 1);
  std::filesystem::remove_all(dir);
}

TEST_CASE("parse errors carry position") {
  try {
    parse_json("{\n  \"a\": [1, 2,\n}", "cfg.json");
    FAIL("expected a parse error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::usage);
    const std::string msg = e.what();
    CHECK(msg.find("cfg.json") != std::string::npos);
    CHECK(msg.find("line 3") != std::string::npos);
  }
}

TEST_CASE("solver config keys") {
  const SolverConfig c = solver_config_from_json(parse_json(
      R"({"stencil_width": 3, "max_iters": 7, "tol_residual": 1e-6, "damping": 0.5, "sweep_order": "red-black", "method": "gauss_seidel"})",
      "t"));
  CHECK(c.stencil_width == 3);
  CHECK(c.max_iters == 7);
  CHECK(c.tol_residual == 1e-6);
  CHECK(c.damping == 0.5);
  CHECK(c.sweep_order == SweepOrder::red_black);
  CHECK(c.method == SolveMethod::gauss_seidel);

  const SolverConfig d = solver_config_from_json(Json::object());
  CHECK(d.method == SolveMethod::newton);
  CHECK(kind_of([] { solver_config_from_json(parse_json(R"({"stencil_width": 9})", "t")); }) == ErrorKind::usage);
  CHECK(kind_of([] { solver_config_from_json(parse_json(R"({"method": "magic"})", "t")); }) == ErrorKind::usage);
  CHECK(kind_of([] { solver_config_from_json(parse_json(R"({"max_iters": "ten"})", "t")); }) == ErrorKind::usage);
}

TEST_CASE("polynomial, rhs and boundary parsers") {
  const PointFunction p = polynomial_from_json(parse_json(R"([{"c": 2, "p": [1, 0, 0]}, {"c": -1, "p": [0, 1.5, 0]}])", "t"));
  CHECK(p(Vec(3, 4, 0)) == doctest::Approx(6.0 - 8.0));

  const RhsSpec deg = rhs_from_json(parse_json(R"({"mode": "degenerate", "alpha": 1, "g": 2})", "t"));
  CHECK(deg.mode == RhsMode::degenerate_distance);
  CHECK(deg.alpha == 1.0);
  CHECK(deg.g(Vec(0.1, 0.2, 0)) == 2.0);

  const RhsSpec ex = rhs_from_json(parse_json(R"({"mode": "explicit", "f": [{"c": 1, "p": [0, 1, 0]}]})", "t"));
  CHECK(ex.mode == RhsMode::explicit_function);
  CHECK(ex.function(Vec(0.3, 0.7, 0)) == doctest::Approx(0.7));
  CHECK(kind_of([] { rhs_from_json(parse_json(R"({"mode": "sideways"})", "t")); }) == ErrorKind::usage);

  const PointFunction q = boundary_from_json(parse_json(R"({"kind": "quadratic"})", "t"), 2);
  CHECK(q(Vec(1, 2, 0)) == doctest::Approx(2.5));
  const PointFunction t = boundary_from_json(parse_json(R"({"kind": "u0_trace", "alpha": 1})", "t"), 2);
  CHECK(t(Vec(0.4, 0.6, 0)) == doctest::Approx(u0_value(Vec(0.4, 0.6, 0), 2, 1.0)));
  CHECK(t(Vec(0.4, -1e-14, 0)) == doctest::Approx(0.08));
  CHECK(kind_of([] { boundary_from_json(parse_json(R"({"kind": "spiral"})", "t"), 2); }) == ErrorKind::usage);
}

TEST_CASE("nested solve agrees with the direct solve") {
  const auto dom = ConvexDomain::half_ball(2, 1.0);
  const Grid grid = Grid::covering(dom, 1.0 / 64);
  const RhsSpec rhs = RhsSpec::explicit_rhs([](const Vec& x) { return std::max(x[1], 0.0); });
  const PointFunction trace = [](const Vec& x) { return u0_value(Vec(x[0], std::max(x[1], 0.0), 0), 2, 1.0); };
  SolverConfig cfg;
  cfg.tol_residual = 1e-9;
  const SolveResult direct = solve_dirichlet(dom, grid, rhs, trace, cfg);
  const SolveResult nested = solve_dirichlet_nested(dom, grid, rhs, trace, cfg);
  REQUIRE(direct.report.status == SolveStatus::converged);
  REQUIRE(nested.report.status == SolveStatus::converged);
  CHECK(nested.report.iterations <= direct.report.iterations);
  double diff = 0.0;
  for (std::size_t k : direct.field.interior_nodes()) diff = std::max(diff, std::abs(direct.field.value(k) - nested.field.value(k)));
  CHECK(diff < 1e-7);
}
