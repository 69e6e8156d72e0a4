#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "malab/domain.hpp"
#include "malab/error.hpp"
#include "malab/field.hpp"
#include "malab/grid.hpp"
#include "malab/io.hpp"
#include "malab/stencil.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

using namespace malab;

namespace {

Vec v2(double a, double b) { return Vec(a, b, 0.0); }

// Brute-force distance from x to a densely sampled circle.
double sampled_circle_distance(const Vec& x, const Vec& c, double r, int samples) {
  double best = 1e300;
  for (int k = 0; k < samples; ++k) {
    const double t = 2.0 * std::numbers::pi * k / samples;
    best = std::min(best, (c + r * v2(std::cos(t), std::sin(t)) - x).norm());
  }
  return best;
}

double u0(const Vec& x, double alpha) {
  return 0.5 * x[0] * x[0] + std::pow(x[1], 2.0 + alpha) / ((1.0 + alpha) * (2.0 + alpha));
}

std::vector<ConvexDomain> sample_domains() {
  return {ConvexDomain::tangent_ball(2, 1.0),
          ConvexDomain::half_ball(2, 1.0),
          ConvexDomain::slab(2, 2.0, 1.0),
          ConvexDomain::superellipse(2, v2(1.0, 0.5), 2.0, v2(0.0, 0.5)),
          ConvexDomain::superellipse(2, v2(1.0, 1.0), 4.0, v2(0.0, 1.0)),
          ConvexDomain::polytope(2, {v2(-1, 0), v2(1, 0), v2(0.5, 1), v2(-0.5, 1)}),
          ConvexDomain::tangent_ball(3, 1.0),
          ConvexDomain::half_ball(3, 1.0),
          ConvexDomain::box(3, Vec(-1, -1, 0), Vec(1, 1, 1))};
}

Vec random_point_in(const ConvexDomain& d, std::mt19937_64& rng) {
  const Box b = d.bounding_box();
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (;;) {
    Vec x = Vec::Zero();
    for (int a = 0; a < d.dimension(); ++a) x[a] = b.lower[a] + u(rng) * (b.upper[a] - b.lower[a]);
    if (d.margin(x) > 0) return x;
  }
}

}  // namespace

TEST_CASE("boundary distance examples") {
  const auto ball = ConvexDomain::tangent_ball(2, 1.0);
  CHECK(ball.boundary_distance(v2(0, 1)) == doctest::Approx(1.0).epsilon(1e-15));
  const auto slab = ConvexDomain::slab(2, std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity());
  CHECK(slab.boundary_distance(v2(0.3, 0.2)) == doctest::Approx(0.2).epsilon(1e-15));
  const double d = ball.boundary_distance(v2(0, 0.5));
  CHECK(d == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(std::abs(d - sampled_circle_distance(v2(0, 0.5), v2(0, 1), 1.0, 200000)) < 1e-8);
}

TEST_CASE("points outside raise a domain error") {
  const auto ball = ConvexDomain::tangent_ball(2, 1.0);
  try {
    (void)ball.boundary_distance(v2(0, -0.1));
    FAIL("expected domain error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::domain);
  }
  CHECK_THROWS_AS((void)ConvexDomain::half_ball(2, 1.0).boundary_distance(v2(0.9, 0.9)), Error);
}

TEST_CASE("superellipse distance agrees with dense boundary sampling") {
  const auto se = ConvexDomain::superellipse(2, v2(1.0, 0.5), 2.0, v2(0.0, 0.5));
  std::mt19937_64 rng(7);
  for (int s = 0; s < 20; ++s) {
    const Vec x = random_point_in(se, rng);
    double best = 1e300;
    for (int k = 0; k < 200000; ++k) {
      const double t = 2.0 * std::numbers::pi * k / 200000;
      best = std::min(best, (v2(std::cos(t), 0.5 + 0.5 * std::sin(t)) - x).norm());
    }
    CHECK(std::abs(se.boundary_distance(x) - best) < 1e-6);
  }
}

TEST_CASE("polytope distance is the nearest face plane and duplicate vertices collapse") {
  const auto p = ConvexDomain::polytope(2, {v2(-1, 0), v2(1, 0), v2(1, 2), v2(-1, 2), v2(1, 2 + 1e-14)});
  CHECK(p.faces().size() == 4);
  CHECK(p.boundary_distance(v2(0.5, 0.3)) == doctest::Approx(0.3));
  CHECK(p.boundary_distance(v2(0.8, 1.0)) == doctest::Approx(0.2));
}

TEST_CASE("distance is 1-Lipschitz and the domain is convex") {
  std::mt19937_64 rng(11);
  for (const auto& d : sample_domains()) {
    for (int s = 0; s < 200; ++s) {
      const Vec x = random_point_in(d, rng), y = random_point_in(d, rng);
      CHECK(std::abs(d.boundary_distance(x) - d.boundary_distance(y)) <= (x - y).norm() + 1e-9);
      CHECK(d.margin(0.5 * (x + y)) > 0);
    }
  }
}

TEST_CASE("tangent ball at the marked point lies inside") {
  for (const auto& d : sample_domains()) {
    const double rho = d.tangent_ball_radius();
    REQUIRE(rho > 0);
    const Vec c = d.marked_point() + rho * unit(d.dimension() - 1);
    for (int k = 0; k < 360; ++k) {
      const double t = 2.0 * std::numbers::pi * k / 360;
      Vec dir = d.dimension() == 2 ? v2(std::cos(t), std::sin(t)) : Vec(std::cos(t) * 0.6, std::sin(t) * 0.6, 0.8);
      CHECK(d.margin(c + rho * dir) >= -1e-9);
    }
    if (d.marked_point().norm() == 0.0) {
      // Marked point at the origin: the region sits above {x_n = 0}.
      std::mt19937_64 rng(3);
      for (int s = 0; s < 100; ++s) CHECK(random_point_in(d, rng)[d.dimension() - 1] > -1e-12);
    }
  }
}

TEST_CASE("distance along the inner normal of a tangent ball") {
  const auto ball = ConvexDomain::tangent_ball(2, 0.5);
  const double hg = 0.01;
  for (int k = 0; k <= 100; ++k) {
    const double t = 0.01 * k;
    CHECK(std::abs(ball.boundary_distance(v2(0, t)) - std::min(t, 1.0 - t)) <= 10 * hg);
  }
}

TEST_CASE("ray exit lands on the boundary") {
  const auto ball = ConvexDomain::tangent_ball(2, 1.0);
  const double t = ball.ray_exit(v2(0, 1), v2(1, 0), 5.0);
  CHECK(t == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(ball.ray_exit(v2(0, 1), v2(0.1, 0), 1.0) == 1.0);
}

TEST_CASE("grid nodes sit on integer multiples of the spacing") {
  const auto hb = ConvexDomain::half_ball(2, 1.0);
  const Grid g = Grid::covering(hb, 0.1);
  CHECK(g.lo()[0] == -10);
  CHECK(g.hi()[0] == 10);
  CHECK(g.lo()[1] == 0);
  CHECK(g.count(1) == 11);
  const std::size_t origin = g.linear(Index3(0, 0, 0));
  CHECK(g.point(origin).norm() == 0.0);
  for (std::size_t k = 0; k < g.size(); k += 7) CHECK(g.linear(g.multi(k)) == k);
  CHECK_THROWS_AS(Grid(2, 0.1, Index3(0, 0, 0), Index3(5, 10, 0)), Error);
}

TEST_CASE("direction sets and frames") {
  const auto w1 = make_directions(2, 1);
  CHECK(w1.directions.size() == 4);
  CHECK(w1.frames.size() == 2);
  const auto w2 = make_directions(2, 2);
  CHECK(w2.directions.size() == 8);
  CHECK(w2.frames.size() == 4);
  for (const auto& f : w2.frames) CHECK(w2.directions[f[0]].dot(w2.directions[f[1]]) == 0);
  const auto w3d = make_directions(3, 1);
  CHECK(w3d.directions.size() == 13);
  for (const auto& f : w3d.frames) {
    CHECK(w3d.directions[f[0]].dot(w3d.directions[f[1]]) == 0);
    CHECK(w3d.directions[f[0]].dot(w3d.directions[f[2]]) == 0);
  }
  CHECK_THROWS_AS(make_directions(2, 4), Error);
}

TEST_CASE("build_field samples init and trace") {
  const auto hb = ConvexDomain::half_ball(2, 1.0);
  const Grid g = Grid::covering(hb, 0.05);
  auto trace = [](const Vec& x) { return 0.5 * x[0] * x[0]; };
  const auto f = build_field(hb, g, [](const Vec&) { return 0.0; }, trace);
  int boundary = 0;
  for (std::size_t k = 0; k < g.size(); ++k) {
    if (f.kind(k) == NodeKind::interior) CHECK(f.value(k) == 0.0);
    if (f.kind(k) == NodeKind::boundary) {
      ++boundary;
      CHECK(f.value(k) == trace(g.point(k)));
    }
    if (f.kind(k) == NodeKind::exterior) CHECK(std::isnan(f.value(k)));
  }
  CHECK(boundary >= 41);
  // Cut arms carry the trace at the boundary intersection.
  const std::size_t k = g.linear(Index3(19, 5, 0));
  REQUIRE(f.kind(k) == NodeKind::interior);
  const Arm a = f.arm(k, Index3(1, 0, 0));
  CHECK(a.cut);
  const double xb = std::sqrt(1.0 - 0.25 * 0.25);
  CHECK(a.length == doctest::Approx(std::sqrt(1.0 - 0.0625) - 0.95).epsilon(1e-9));
  CHECK(a.value == doctest::Approx(trace(v2(xb, 0.25))).epsilon(1e-9));
}

TEST_CASE("U0 initial data is discretely convex") {
  const auto hb = ConvexDomain::half_ball(2, 1.0);
  const Grid g = Grid::covering(hb, 0.05);
  auto f = build_field(hb, g, [](const Vec& x) { return u0(x, 1.0); }, [](const Vec& x) { return u0(x, 1.0); });
  CHECK(f.convexity_flag());
  auto bumped = std::vector<double>(f.values().begin(), f.values().end());
  bumped[g.linear(Index3(0, 5, 0))] += 0.05;
  CHECK_FALSE(f.with_values(bumped).convexity_flag());
}

TEST_CASE("coarse grids raise a resolution error") {
  const auto ball = ConvexDomain::tangent_ball(2, 1.0);
  const Grid coarse = Grid::covering(ball, 0.3);
  try {
    (void)build_field(ball, coarse, [](const Vec&) { return 0.0; }, [](const Vec&) { return 0.0; });
    FAIL("expected resolution error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::resolution);
  }
}

TEST_CASE("numerical Hessian") {
  const auto ball = ConvexDomain::tangent_ball(2, 1.0);
  const Grid g = Grid::covering(ball, 0.02);
  auto q = [](const Vec& x) { return 0.5 * x.squaredNorm(); };
  const auto f = build_field(ball, g, q, q);
  CHECK((numerical_hessian(f, v2(0.1, 1.0)) - Mat::Identity().block<3, 3>(0, 0)).topLeftCorner(2, 2).norm() < 1e-10);

  // Arbitrary quadratic, evaluated off the nodes too.
  auto p = [](const Vec& x) { return 1.5 * x[0] * x[0] - 0.7 * x[0] * x[1] + 0.3 * x[1] * x[1] + x[0] - 2 * x[1]; };
  const auto fp = build_field(ball, g, p, p);
  const Mat hp = numerical_hessian(fp, v2(0.137, 0.911));
  CHECK(hp(0, 0) == doctest::Approx(3.0).epsilon(1e-9));
  CHECK(hp(0, 1) == doctest::Approx(-0.7).epsilon(1e-9));
  CHECK(hp(1, 1) == doctest::Approx(0.6).epsilon(1e-9));

  const auto hb = ConvexDomain::half_ball(2, 1.0);
  const Grid gh = Grid::covering(hb, 0.01);
  auto uu = [](const Vec& x) { return u0(x, 1.0); };
  const auto fu = build_field(hb, gh, uu, uu);
  const Mat hu = numerical_hessian(fu, v2(0.0, 0.5));
  CHECK(std::abs(hu(0, 0) - 1.0) < 1e-10);
  CHECK(std::abs(hu(1, 1) - 0.5) < 0.01 * 0.01);
  CHECK(std::abs(hu(0, 1)) < 1e-10);

  try {
    (void)numerical_hessian(fu, v2(0.0, 0.01));
    FAIL("expected near-boundary signal");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::near_boundary);
  }
}

TEST_CASE("field serialization round trips") {
  const auto hb = ConvexDomain::half_ball(2, 1.0);
  const Grid g = Grid::covering(hb, 0.05);
  auto uu = [](const Vec& x) { return u0(x, 1.0) + 0.1 * std::sin(3 * x[0]); };
  const auto f = build_field(hb, g, uu, uu);
  std::stringstream csv(field_csv(f));
  const auto back = read_field_csv(csv, hb, g, uu);
  std::stringstream bin;
  write_field_binary(bin, f);
  const auto back2 = read_field_binary(bin, hb, uu);
  for (std::size_t k = 0; k < g.size(); ++k) {
    if (f.kind(k) == NodeKind::exterior) continue;
    CHECK(back.value(k) == f.value(k));
    CHECK(back2.value(k) == f.value(k));
  }
}

TEST_CASE("domain and grid from JSON") {
  const auto j = parse_json(R"({"dimension":2,"shape":"half_ball","params":{"radius":1.0},"grid":{"spacing":0.05}})", "test");
  const auto d = domain_from_json(j);
  CHECK(d.shape() == ShapeKind::half_ball);
  const Grid g = grid_from_json(j.at("grid"), d);
  CHECK(g.spacing() == 0.05);
  CHECK_THROWS_AS(parse_json("{\"dimension\": ", "bad"), Error);
  CHECK_THROWS_AS(domain_from_json(parse_json(R"({"shape":"torus"})", "t")), Error);
}
