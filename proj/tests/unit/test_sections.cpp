#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "malab/analytic.hpp"
#include "malab/error.hpp"
#include "malab/john.hpp"
#include "malab/sections.hpp"

#include <cmath>
#include <numbers>

using namespace malab;

namespace {

Vec v2(double a, double b) { return Vec(a, b, 0.0); }

double quadratic(const Vec& x) { return 0.5 * x.squaredNorm(); }

ScalarField sampled(const ConvexDomain& dom, double h, const PointFunction& u) {
  return build_field(dom, Grid::covering(dom, h), u, u);
}

ErrorKind kind_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("expected an error");
  return ErrorKind::usage;
}

// Composite Simpson rule on [a, b].
double simpson(const std::function<double(double)>& f, double a, double b, int m = 20000) {
  const double h = (b - a) / m;
  double s = f(a) + f(b);
  for (int i = 1; i < m; ++i) s += (i % 2 ? 4.0 : 2.0) * f(a + i * h);
  return s * h / 3.0;
}

// {s^2 + t^3 < 1, t > 0}: the U0 (alpha = 1) section in scaled variables x_1 = sqrt(2h) s, x_2 = (6h)^(1/3) t.
double scaled_area() { return simpson([](double t) { return 2.0 * std::sqrt(std::max(0.0, 1.0 - t * t * t)); }, 0.0, 1.0); }
double scaled_centroid() {
  return simpson([](double t) { return t * 2.0 * std::sqrt(std::max(0.0, 1.0 - t * t * t)); }, 0.0, 1.0) / scaled_area();
}

double log_slope(const std::vector<std::pair<double, double>>& pts) {
  double mx = 0, my = 0;
  for (auto [x, y] : pts) mx += std::log(x), my += std::log(y);
  mx /= static_cast<double>(pts.size());
  my /= static_cast<double>(pts.size());
  double sxy = 0, sxx = 0;
  for (auto [x, y] : pts) {
    sxy += (std::log(x) - mx) * (std::log(y) - my);
    sxx += (std::log(x) - mx) * (std::log(x) - mx);
  }
  return sxy / sxx;
}

}  // namespace

TEST_CASE("interior section of the quadratic is a ball") {
  const auto dom = ConvexDomain::ball(2, 1.0, Vec::Zero());
  const ScalarField u = sampled(dom, 1.0 / 64, quadratic);
  const Section s = compute_section(u, Vec::Zero(), Vec::Zero(), 0.02);
  CHECK(s.measure == doctest::Approx(std::numbers::pi * 0.04).epsilon(0.03));
  CHECK(s.center.norm() <= 1e-12);
  for (const Vec& x : s.nodes) CHECK(x.norm() < 0.2);

  const auto d3 = ConvexDomain::ball(3, 1.0, Vec::Zero());
  const Section s3 = compute_section(sampled(d3, 1.0 / 32, quadratic), Vec::Zero(), Vec::Zero(), 0.08);
  CHECK(s3.measure == doctest::Approx(4.0 / 3.0 * std::numbers::pi * std::pow(0.4, 3)).epsilon(0.03));
}

TEST_CASE("boundary section of U0") {
  const auto dom = ConvexDomain::half_ball(2, 1.0);
  const double hg = 1.0 / 128;
  const ClosedFormSolution u0{ClosedFormKind::u0, 1.0, 2};
  const ScalarField u = sampled(dom, hg, u0.function());
  const double h = 0.01;
  const Section s = compute_section(u, Vec::Zero(), Vec::Zero(), h);
  for (const Vec& x : s.nodes) CHECK(x[0] * x[0] + x[1] * x[1] * x[1] <= 6 * h);
  const double area = std::sqrt(2 * h) * std::cbrt(6 * h) * scaled_area();
  CHECK(s.measure == doctest::Approx(area).epsilon(0.02));
  CHECK(s.d_h == doctest::Approx(std::cbrt(6 * h) * scaled_centroid()).epsilon(0.02));
  CHECK(std::abs(s.center[0]) <= 1e-12);
  CHECK(kind_of([&] { (void)compute_section(u, Vec::Zero(), Vec::Zero(), hg * hg / 100); }) == ErrorKind::too_small);
  CHECK(kind_of([&] { (void)compute_section(u, Vec::Zero(), Vec::Zero(), 0.0); }) == ErrorKind::input);
  CHECK(kind_of([&] { (void)compute_section(u, v2(0, -0.5), Vec::Zero(), 0.1); }) == ErrorKind::domain);
}

TEST_CASE("sliding map") {
  Section s;
  s.dimension = 2;
  s.center = v2(0.2, 0.1);
  s.d_h = 0.1;
  s.mass_points = {s.center};
  s.mass_weights = {1.0};
  const SlidingMap m = sliding_from_center(s);
  CHECK(m.tau[0] == doctest::Approx(2.0));
  CHECK(m.tau[1] == 0.0);
  const Vec c = mapped_center(s, m);
  CHECK(std::abs(c[0]) <= 1e-15);
  CHECK(c[1] == doctest::Approx(0.1));
  CHECK((m.inverse(m.apply(v2(0.3, 0.7))) - v2(0.3, 0.7)).norm() <= 1e-12);
  CHECK(m.apply(v2(0.3, 0.0)) == v2(0.3, 0.0));

  s.center = v2(0.0, 0.3);
  s.d_h = 0.3;
  CHECK(sliding_from_center(s).tau.norm() == 0.0);
  s.d_h = 0.0;
  CHECK(kind_of([&] { (void)sliding_from_center(s); }) == ErrorKind::degenerate_section);
}

TEST_CASE("slanted section is recentred by its sliding") {
  const auto dom = ConvexDomain::box(2, v2(-1, 0), v2(1, 1));
  const double hg = 1.0 / 128;
  const auto u = [](const Vec& x) { return 0.5 * ((x[0] - 0.5 * x[1]) * (x[0] - 0.5 * x[1]) + x[1] * x[1]); };
  const ScalarField f = sampled(dom, hg, u);
  const Section s = compute_section(f, Vec::Zero(), Vec::Zero(), 0.05);
  const SlidingMap m = sliding_from_center(s);
  CHECK(m.tau[0] == doctest::Approx(0.5).epsilon(0.02));
  CHECK(std::abs(mapped_center(s, m)[0]) <= hg);
}

TEST_CASE("inscribed ellipses of polygons") {
  const auto square = convex_hull({Point2(-1, -1), Point2(1, -1), Point2(1, 1), Point2(-1, 1), Point2(0, 0)});
  REQUIRE(square.size() == 4);
  Eigen::Vector2d ax;
  Eigen::Matrix2d rot;
  const Ellipse disk = max_inscribed_ellipse(square);
  disk.axes(ax, rot);
  CHECK(ax[0] == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(ax[1] == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(disk.center.norm() <= 1e-6);

  const auto rect = convex_hull({Point2(-2, -1), Point2(2, -1), Point2(2, 1), Point2(-2, 1)});
  const Ellipse e = max_inscribed_ellipse(rect);
  e.axes(ax, rot);
  // brute force over centred ellipses with semiaxes (a, b) at angle th, support function inside the box
  double best = 0.0;
  for (int k = 0; k < 180; ++k) {
    const double th = std::numbers::pi * k / 180;
    const double c = std::cos(th), s = std::sin(th);
    for (int i = 1; i <= 400; ++i) {
      const double a = 2.0 * i / 400;
      // largest b with sqrt(a^2 c^2 + b^2 s^2) <= 2 and sqrt(a^2 s^2 + b^2 c^2) <= 1
      double b = std::numeric_limits<double>::infinity();
      if (s != 0) b = std::min(b, std::sqrt(std::max(0.0, 4 - a * a * c * c)) / std::abs(s));
      if (c != 0) b = std::min(b, std::sqrt(std::max(0.0, 1 - a * a * s * s)) / std::abs(c));
      best = std::max(best, a * b);
    }
  }
  CHECK(ax[0] * ax[1] == doctest::Approx(best).epsilon(1e-3));
  CHECK(ax[0] == doctest::Approx(1.0).epsilon(1e-5));
  CHECK(ax[1] == doctest::Approx(2.0).epsilon(1e-5));
  CHECK(std::abs(rot(0, 1)) == doctest::Approx(1.0).epsilon(1e-6));

  // a skewed quadrilateral: John containment with factor 2 and near-optimality against random perturbation
  const auto quad = convex_hull({Point2(0, 0), Point2(3, 0.5), Point2(2.5, 2), Point2(-0.5, 1.2)});
  const Ellipse q = max_inscribed_ellipse(quad);
  for (const auto& p : quad) CHECK(q.gauge(p) <= 2.0);
  CHECK(kind_of([&] { (void)max_inscribed_ellipse({Point2(0, 0), Point2(1, 0)}); }) == ErrorKind::empty_slice);
}

TEST_CASE("slices of sections") {
  const auto d3 = ConvexDomain::ball(3, 1.0, Vec::Zero());
  const double hg = 1.0 / 32;
  const Section s3 = compute_section(sampled(d3, hg, quadratic), Vec::Zero(), Vec::Zero(), 0.08);
  const SliceAxes a3 = slice_john_axes(s3, 0.0);
  REQUIRE(a3.semiaxes.size() == 2);
  CHECK(a3.semiaxes[0] <= a3.semiaxes[1]);
  CHECK(a3.semiaxes[0] == doctest::Approx(0.4).epsilon(0.03));
  CHECK(a3.semiaxes[1] == doctest::Approx(0.4).epsilon(0.03));
  CHECK(a3.containment <= 2.0);

  const auto d2 = ConvexDomain::ball(2, 1.0, Vec::Zero());
  const Section s2 = compute_section(sampled(d2, 1.0 / 64, quadratic), Vec::Zero(), Vec::Zero(), 0.02);
  const SliceAxes a2 = slice_john_axes(s2, 0.05);
  REQUIRE(a2.semiaxes.size() == 1);
  CHECK(a2.semiaxes[0] == doctest::Approx(std::sqrt(0.04 - 0.0025)).epsilon(1e-3));
  CHECK(kind_of([&] { (void)slice_john_axes(s2, 0.5); }) == ErrorKind::empty_slice);

  // square slice of a 3D section: u = max(|x_1|, |x_2|) + x_3^2 on a box
  const auto box = ConvexDomain::box(3, Vec(-1, -1, -1), Vec(1, 1, 1));
  const auto sq = [](const Vec& x) { return std::max(std::abs(x[0]), std::abs(x[1])) + x[2] * x[2]; };
  const Section ss = compute_section(sampled(box, 1.0 / 16, sq), Vec::Zero(), Vec::Zero(), 0.5);
  const SliceAxes as = slice_john_axes(ss, 0.0);
  CHECK(as.semiaxes[0] == doctest::Approx(0.5).epsilon(1e-6));
  CHECK(as.semiaxes[1] == doctest::Approx(0.5).epsilon(1e-6));
}

TEST_CASE("closure relation") {
  CHECK(dn_from_axes({0.1}, 1e-2, 1.0) == doctest::Approx(std::cbrt(1e-2)).epsilon(1e-12));
  CHECK(dn_from_axes({0.1}, 1e-2, 1.0) == doctest::Approx(0.21544).epsilon(1e-4));
  const double h = 0.003;
  CHECK(dn_from_axes({std::sqrt(h), std::sqrt(h)}, h, 0.5) == doctest::Approx(std::pow(h, 1 / 2.5)).epsilon(1e-12));
  CHECK(dn_from_axes({0.2, 0.2}, 0.04, 0.0) == doctest::Approx(0.2).epsilon(1e-12));
  CHECK(kind_of([] { (void)dn_from_axes({0.0}, 0.1, 1.0); }) == ErrorKind::input);
}

TEST_CASE("normalization of U0 sections matches the quadrature oracle") {
  const auto dom = ConvexDomain::half_ball(2, 1.0);
  const ClosedFormSolution u0{ClosedFormKind::u0, 1.0, 2};
  const ScalarField u = sampled(dom, 1.0 / 128, u0.function());
  const double exact = 12.0 * scaled_area() * scaled_area() * scaled_centroid();
  for (double h : {0.04, 0.02, 0.01}) {
    const NormalizationRecord r = normalize_section(u, Vec::Zero(), h, 1.0);
    CHECK(r.volume_ratio == doctest::Approx(exact).epsilon(0.05));
    CHECK(std::abs(r.tau[0]) <= 1e-10);
    double closure = std::pow(r.d_n, 3.0);
    for (double d : r.axes) closure *= d * d;
    CHECK(closure == doctest::Approx(h * h).epsilon(1e-10));
    // half-width of the slice at the centroid height, from the closed form
    CHECK(r.axes[0] == doctest::Approx(std::sqrt(2 * (h - std::pow(r.d_h, 3) / 6))).epsilon(0.02));
  }
}

TEST_CASE("normalization of an interior quadratic section") {
  const auto dom = ConvexDomain::ball(2, 1.0, v2(0, 1));
  const ScalarField u = sampled(dom, 1.0 / 128, quadratic);
  const Vec x0 = v2(0, 1);
  const double h = 0.02;
  const NormalizationRecord r = normalize_section(u, x0, h, 0.0, x0);
  CHECK(r.axes[0] == doctest::Approx(std::sqrt(2 * h)).epsilon(0.01));
  CHECK(r.d_n == doctest::Approx(std::sqrt(h / 2)).epsilon(0.01));
  CHECK(r.volume_ratio == doctest::Approx(4 * std::numbers::pi * std::numbers::pi).epsilon(0.03));

  const auto centred = ConvexDomain::ball(2, 1.0, Vec::Zero());
  const ScalarField v = sampled(centred, 1.0 / 64, quadratic);
  CHECK(kind_of([&] { (void)normalize_section(v, Vec::Zero(), 0.02, 0.0); }) == ErrorKind::degenerate_section);
}

TEST_CASE("scaling fit") {
  std::vector<NormalizationRecord> recs;
  for (double h : {1e-1, 1e-2, 1e-3, 1e-4}) {
    NormalizationRecord r;
    r.h = h;
    r.axes = {std::sqrt(h)};
    r.d_n = std::cbrt(h);
    r.d_h = 0.4 * std::cbrt(h);
    recs.push_back(r);
  }
  const ScalingFit fit = scaling_fit(recs);
  CHECK(fit.tangential_slope == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(fit.normal_slope == doctest::Approx(1.0 / 3).epsilon(1e-12));
  CHECK(fit.dh_slope == doctest::Approx(1.0 / 3).epsilon(1e-12));
  CHECK(fit.r2 == doctest::Approx(1.0));
  CHECK(kind_of([&] { (void)scaling_fit({recs[0], recs[1]}); }) == ErrorKind::insufficient_data);
  std::vector<NormalizationRecord> narrow = recs;
  for (auto& r : narrow) r.h = 0.1 + 0.1 * r.h;
  CHECK(kind_of([&] { (void)scaling_fit(narrow); }) == ErrorKind::insufficient_data);

  const auto ladder = h_ladder(0.25, 0.01);
  REQUIRE(ladder.size() == 5);
  CHECK(ladder.back() == doctest::Approx(0.015625));
}

TEST_CASE("supporting plane subtraction") {
  const auto dom = ConvexDomain::half_ball(2, 1.0);
  const double hg = 1.0 / 64;
  const ClosedFormSolution u0{ClosedFormKind::u0, 1.0, 2};
  const ScalarField tilted = sampled(dom, hg, [&](const Vec& x) { return u0.value(x) + 0.3 * x[1]; });
  const ScalarField flat = subtract_supporting_plane(tilted);
  for (std::size_t k = 0; k < flat.grid().size(); ++k) {
    if (flat.kind(k) == NodeKind::exterior) continue;
    const Vec x = flat.grid().point(k);
    CHECK(std::abs(flat.value(k) - u0.value(x)) <= hg * hg / 6 * x[1] + 1e-14);
  }
}

TEST_CASE("tangent cone profiles") {
  const auto dom = ConvexDomain::half_ball(2, 1.0);
  const double hg = 1.0 / 128;
  const ClosedFormSolution u0{ClosedFormKind::u0, 1.0, 2};
  const std::vector<Vec> dirs = {v2(1, 0), v2(-1, 0)};
  const std::vector<double> lambdas = {0.25, 0.125, 0.0625};
  const auto p0 = tangent_cone_profile(sampled(dom, hg, u0.function()), dirs, lambdas);
  for (double g : p0.gamma) CHECK(std::abs(g) <= 2e-3);

  const double c = 0.7;
  const auto cone = [c](const Vec& x) { return c * std::abs(x[0]) + x[1] * x[1]; };
  const auto pc = tangent_cone_profile(sampled(dom, hg, cone), dirs, lambdas);
  for (double g : pc.gamma) CHECK(g == doctest::Approx(c).epsilon(1e-10));
  CHECK(pc.estimates[0][0] == doctest::Approx(c + 0.25));

  CHECK(kind_of([&] { (void)tangent_cone_profile(sampled(dom, hg, cone), dirs, {0.1, hg}); }) == ErrorKind::resolution);
  CHECK(kind_of([&] { (void)tangent_cone_profile(sampled(dom, hg, cone), dirs, {0.1, 0.2}); }) == ErrorKind::input);
}

TEST_CASE("growth envelope") {
  const auto dom = ConvexDomain::half_ball(2, 1.0);
  const double hg = 1.0 / 64;
  const ClosedFormSolution u0{ClosedFormKind::u0, 1.0, 2};
  const ScalarField f = sampled(dom, hg, u0.function());
  const auto rep = growth_envelope(f, 0.5);
  // brute force over the same nodes with the closed form
  double best = 0.0;
  for (std::size_t k = 0; k < f.grid().size(); ++k) {
    if (f.kind(k) == NodeKind::exterior) continue;
    const Vec x = f.grid().point(k);
    if (x.norm() == 0.0 || x.norm() > 0.5) continue;
    best = std::max(best, u0.value(x) / std::pow(x.norm(), 4.0 / 3.0));
  }
  CHECK(rep.max_value == doctest::Approx(best).epsilon(1e-12));
  CHECK(rep.context.at("convexity_flag") == 1.0);

  const auto q = growth_envelope(sampled(dom, hg, quadratic), 0.5);
  CHECK(q.argmax.norm() == doctest::Approx(0.5).epsilon(0.05));

  const auto bumpy = [](const Vec& x) { return std::sin(8 * x[0]) + x[1]; };
  const auto nb = growth_envelope(sampled(dom, hg, bumpy), 0.5);
  CHECK(std::isfinite(nb.max_value));
  CHECK(nb.context.at("convexity_flag") == 0.0);
}

TEST_CASE("Pogorelov monitor") {
  const auto ball = ConvexDomain::ball(2, 1.0, Vec::Zero());
  const auto u = [](const Vec& x) { return 0.5 * (x.squaredNorm() - 1.0); };
  const ScalarField f = sampled(ball, 1.0 / 32, u);
  const Section s = compute_section(f, Vec::Zero(), Vec::Zero(), 0.5);
  const auto rep = pogorelov_monitor(f, s, Index3(1, 0, 0));
  CHECK(rep.max_value == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(rep.argmax.norm() == 0.0);

  const ScalarField lifted = sampled(ball, 1.0 / 32, [&](const Vec& x) { return u(x) + 0.6; });
  CHECK(kind_of([&] { (void)pogorelov_monitor(lifted, s, Index3(1, 0, 0)); }) == ErrorKind::precondition);

  // boundary sections of U0: the normalized monitor is flat in h
  const auto half = ConvexDomain::half_ball(2, 1.0);
  const ClosedFormSolution u0{ClosedFormKind::u0, 1.0, 2};
  const ScalarField g = sampled(half, 1.0 / 256, u0.function());
  std::vector<std::pair<double, double>> series;
  for (double h : {0.1, 0.05, 0.025, 0.0125, 0.00625}) {
    const auto r = pogorelov_monitor(g, compute_section(g, Vec::Zero(), Vec::Zero(), h), Index3(1, 0, 0));
    series.emplace_back(h, r.context.at("normalized"));
    CHECK(r.context.at("normalized") == doctest::Approx(2.0).epsilon(0.1));
  }
  CHECK(std::abs(log_slope(series)) <= 0.1);
}

TEST_CASE("normal derivative monitor on U0") {
  const auto dom = ConvexDomain::half_ball(2, 1.0);
  for (double a : {0.0, 0.5, 1.0, 2.0}) {
    const ClosedFormSolution u0{ClosedFormKind::u0, a, 2};
    const auto rep = normal_derivative_monitor(sampled(dom, 1.0 / 64, u0.function()), a);
    CHECK(rep.context.at("bound") == doctest::Approx(1.0 / (1.0 + a)));
    CHECK(rep.max_value == doctest::Approx(1.0 / (1.0 + a)).epsilon(0.01));
    CHECK(rep.context.at("nodes") > 100);
  }
}
