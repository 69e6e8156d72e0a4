#pragma once

#include "malab/geometry.hpp"
#include "malab/monitor.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace malab {

/// Value, gradient and Hessian of a smooth function given in closed form.
struct SmoothFunction {
  int dimension = 2;
  std::function<double(const Vec&)> value;
  std::function<Vec(const Vec&)> gradient;
  std::function<Mat(const Vec&)> hessian;
};

enum class ClosedFormKind { u0, nonuniqueness };

/// Exact solutions of det D^2 u = x_n^alpha with trace |x'|^2 / 2:
///   u0             |x'|^2/2 + x_n^(2+a) / ((1+a)(2+a))
///   nonuniqueness  x_1^2/(2(1+x_n)) + (x_2^2+...)/2 + x_n^(2+a)/((1+a)(2+a)) + x_n^(3+a)/((2+a)(3+a))
/// All evaluators throw ErrorKind::domain for x_n < 0.
struct ClosedFormSolution {
  ClosedFormKind kind = ClosedFormKind::u0;
  double alpha = 1.0;
  int dimension = 2;

  [[nodiscard]] double value(const Vec& x) const;
  [[nodiscard]] Vec gradient(const Vec& x) const;
  [[nodiscard]] Mat hessian(const Vec& x) const;
  [[nodiscard]] SmoothFunction smooth() const;
  [[nodiscard]] PointFunction function() const;
};

double u0_value(const Vec& x, int dim, double alpha);

/// Uniform samples of [-extent, extent]^(n-1) x (0, height].
std::vector<Vec> half_space_samples(int dim, int count, std::uint64_t seed, double extent = 1.0, double height = 1.0);

/// max |det D^2 u - x_n^alpha| over the samples; context: trace_deviation (max |u(x',0) - |x'|^2/2|),
/// samples, pass (1 when both are within 1e-10 and 1e-12).
MonitorReport verify_ma_identity(const ClosedFormSolution& sol, const std::vector<Vec>& samples);

/// w(r, y) = r^2 g(y r^(-3/2)) with g(t) = (1 - t^gamma)^+ and its derivatives from the
/// closed-form expressions in t.
struct WbarDerivatives {
  double t = 0, g = 0, value = 0;
  double w_r = 0, w_y = 0, w_rr = 0, w_ry = 0, w_yy = 0;
  [[nodiscard]] double det() const { return w_rr * w_yy - w_ry * w_ry; }
};
WbarDerivatives wbar_derivatives(double r, double y, double gamma);

/// Constant c0 in det D^2_{r,y} w >= c0 r^(-1) t^(2 gamma - 2) on {t < 1}.
double wbar_det_constant(double gamma);

enum class BarrierKind { w1, w2, w3, V };
std::string to_string(BarrierKind kind);
BarrierKind barrier_from_string(const std::string& name);

/// Barrier functions used to trap solutions near the boundary.
///   w1  c' w(|x'|, C' x_n)
///   w2  c' h (|x'|^2/h + x_n^2/h^(3/2)) + t x_n
///   w3  c h (sum (x_i/d_i)^2 + (x_n/d_h)^2) + t x_n
///   V   (1+eps)/2 |x'|^2 + (1+eps)^(1-n) x_n^(2+a)/((2+a)(1+a)) - eps x_n
struct BarrierSpec {
  BarrierKind kind = BarrierKind::w1;
  int dimension = 2;
  double alpha = 1.0;
  double c_prime = 0.1, C_prime = 1.0, gamma = 0.1;  // w1, w2
  double h = 1e-2, t = 0.0;                          // w2, w3
  double c = 0.05;                                   // w3
  std::vector<double> d;                             // w3: d_1..d_{n-1}
  double d_h = 0.0;                                  // w3
  double epsilon = 0.01;                             // V

  static BarrierSpec w1(int dim, double gamma);
  static BarrierSpec w2(int dim, double c_prime, double h, double t);
  static BarrierSpec w3(int dim, double c, std::vector<double> d, double d_h, double h, double t);
  static BarrierSpec v(int dim, double alpha, double epsilon);

  [[nodiscard]] double value(const Vec& x) const;
  [[nodiscard]] Mat hessian(const Vec& x) const;
  [[nodiscard]] double det_hessian(const Vec& x) const;
};

/// Parameters of the region a barrier is checked on.
struct BarrierRegion {
  double rho_prime = 0.1;  // det D^2 u <= x_n^alpha / rho' (w2, w3) or <= 1 / rho' (w1)
  double radius = 2.0;     // w1: samples of {w1 > 0} in B_radius
  double box = 1.0;        // w2: |x'| <= box h^(1/2), x_n <= box h^(3/4); w3: sum (x_i/d_i)^2 <= box, x_n <= box d_h
  double mu = 1.0;         // w2, w3: boundary data bounded below by mu |x'|^2
  double curvature = 1.0;  // w2: boundary points satisfy x_n <= curvature |x'|^2
  int samples = 10000;
  std::uint64_t seed = 1;
};

/// Checks the barrier's sub/supersolution inequalities by dense sampling of exact Hessians.
/// max_value is the smallest margin (positive means the inequality holds everywhere); argmax is the
/// worst sample. Context keys depend on the kind and include "pass" and "samples".
MonitorReport verify_barrier(const BarrierSpec& spec, const BarrierRegion& region);

/// Doubles C' from 1 until the w1 determinant margin is positive on the region; returns the tuned spec.
BarrierSpec tune_w1(BarrierSpec spec, const BarrierRegion& region, int max_doublings = 60);

}  // namespace malab
