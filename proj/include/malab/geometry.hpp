#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>

#include <cmath>
#include <functional>

namespace malab {

// Points always carry three components; entries past the active dimension are zero and
// the normal coordinate x_n is component `dim - 1`.
using Vec = Eigen::Vector3d;
using Mat = Eigen::Matrix3d;

using PointFunction = std::function<double(const Vec&)>;

inline double normal_coord(const Vec& x, int dim) { return x[dim - 1]; }

inline Vec unit(int axis) {
  Vec e = Vec::Zero();
  e[axis] = 1.0;
  return e;
}

/// |x'|^2, the squared norm of the tangential components.
inline double tangential_norm2(const Vec& x, int dim) {
  double s = 0.0;
  for (int i = 0; i + 1 < dim; ++i) s += x[i] * x[i];
  return s;
}

/// Leading dim x dim block of a 3x3 matrix, as a dynamic matrix.
inline Eigen::MatrixXd active_block(const Mat& m, int dim) { return m.topLeftCorner(dim, dim); }

}  // namespace malab
