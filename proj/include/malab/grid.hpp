#pragma once

#include "malab/domain.hpp"

#include <Eigen/Core>

#include <array>
#include <cstddef>

namespace malab {

using Index3 = Eigen::Vector3i;

/// Uniform Cartesian grid whose node coordinates are integer multiples of the spacing, so the
/// origin is always a node. Index ranges are inclusive; unused axes have range [0, 0].
class Grid {
public:
  Grid(int dim, double spacing, const Index3& lo, const Index3& hi);

  /// Smallest grid of the given spacing whose box covers the domain's bounding box.
  static Grid covering(const ConvexDomain& domain, double spacing);
  static Grid covering(int dim, double spacing, const Box& box);

  [[nodiscard]] int dimension() const { return dim_; }
  [[nodiscard]] double spacing() const { return h_; }
  [[nodiscard]] const Index3& lo() const { return lo_; }
  [[nodiscard]] const Index3& hi() const { return hi_; }
  [[nodiscard]] int count(int axis) const { return hi_[axis] - lo_[axis] + 1; }
  [[nodiscard]] std::size_t size() const { return size_; }
  [[nodiscard]] Box bounds() const;

  [[nodiscard]] bool in_range(const Index3& m) const {
    for (int a = 0; a < 3; ++a)
      if (m[a] < lo_[a] || m[a] > hi_[a]) return false;
    return true;
  }
  [[nodiscard]] std::size_t linear(const Index3& m) const {
    return static_cast<std::size_t>(m[0] - lo_[0]) +
           stride_[1] * static_cast<std::size_t>(m[1] - lo_[1]) +
           stride_[2] * static_cast<std::size_t>(m[2] - lo_[2]);
  }
  [[nodiscard]] Index3 multi(std::size_t k) const {
    Index3 m;
    m[2] = static_cast<int>(k / stride_[2]) + lo_[2];
    k %= stride_[2];
    m[1] = static_cast<int>(k / stride_[1]) + lo_[1];
    m[0] = static_cast<int>(k % stride_[1]) + lo_[0];
    return m;
  }
  [[nodiscard]] Vec point(const Index3& m) const { return h_ * m.cast<double>(); }
  [[nodiscard]] Vec point(std::size_t k) const { return point(multi(k)); }

  /// Multi-index of the cell containing x (lower corner), clamped to the grid.
  [[nodiscard]] Index3 cell_of(const Vec& x) const;

  [[nodiscard]] bool operator==(const Grid& other) const {
    return dim_ == other.dim_ && h_ == other.h_ && lo_ == other.lo_ && hi_ == other.hi_;
  }

private:
  int dim_;
  double h_;
  Index3 lo_, hi_;
  std::array<std::size_t, 3> stride_{};
  std::size_t size_ = 0;
};

}  // namespace malab
