#include "malab/grid.hpp"

#include "malab/error.hpp"

#include <algorithm>
#include <cmath>

namespace malab {

Grid::Grid(int dim, double spacing, const Index3& lo, const Index3& hi)
    : dim_(dim), h_(spacing), lo_(lo), hi_(hi) {
  if (dim != 2 && dim != 3) throw Error(ErrorKind::input, "grid dimension must be 2 or 3");
  if (!(spacing > 0) || !std::isfinite(spacing)) throw Error(ErrorKind::input, "grid spacing must be positive");
  for (int a = dim; a < 3; ++a) lo_[a] = hi_[a] = 0;
  for (int a = 0; a < dim; ++a)
    if (count(a) < 8) throw Error(ErrorKind::resolution, "grid needs at least 8 nodes per axis");
  stride_[0] = 1;
  stride_[1] = static_cast<std::size_t>(count(0));
  stride_[2] = stride_[1] * static_cast<std::size_t>(count(1));
  size_ = stride_[2] * static_cast<std::size_t>(count(2));
}

Grid Grid::covering(const ConvexDomain& domain, double spacing) {
  if (!domain.bounded()) throw Error(ErrorKind::domain, "cannot cover an unbounded domain with a grid");
  return covering(domain.dimension(), spacing, domain.bounding_box());
}

Grid Grid::covering(int dim, double spacing, const Box& box) {
  if (!(spacing > 0)) throw Error(ErrorKind::input, "grid spacing must be positive");
  Index3 lo = Index3::Zero(), hi = Index3::Zero();
  for (int a = 0; a < dim; ++a) {
    // Snap bounds that sit on a node up to rounding noise.
    const double l = box.lower[a] / spacing, u = box.upper[a] / spacing;
    lo[a] = static_cast<int>(std::floor(l + 1e-9));
    hi[a] = static_cast<int>(std::ceil(u - 1e-9));
  }
  return Grid(dim, spacing, lo, hi);
}

Box Grid::bounds() const {
  Box b;
  for (int a = 0; a < 3; ++a) {
    b.lower[a] = h_ * lo_[a];
    b.upper[a] = h_ * hi_[a];
  }
  return b;
}

Index3 Grid::cell_of(const Vec& x) const {
  Index3 m = Index3::Zero();
  for (int a = 0; a < dim_; ++a) {
    const int c = static_cast<int>(std::floor(x[a] / h_));
    m[a] = std::clamp(c, lo_[a], hi_[a] - 1);
  }
  return m;
}

}  // namespace malab
