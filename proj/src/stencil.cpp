#include "malab/stencil.hpp"

#include "malab/error.hpp"

#include <algorithm>
#include <cstdlib>
#include <numeric>

namespace malab {

namespace {

int gcd3(const Index3& v) { return std::gcd(std::gcd(std::abs(v[0]), std::abs(v[1])), std::abs(v[2])); }

// Canonical sign: first nonzero component positive.
bool canonical(const Index3& v) {
  for (int a = 0; a < 3; ++a)
    if (v[a] != 0) return v[a] > 0;
  return false;
}

}  // namespace

DirectionSet make_directions(int dim, int width) {
  if (width < 1 || width > 3) throw Error(ErrorKind::input, "stencil width must be 1, 2 or 3");
  if (dim != 2 && dim != 3) throw Error(ErrorKind::input, "dimension must be 2 or 3");
  DirectionSet set;
  set.dimension = dim;
  set.width = width;

  // Axis directions first, then by increasing length, so frame 0 is the coordinate frame.
  std::vector<Index3> dirs;
  for (int a = 0; a < dim; ++a) dirs.push_back(Index3::Unit(a));
  const int kmax = dim == 3 ? width : 0;
  for (int i = -width; i <= width; ++i)
    for (int j = -width; j <= width; ++j)
      for (int k = -kmax; k <= kmax; ++k) {
        const Index3 v(i, j, k);
        if (!canonical(v) || gcd3(v) != 1 || v.cwiseAbs().sum() == 1) continue;
        dirs.push_back(v);
      }
  std::stable_sort(dirs.begin() + dim, dirs.end(),
                   [](const Index3& a, const Index3& b) { return a.squaredNorm() < b.squaredNorm(); });
  set.directions = dirs;

  const int m = static_cast<int>(dirs.size());
  auto orth = [&](int a, int b) { return dirs[a].dot(dirs[b]) == 0; };
  for (int a = 0; a < m; ++a)
    for (int b = a + 1; b < m; ++b) {
      if (!orth(a, b)) continue;
      if (dim == 2) {
        set.frames.push_back({a, b});
        continue;
      }
      for (int c = b + 1; c < m; ++c)
        if (orth(a, c) && orth(b, c)) set.frames.push_back({a, b, c});
    }
  if (set.frames.empty()) throw Error(ErrorKind::input, "no orthogonal frame for this stencil width");
  return set;
}

}  // namespace malab
