#pragma once

#include "malab/grid.hpp"

#include <vector>

namespace malab {

/// Integer stencil directions and the orthogonal frames built from them.
struct DirectionSet {
  int dimension = 2;
  int width = 1;
  /// Primitive integer vectors with max |component| <= width, one representative per +/- pair.
  std::vector<Index3> directions;
  /// Each frame lists `dimension` mutually orthogonal entries of `directions` by position.
  std::vector<std::vector<int>> frames;
};

/// Enumerates directions and frames once; throws ErrorKind::input for widths outside {1,2,3}.
DirectionSet make_directions(int dim, int width);

}  // namespace malab
