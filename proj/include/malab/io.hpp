#pragma once

#include "malab/field.hpp"
#include "malab/solver.hpp"

#include "json.hpp"

#include <filesystem>
#include <iosfwd>
#include <string>

namespace malab {

using Json = nlohmann::json;

/// Shortest round-trip text for doubles: 17 significant digits.
std::string fmt17(double v);

/// Writes through a temporary sibling and renames it into place.
void write_file_atomic(const std::filesystem::path& path, const std::string& contents);
std::string read_file(const std::filesystem::path& path);

/// Columns i,j[,k],x1,x2[,x3],value; exterior nodes are skipped.
void write_field_csv(std::ostream& out, const ScalarField& field);
std::string field_csv(const ScalarField& field);
/// Reads values written by write_field_csv onto a field with the given domain, grid and trace.
ScalarField read_field_csv(std::istream& in, const ConvexDomain& domain, const Grid& grid, const PointFunction& trace);

/// Flat little-endian binary: magic, dimension, spacing, index bounds, then one double per node.
void write_field_binary(std::ostream& out, const ScalarField& field);
ScalarField read_field_binary(std::istream& in, const ConvexDomain& domain, const PointFunction& trace);

/// {dimension, shape, params, [marked_point, rho]}; throws ErrorKind::usage on malformed input.
ConvexDomain domain_from_json(const Json& j);
/// {spacing, [bounds: {lower, upper}]}; without bounds the grid covers the domain.
Grid grid_from_json(const Json& j, const ConvexDomain& domain);

/// {stencil_width, max_iters, tol_residual, damping, sweep_order, method}; missing keys keep the defaults.
SolverConfig solver_config_from_json(const Json& j);

/// {mode: "degenerate" | "explicit" | "zero", alpha, g}. `g` is a number or a polynomial (see
/// polynomial_from_json); explicit mode takes the polynomial under "f".
RhsSpec rhs_from_json(const Json& j);

/// {kind: "quadratic" | "u0_trace" | "zero" | "expression", alpha, terms}. quadratic is |x|^2/2,
/// u0_trace is U0 with x_n clamped at 0.
PointFunction boundary_from_json(const Json& j, int dimension);

/// Polynomial sum c x1^p1 x2^p2 x3^p3 from [{"c": .., "p": [p1, p2, p3]}, ...] (real exponents allowed).
PointFunction polynomial_from_json(const Json& terms);

/// Parses JSON text, turning parse failures into ErrorKind::usage with position context.
Json parse_json(const std::string& text, const std::string& origin);

}  // namespace malab
