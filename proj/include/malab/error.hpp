#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace malab {

/// Signals raised by the library. Each operation documents which kinds it can raise.
enum class ErrorKind {
  domain,               // point outside the domain / argument outside validity region
  resolution,           // grid too coarse for the requested geometry
  near_boundary,        // stencil leaves the domain
  input,                // malformed right-hand side or parameters
  too_small,            // section below grid resolution
  degenerate_section,   // d_h <= 0 or disconnected section
  empty_slice,          // slice with too few samples
  insufficient_data,    // not enough records for a fit
  precondition,         // caller violated a documented precondition
  multivalued,          // partial Legendre transform not single valued
  monotonicity,         // level-set graph probed on a non-monotone line
  configuration,        // experiment configuration inconsistent
  usage,                // malformed user input (CLI / JSON)
};

std::string_view to_string(ErrorKind kind);

class Error : public std::runtime_error {
public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  [[nodiscard]] ErrorKind kind() const noexcept { return kind_; }

private:
  ErrorKind kind_;
};

}  // namespace malab
