#include "malab/error.hpp"

namespace malab {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::domain: return "domain";
    case ErrorKind::resolution: return "resolution";
    case ErrorKind::near_boundary: return "near-boundary";
    case ErrorKind::input: return "input";
    case ErrorKind::too_small: return "too-small";
    case ErrorKind::degenerate_section: return "degenerate-section";
    case ErrorKind::empty_slice: return "empty-slice";
    case ErrorKind::insufficient_data: return "insufficient-data";
    case ErrorKind::precondition: return "precondition";
    case ErrorKind::multivalued: return "multivalued";
    case ErrorKind::monotonicity: return "monotonicity";
    case ErrorKind::configuration: return "configuration";
    case ErrorKind::usage: return "usage";
  }
  return "unknown";
}

}  // namespace malab
