#include "nlslab/error.hpp"

namespace nlslab {

std::string_view to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::structural: return "structural";
    case ErrorKind::usage: return "usage";
    case ErrorKind::solver: return "solver";
    case ErrorKind::accuracy: return "accuracy";
    case ErrorKind::spectral: return "spectral";
    case ErrorKind::nonsimple_spectrum: return "nonsimple-spectrum";
    case ErrorKind::resolvent: return "resolvent";
    case ErrorKind::domain: return "domain";
    case ErrorKind::precondition: return "precondition";
    case ErrorKind::resolution: return "resolution";
    case ErrorKind::fit: return "fit";
    case ErrorKind::degenerate_input: return "degenerate-input";
    case ErrorKind::insufficient_data: return "insufficient-data";
    case ErrorKind::cutoff_unresolved: return "cutoff-unresolved";
    case ErrorKind::preparation: return "preparation";
    case ErrorKind::io: return "io";
  }
  return "unknown";
}

}  // namespace nlslab
