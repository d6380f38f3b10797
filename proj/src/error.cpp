#include "gffi/error.hpp"

namespace gffi {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidArgument: return "invalid_argument";
    case ErrorKind::WallViolation: return "wall_violation";
    case ErrorKind::InconsistentConfiguration: return "inconsistent_configuration";
    case ErrorKind::NonConvergence: return "non_convergence";
    case ErrorKind::OutOfDomain: return "out_of_domain";
    case ErrorKind::InvalidPattern: return "invalid_pattern";
    case ErrorKind::Io: return "io";
    case ErrorKind::Schema: return "schema";
  }
  return "unknown";
}

}  // namespace gffi
