#include "margsdp/error.hpp"

namespace margsdp {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidInput: return "invalid input";
    case ErrorKind::InvalidConfig: return "invalid config";
    case ErrorKind::InvalidState: return "invalid state";
    case ErrorKind::Numerical: return "numerical error";
    case ErrorKind::BrokenSymmetry: return "broken symmetry";
    case ErrorKind::Divergence: return "divergence";
    case ErrorKind::Checkpoint: return "checkpoint error";
  }
  return "error";
}

}  // namespace margsdp
