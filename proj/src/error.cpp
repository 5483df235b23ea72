#include "recip/error.hpp"

namespace recip {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::invalid_argument: return "invalid argument";
    case ErrorKind::degenerate_signal: return "degenerate signal";
    case ErrorKind::undersampled_phase: return "undersampled phase";
    case ErrorKind::non_uniform_grid: return "non-uniform grid";
    case ErrorKind::rank_deficient: return "rank-deficient fit";
    case ErrorKind::decay_check: return "decay check failed";
    case ErrorKind::aliasing: return "aliasing detected";
    case ErrorKind::non_convergence: return "non-convergence";
    case ErrorKind::incomplete_zero_set: return "incomplete zero set";
    case ErrorKind::not_cyclic: return "not cyclic";
    case ErrorKind::sign_ambiguous: return "sign-ambiguous";
    case ErrorKind::step_too_large: return "step size too large";
    case ErrorKind::numerical: return "numerical failure";
    case ErrorKind::io: return "i/o error";
  }
  return "unknown";
}

Error::Error(ErrorKind kind, const std::string& what)
    : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

void fail(ErrorKind kind, const std::string& what) { throw Error(kind, what); }

}  // namespace recip
