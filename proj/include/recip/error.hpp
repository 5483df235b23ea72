#pragma once

#include <stdexcept>
#include <string>

namespace recip {

enum class ErrorKind {
  invalid_argument,
  degenerate_signal,
  undersampled_phase,
  non_uniform_grid,
  rank_deficient,
  decay_check,
  aliasing,
  non_convergence,
  incomplete_zero_set,
  not_cyclic,
  sign_ambiguous,
  step_too_large,
  numerical,
  io,
};

const char* to_string(ErrorKind kind);

// Single exception type for the library; callers dispatch on kind().
class Error : public std::runtime_error {
public:
  Error(ErrorKind kind, const std::string& what);
  ErrorKind kind() const noexcept { return kind_; }

private:
  ErrorKind kind_;
};

[[noreturn]] void fail(ErrorKind kind, const std::string& what);

inline void require(bool condition, ErrorKind kind, const std::string& what) {
  if (!condition) fail(kind, what);
}

}  // namespace recip
