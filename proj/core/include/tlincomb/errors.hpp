#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace tlincomb {

enum class ErrorKind {
  Domain,              // argument outside the mathematical domain
  Overflow,            // result not representable as a double
  NonConvergence,      // series or continued fraction hit its term cap
  Nonexistence,        // requested moment does not exist (order >= nu)
  InvariantViolation,  // a domain type was built from invalid parameters
  Unsupported,         // valid request the library does not implement
  InfeasibleRatio,     // absolute-moment ratio outside the range of h
  InfeasibleCf,        // CF value outside the range of the closed form
  InfeasibleKurtosis,  // kurtosis too small for any scaled t
  NoSolution,          // bisection target outside the bracket
  DegenerateRange,     // histogram over samples that are all equal
};

std::string_view to_string(ErrorKind kind);

/// True for the fitting failures that mean "this input has no fit", as
/// opposed to bad input or a numerical breakdown.
bool is_infeasible(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) {
  throw Error(kind, what);
}

}  // namespace tlincomb
