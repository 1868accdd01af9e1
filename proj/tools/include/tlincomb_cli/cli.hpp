#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "tlincomb/fitting.hpp"
#include "tlincomb/lincomb.hpp"

namespace tlincomb::cli {

enum ExitCode : int {
  kOk = 0,
  kSelftestFailed = 1,
  kInvalidInput = 2,
  kInfeasible = 3,
  kIoError = 4,
};

/// Parses "s1:n1,s2:n2,...". Throws std::invalid_argument with a short
/// reason; term values are validated by LinComb afterwards.
std::vector<lincomb::TTerm> parse_terms(std::string_view text);

/// "start:step:stop" (inclusive, tolerant to rounding) or
/// "logspace:a:b:count" (count points from 10^a to 10^b).
std::vector<double> parse_grid(std::string_view text);

/// Comma-separated list of reals.
std::vector<double> parse_list(std::string_view text);

struct SelftestResult {
  std::string name;
  bool passed;
  std::string detail;
};

/// The fast invariant subset; each entry is one named check.
std::vector<SelftestResult> run_selftest();

/// Entry point shared by the executable and the tests.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace tlincomb::cli
