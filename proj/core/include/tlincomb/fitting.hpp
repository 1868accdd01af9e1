#pragma once

#include <cstddef>
#include <optional>
#include <string_view>

#include "tlincomb/lincomb.hpp"
#include "tlincomb/specfun.hpp"
#include "tlincomb/tdist.hpp"

// Approximating Z = sum sigma_i T_i by a single scaled t, sigma_z T(nu_z).

namespace tlincomb::fitting {

enum class FitMethod { AbsMoment, CfClosed, CfBisect, Moment4 };

/// "ABS_MOMENT", "CF_CLOSED", "CF_BISECT", "MOMENT4".
std::string_view to_string(FitMethod m);

/// Case-insensitive inverse of to_string; also accepts '-' for '_'.
std::optional<FitMethod> parse_method(std::string_view s);

struct BisectionTrace {
  double target = 0.0;  // CF_Z(r)
  double r_e = 0.0;     // r sqrt(E[Z^2])
  double lo = 0.0;
  double hi = 0.0;
  std::size_t iterations = 0;
  bool effectively_gaussian = false;  // target at or below g(nu_max)
};

struct FitReport {
  tdist::ScaledT fitted;
  FitMethod method;
  std::optional<double> r_used;
  std::size_t iterations = 0;
  std::optional<lincomb::SeriesDiag> series;
  std::optional<BisectionTrace> bisection;
};

/// (p1 nu + p2) / (nu + p3).
struct RationalApprox {
  double p1;
  double p2;
  double p3;

  double operator()(double nu) const { return (p1 * nu + p2) / (nu + p3); }
};

// Constants of the closed-form fits, exactly as used by fit_absmoment_k2
// and fit_cf_closed. The absolute-moment fit inverts
// h(nu) ~ (sqrt2 nu - 2 sqrt2) / (nu - sqrt(pi)).
namespace constants {
inline constexpr double kCfLimit = 0.607;   // large-nu value of g at rE = 1
inline constexpr double kCfNuA = 0.7606;    // -p2
inline constexpr double kCfNuB = 1.5466;    // -p3
inline constexpr double kCfSigmaA = 1.6775;
inline constexpr double kCfSigmaB = 3.4111;
}  // namespace constants

RationalApprox abs_moment_approx();  // h
RationalApprox cf_approx();          // g at rE = 1

/// Checks that the sigma constants of the CF closed form follow from the
/// nu constants (0.7606 / 0.4534 and 1.5466 / 0.4534, 0.4534 = 2 * 0.607 -
/// 0.7606 = 2 - 1.5466) to within tol. False if any relation is off.
bool cf_constants_consistent(double tol = 1e-3);

/// Largest |h_exact - abs_moment_approx()| over a dense grid on (lo, hi].
double h_approx_max_error(double lo, double hi);

/// Upper bound on h_approx_max_error(2, 50), measured once from h_exact.
inline constexpr double kHApproxErrorBound = 0.137;

/// Gamma((nu-1)/2) sqrt(nu-2) / Gamma(nu/2). Domain error for nu <= 2.
double h_exact(double nu);

/// CF of the unit-variance scaled t with nu dof evaluated at r_e:
/// a^(nu/2) K_{nu/2}(a) / (2^(nu/2-1) Gamma(nu/2)), a = r_e sqrt(nu-2).
double g_exact(double nu, double r_e);

enum class ApproxTarget { H, G };

/// Least-squares recalibration of the rational approximation of h (or g at
/// the given r_e) over 200 log-spaced nu in [lo, hi], lo > 2. p1 is pinned
/// to the large-nu limit and p2 to the nu -> 2 boundary value; the
/// remaining constant is fitted.
RationalApprox refit_rational(ApproxTarget target, double lo, double hi, double r_e = 1.0);

/// Closed-form fit from E[Z^2] and E|Z|. InfeasibleRatio when
/// sqrt(pi) m1abs / sqrt(m2) is outside (0, sqrt2) or nu_z <= 2 + 1e-6.
FitReport fit_absmoment_k2(double m2, double m1abs);

/// Absolute-moment fit of K terms, folding one term in per step.
FitReport fit_absmoment_iter(const lincomb::LinComb& zc, const specfun::Accuracy& acc = {});

/// CF closed form at r = E[Z^2]^(-1/2).
FitReport fit_cf_closed(const lincomb::LinComb& zc);

inline constexpr double kBisectNuMin = 2.0 + 1e-6;
inline constexpr double kBisectNuMax = 1e4;
inline constexpr double kBisectWidth = 1e-9;

/// Solves g(nu_z, r sqrt(E[Z^2])) = CF_Z(r) by bisection on
/// [kBisectNuMin, kBisectNuMax]. A target at or below g(kBisectNuMax) that
/// still lies above the Gaussian limit returns nu_max flagged
/// effectively_gaussian; anything else outside the bracket is NoSolution.
FitReport fit_cf_bisect(const lincomb::LinComb& zc, double r);

/// Second and fourth moment matching. Nonexistence if any nu_i <= 4,
/// InfeasibleKurtosis if the kurtosis is <= 3.
FitReport fit_moment4(const lincomb::LinComb& zc);

/// Runs the named method. r is only used by CfBisect, where it defaults to
/// E[Z^2]^(-1/2).
FitReport fit(const lincomb::LinComb& zc, FitMethod method, std::optional<double> r = {},
              const specfun::Accuracy& acc = {});

}  // namespace tlincomb::fitting
