#pragma once

#include <cmath>
#include <cstddef>

// Real-valued special functions used by the distribution code. Everything
// here is pure and re-entrant.

namespace tlincomb::specfun {

/// Truncation control for series and continued fractions.
struct Accuracy {
  double rel_tol = 1e-12;
  std::size_t max_terms = 100000;

  /// Throws InvariantViolation unless rel_tol is in (0, 1e-6] and
  /// max_terms >= 100.
  void validate() const;
};

/// A real number stored as mantissa * exp(log_scale). Used where the value
/// itself would overflow or underflow a double but its logarithm is needed.
struct Scaled {
  double mantissa = 0.0;
  double log_scale = 0.0;

  double value() const { return mantissa * std::exp(log_scale); }
  /// Natural log of the value. Only meaningful for a positive mantissa.
  double log() const { return std::log(mantissa) + log_scale; }
};

double log_gamma(double x);

/// Gamma for any real x that is not a non-positive integer (sign included).
double gamma_signed(double x);

/// 1/Gamma(x), zero at the poles.
double recip_gamma(double x);

double log_beta(double a, double b);

/// psi(x) = Gamma'(x) / Gamma(x), x not a non-positive integer.
double digamma(double x);

/// Regularized incomplete beta I_x(a, b).
double reg_inc_beta(double x, double a, double b);

/// I_x(a, b) together with its complement 1 - I_x(a, b). The caller passes
/// y = 1 - x separately so that neither tail loses precision when x is
/// close to 0 or 1.
struct IncBetaPair {
  double value;
  double complement;
};
IncBetaPair reg_inc_beta_pair(double x, double y, double a, double b);

/// Modified Bessel function of the second kind K_order(x) for real order.
double bessel_k(double order, double x);

/// ln K_order(x); finite wherever K is positive, including where K itself
/// would overflow (x -> 0, large order) or underflow (large x).
double log_bessel_k(double order, double x);

/// Gauss hypergeometric function 2F1(a, b; c; z) for z <= 1.
double gauss_2f1(double a, double b, double c, double z,
                 const Accuracy& acc = {});

/// Same as gauss_2f1, with the Pfaff prefactor (1 - z)^(-a) kept in log
/// form so it can be combined with other large or small factors.
Scaled gauss_2f1_scaled(double a, double b, double c, double z,
                        const Accuracy& acc = {});

}  // namespace tlincomb::specfun
