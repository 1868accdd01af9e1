#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "tlincomb/errors.hpp"
#include "tlincomb/specfun.hpp"

// Gauss 2F1(a, b; c; z) for z <= 1.
//
// Negative arguments are mapped into [0, 1) with the Pfaff transformation,
// pulling out whichever of a, b is smaller so the remaining series has the
// faster algebraic decay. On [0, 1) the power series is summed directly,
// except within 0.05 of z = 1 where the 1 - z connection formula is used,
// provided c - a - b stays away from the integers (where it degenerates).
// For c - a - b a non-negative integer the logarithmic limit of the
// connection formula is used instead.

namespace tlincomb::specfun {

namespace {

constexpr double kConnectionWindow = 0.05;
constexpr double kMinIntegerGap = 0.05;

double distance_to_integer(double v) { return std::fabs(v - std::round(v)); }

bool is_nonpositive_integer(double v) { return v <= 0.0 && v == std::floor(v); }

// ln|Gamma(x)| and its sign, for x not a pole.
double log_abs_gamma(double x, int& sign) {
  if (x > 0.0) {
    sign = 1;
    return log_gamma(x);
  }
  const double s = std::sin(std::numbers::pi * x);
  sign = s > 0.0 ? 1 : -1;
  return std::log(std::numbers::pi) - std::log(std::fabs(s)) - log_gamma(1.0 - x);
}

// Gamma(n1) Gamma(n2) / (Gamma(d1) Gamma(d2)); zero when a denominator
// argument is a pole.
double gamma_ratio(double n1, double n2, double d1, double d2) {
  if (is_nonpositive_integer(d1) || is_nonpositive_integer(d2)) return 0.0;
  int s1 = 1, s2 = 1, s3 = 1, s4 = 1;
  const double lr = log_abs_gamma(n1, s1) + log_abs_gamma(n2, s2) -
                    log_abs_gamma(d1, s3) - log_abs_gamma(d2, s4);
  return s1 * s2 * s3 * s4 * std::exp(lr);
}

double power_series(double a, double b, double c, double x, const Accuracy& acc) {
  const double tol = std::min(acc.rel_tol, 1e-15);
  double sum = 1.0;
  double term = 1.0;
  for (std::size_t n = 0; n < acc.max_terms; ++n) {
    const double dn = static_cast<double>(n);
    term *= (a + dn) * (b + dn) / ((c + dn) * (dn + 1.0)) * x;
    sum += term;
    if (term == 0.0) return sum;
    // The term ratio tends to x; bound the remaining tail geometrically.
    const double next_ratio = std::fabs((a + dn + 1.0) * (b + dn + 1.0) /
                                        ((c + dn + 1.0) * (dn + 2.0)) * x);
    const double r = std::max(next_ratio, std::fabs(x));
    if (r < 1.0 && std::fabs(term) * r / (1.0 - r) <= tol * std::fabs(sum)) {
      return sum;
    }
  }
  fail(ErrorKind::NonConvergence,
       "gauss_2f1: power series did not converge within " +
           std::to_string(acc.max_terms) + " terms (z = " + std::to_string(x) + ")");
}

double connection(double a, double b, double c, double x, const Accuracy& acc) {
  const double y = 1.0 - x;
  const double s = c - a - b;
  const double a1 = gamma_ratio(c, s, c - a, c - b);
  const double a2 = gamma_ratio(c, -s, a, b);
  double result = 0.0;
  if (a1 != 0.0) result += a1 * power_series(a, b, 1.0 - s, y, acc);
  if (a2 != 0.0) {
    result += a2 * std::pow(y, s) * power_series(c - a, c - b, 1.0 + s, y, acc);
  }
  return result;
}

// c = a + b + m with m a non-negative integer, 0 < y = 1 - x small.
double connection_log(double a, double b, int m, double x, const Accuracy& acc) {
  const double y = 1.0 - x;
  const double c = a + b + m;
  double head = 0.0;
  if (m > 0) {
    double term = 1.0;
    for (int n = 0; n < m; ++n) {
      head += term;
      term *= (a + n) * (b + n) / ((n + 1.0) * (1.0 - m + n)) * y;
    }
    head *= std::exp(log_gamma(m) + log_gamma(c) - log_gamma(a + m) - log_gamma(b + m));
  }
  const double tol = std::min(acc.rel_tol, 1e-15);
  const double log_y = std::log(y);
  double psi_n1 = digamma(1.0);
  double psi_nm1 = digamma(m + 1.0);
  double psi_a = digamma(a + m);
  double psi_b = digamma(b + m);
  double coef = 1.0 / std::exp(log_gamma(m + 1.0));  // (a+m)_n (b+m)_n / (n! (n+m)!)
  double sum = 0.0;
  for (std::size_t n = 0; n < acc.max_terms; ++n) {
    const double term = coef * (log_y - psi_n1 - psi_nm1 + psi_a + psi_b);
    sum += term;
    if (n > 2 && std::fabs(term) <= tol * std::fabs(sum)) {
      const double scale = std::exp(log_gamma(c) - log_gamma(a) - log_gamma(b) + m * log_y);
      return head - (m % 2 == 0 ? 1.0 : -1.0) * scale * sum;
    }
    const double dn = static_cast<double>(n);
    coef *= (a + m + dn) * (b + m + dn) / ((dn + 1.0) * (dn + m + 1.0)) * y;
    psi_n1 += 1.0 / (dn + 1.0);
    psi_nm1 += 1.0 / (dn + m + 1.0);
    psi_a += 1.0 / (a + m + dn);
    psi_b += 1.0 / (b + m + dn);
  }
  fail(ErrorKind::NonConvergence, "gauss_2f1: logarithmic connection series did not converge");
}

double unit_interval(double a, double b, double c, double x, const Accuracy& acc) {
  if (1.0 - x < kConnectionWindow) {
    const double s = c - a - b;
    // terms fall off like n^-(s+1) even at x = 1, and the connection
    // coefficients overflow for large c
    if (s >= 7.5) return power_series(a, b, c, x, acc);
    const double gap = distance_to_integer(s);
    if (gap > kMinIntegerGap) return connection(a, b, c, x, acc);
    if (gap <= 1e-12 * std::max(1.0, std::fabs(s)) && s > -0.5 && a > 0.0 &&
        b > 0.0) {
      return connection_log(a, b, static_cast<int>(std::lround(s)), x, acc);
    }
    // Near-integer c - a - b: the connection coefficients nearly cancel, so
    // prefer the direct series whenever it fits in the term budget.
    const double needed = 40.0 / (1.0 - x);
    if (needed > 0.5 * static_cast<double>(acc.max_terms)) return connection(a, b, c, x, acc);
  }
  return power_series(a, b, c, x, acc);
}

}  // namespace

double digamma(double x) {
  if (!std::isfinite(x) || is_nonpositive_integer(x)) {
    fail(ErrorKind::Domain, "digamma is undefined at non-positive integers");
  }
  if (x < 0.0) {
    return digamma(1.0 - x) - std::numbers::pi / std::tan(std::numbers::pi * x);
  }
  double acc = 0.0;
  while (x < 12.0) {
    acc -= 1.0 / x;
    x += 1.0;
  }
  const double r = 1.0 / (x * x);
  const double series =
      r * (1.0 / 12 -
           r * (1.0 / 120 - r * (1.0 / 252 - r * (1.0 / 240 - r * (1.0 / 132 - r * 691.0 / 32760)))));
  return acc + std::log(x) - 0.5 / x - series;
}

Scaled gauss_2f1_scaled(double a, double b, double c, double z, const Accuracy& acc) {
  if (!std::isfinite(a) || !std::isfinite(b) || !std::isfinite(c) || !std::isfinite(z)) {
    fail(ErrorKind::Domain, "gauss_2f1 requires finite arguments");
  }
  if (!(c > 0.0)) fail(ErrorKind::Domain, "gauss_2f1 requires c > 0");
  if (z > 1.0) fail(ErrorKind::Domain, "gauss_2f1 requires z <= 1");
  if (z == 0.0) return {1.0, 0.0};
  if (z == 1.0) {
    if (!(c - a - b > 0.0)) {
      fail(ErrorKind::Domain, "gauss_2f1 diverges at z = 1 unless c - a - b > 0");
    }
    return {gamma_ratio(c, c - a - b, c - a, c - b), 0.0};
  }
  if (z < 0.0) {
    const double w = z / (z - 1.0);
    const double log_one_minus_z = std::log1p(-z);
    if (a <= b) {
      return {unit_interval(a, c - b, c, w, acc), -a * log_one_minus_z};
    }
    return {unit_interval(c - a, b, c, w, acc), -b * log_one_minus_z};
  }
  return {unit_interval(a, b, c, z, acc), 0.0};
}

double gauss_2f1(double a, double b, double c, double z, const Accuracy& acc) {
  const double v = gauss_2f1_scaled(a, b, c, z, acc).value();
  if (std::isinf(v)) fail(ErrorKind::Overflow, "gauss_2f1 overflows");
  return v;
}

}  // namespace tlincomb::specfun
