#include "tlincomb/lincomb.hpp"

#include <cmath>
#include <numbers>
#include <string>
#include <utility>

#include "tlincomb/errors.hpp"

namespace tlincomb::lincomb {

namespace {

using specfun::log_beta;
using specfun::log_gamma;

constexpr double kLogPi = 1.1447298858494002;  // ln(pi)
constexpr std::size_t kMinSeriesTerms = 5;

void require_finite_variance(const TTerm& t, const char* what) {
  if (!(t.nu > 2.0)) {
    fail(ErrorKind::InvariantViolation,
         std::string(what) + ": nu must exceed 2, got " + std::to_string(t.nu));
  }
}

double log_alpha(double nu) {
  return log_gamma(0.5 * (nu + 1.0)) - log_gamma(0.5 * nu) - 0.5 * (std::log(nu) + kLogPi);
}

// Summand generator for sum_i Gamma(i+1/2)/i! * F_i / ((nu1+2i)(nu1+nu2+2i-1)),
// F_i = 2F1((nu2+1)/2, (nu1+nu2+2i-1)/2; (nu1+nu2+2i+1)/2; -omega2).
// Every F_i shares the Pfaff prefactor, which is returned separately as a log.
class SeriesTerms {
 public:
  SeriesTerms(double nu1, double nu2, double omega2, const specfun::Accuracy& acc)
      : nu1_(nu1), nu2_(nu2), omega2_(omega2), acc_(acc) {
    if (omega2_ != 0.0) {
      const auto f0 = hyp(0);
      log_scale_ = f0.log_scale;
    }
  }

  double log_scale() const { return log_scale_; }

  // Term i; must be called with i = 0, 1, 2, ... in order.
  double next() {
    double f = 1.0;
    if (omega2_ != 0.0) {
      const auto fi = hyp(index_);
      f = fi.mantissa * std::exp(fi.log_scale - log_scale_);
    }
    const double i = static_cast<double>(index_);
    const double term = gamma_ratio_ * f / ((nu1_ + 2.0 * i) * (nu1_ + nu2_ + 2.0 * i - 1.0));
    gamma_ratio_ *= (i + 0.5) / (i + 1.0);
    ++index_;
    return term;
  }

 private:
  specfun::Scaled hyp(std::size_t i) const {
    const double b = 0.5 * (nu1_ + nu2_ + 2.0 * static_cast<double>(i) - 1.0);
    return specfun::gauss_2f1_scaled(0.5 * (nu2_ + 1.0), b, b + 1.0, -omega2_, acc_);
  }

  double nu1_;
  double nu2_;
  double omega2_;
  specfun::Accuracy acc_;
  double log_scale_ = 0.0;
  double gamma_ratio_ = std::sqrt(std::numbers::pi);  // Gamma(i + 1/2) / i!
  std::size_t index_ = 0;
};

double omega2_of(const TTerm& t1, const TTerm& t2) {
  return t2.nu * t2.sigma * t2.sigma / (t1.nu * t1.sigma * t1.sigma) - 1.0;
}

}  // namespace

TTerm TTerm::make(double sigma, double nu) {
  tdist::ScaledT check(sigma, nu);  // validates
  return TTerm{sigma, nu};
}

LinComb::LinComb(std::vector<TTerm> terms) : terms_(std::move(terms)) {
  if (terms_.empty()) {
    fail(ErrorKind::InvariantViolation, "a linear combination needs at least one term");
  }
  for (const auto& t : terms_) TTerm::make(t.sigma, t.nu);
}

LinComb LinComb::iid(double sigma, double nu, std::size_t k) {
  return LinComb(std::vector<TTerm>(k, TTerm{sigma, nu}));
}

double second_moment(const LinComb& zc) {
  double sum = 0.0;
  for (const auto& t : zc.terms()) {
    require_finite_variance(t, "second_moment");
    sum += t.sigma * t.sigma * t.nu / (t.nu - 2.0);
  }
  return sum;
}

double fourth_moment(const LinComb& zc) {
  double quartic = 0.0;
  double m2_sum = 0.0;
  double m2_sq_sum = 0.0;
  for (const auto& t : zc.terms()) {
    const auto d = t.as_scaled_t();
    quartic += tdist::moment(d, 4);  // throws Nonexistence for nu <= 4
    const double m2 = tdist::moment(d, 2);
    m2_sum += m2;
    m2_sq_sum += m2 * m2;
  }
  // 6 sum_{i<j} m2_i m2_j = 3 ((sum m2)^2 - sum m2^2)
  return quartic + 3.0 * (m2_sum * m2_sum - m2_sq_sum);
}

double log_cf_z(const LinComb& zc, double r) {
  double sum = 0.0;
  for (const auto& t : zc.terms()) sum += tdist::log_cf(t.as_scaled_t(), r);
  return sum;
}

double cf_z(const LinComb& zc, double r) {
  if (r == 0.0) return 1.0;
  return std::min(1.0, std::exp(log_cf_z(zc, r)));
}

AbsMoment abs_moment_k2_ordered(const TTerm& t1, const TTerm& t2,
                                const specfun::Accuracy& acc) {
  acc.validate();
  require_finite_variance(t1, "abs_moment_k2");
  require_finite_variance(t2, "abs_moment_k2");
  const double s1 = t1.sigma, n1 = t1.nu;
  const double s2 = t2.sigma, n2 = t2.nu;
  const double la1 = log_alpha(n1);
  const double la2 = log_alpha(n2);

  // I_1: closed form with one 2F1.
  const auto f1 = specfun::gauss_2f1_scaled(0.5 * (n2 + 1.0), 0.5, 0.5 * (n1 + n2),
                                            1.0 - n1 * s1 * s1 / (n2 * s2 * s2), acc);
  const double i1 = f1.mantissa *
                    std::exp(la1 + la2 + log_beta(0.5, 0.5 * (n1 + n2 - 1.0)) -
                             std::log(n1 - 1.0) + 1.5 * std::log(n1) + std::log(s1 / s2) +
                             f1.log_scale);

  // I_{2,1} = E[T_2; T_2 > 0].
  const double i21 = std::exp(0.5 * std::log(n2) + log_gamma(0.5 * (n2 - 1.0)) -
                              log_gamma(0.5 * n2) - 0.5 * kLogPi) /
                     2.0;

  // I'_{2,2}: the terms behave like i^-5/2 (A + B/i). Each partial sum is
  // completed with the midpoint Euler-Maclaurin sum of that model fitted to
  // the last two terms; the relative change of the completed sum is the
  // stop quantity.
  const double omega2 = omega2_of(t1, t2);
  SeriesTerms series(n1, n2, omega2, acc);
  SeriesDiag diag;
  double sum = 0.0;
  double term = 0.0;
  double completed = 0.0;
  int quiet_steps = 0;
  for (std::size_t i = 0; i < acc.max_terms; ++i) {
    const double prev = term;
    term = series.next();
    sum += term;
    double tail = 0.0;
    if (i >= 2) {
      const double x2 = static_cast<double>(i);
      const double x1 = x2 - 1.0;
      const double u1 = prev * std::pow(x1, 2.5);
      const double u2 = term * std::pow(x2, 2.5);
      const double b = (u2 - u1) / (1.0 / x2 - 1.0 / x1);
      const double a = u2 - b / x2;
      const double m = x2 + 0.5;
      const double deriv = -2.5 * a * std::pow(m, -3.5) - 3.5 * b * std::pow(m, -4.5);
      tail = a * std::pow(m, -1.5) / 1.5 + b * std::pow(m, -2.5) / 2.5 + deriv / 24.0;
    }
    const double next_completed = sum + tail;
    // The model error shrinks about one power of i faster than the tail,
    // so the remaining error is of order i times the latest change.
    diag.last_rel_term =
        std::fabs((next_completed - completed) / next_completed) * static_cast<double>(i + 1);
    diag.tail_estimate = tail / next_completed;
    diag.terms_used = i + 1;
    completed = next_completed;
    quiet_steps = diag.last_rel_term < acc.rel_tol ? quiet_steps + 1 : 0;
    if (diag.terms_used >= kMinSeriesTerms && quiet_steps >= 2) {
      diag.converged = true;
      break;
    }
  }
  if (!diag.converged) {
    fail(ErrorKind::NonConvergence,
         "abs_moment_k2: series not converged after " + std::to_string(diag.terms_used) +
             " terms (last relative change " + std::to_string(diag.last_rel_term) + ")");
  }
  sum = completed;

  const double log_omega1 =
      -0.5 * (n2 - 1.0) * std::log(n1 * s1 * s1 / (s2 * s2)) + 0.5 * (n2 + 1.0) * std::log(n2);
  const double i22p = sum * std::exp(std::numbers::ln2 + log_omega1 - 0.5 * kLogPi -
                                     log_beta(0.5 * n1, 0.5) + series.log_scale());

  const double value = 2.0 * s1 * i1 + 2.0 * s2 * (i21 - std::exp(la2) * i22p);
  return {value, diag};
}

AbsMoment abs_moment_k2(const TTerm& t1, const TTerm& t2, const specfun::Accuracy& acc) {
  // With nu1 sigma1^2 <= nu2 sigma2^2 the series 2F1 factors need the Pfaff
  // map, whose transformed series converges quickly in i.
  if (t1.nu * t1.sigma * t1.sigma <= t2.nu * t2.sigma * t2.sigma) {
    return abs_moment_k2_ordered(t1, t2, acc);
  }
  return abs_moment_k2_ordered(t2, t1, acc);
}

std::vector<double> abs_moment_series_partial_sums(const TTerm& t1, const TTerm& t2,
                                                   std::size_t count) {
  require_finite_variance(t1, "abs_moment_series_partial_sums");
  require_finite_variance(t2, "abs_moment_series_partial_sums");
  SeriesTerms series(t1.nu, t2.nu, omega2_of(t1, t2), specfun::Accuracy{});
  std::vector<double> out;
  out.reserve(count);
  double sum = 0.0;
  for (std::size_t i = 0; i < count; ++i) {
    sum += series.next();
    out.push_back(sum);
  }
  return out;
}

double abs_moment_iid(double sigma, double nu, int k) {
  if (k != 2) {
    fail(ErrorKind::Unsupported,
         "closed-form i.i.d. absolute moment is only available for K = 2");
  }
  TTerm::make(sigma, nu);
  if (!(nu > 2.0)) fail(ErrorKind::InvariantViolation, "abs_moment_iid: nu must exceed 2");
  return sigma * std::exp(0.5 * std::log(nu) + log_gamma(0.5 * (nu - 1.0)) +
                          log_gamma(nu - 0.5) - (nu - 2.0) * std::numbers::ln2 -
                          3.0 * log_gamma(0.5 * nu));
}

}  // namespace tlincomb::lincomb
