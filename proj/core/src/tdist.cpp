#include "tlincomb/tdist.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <string>

#include "tlincomb/errors.hpp"
#include "tlincomb/specfun.hpp"

namespace tlincomb::tdist {

namespace {

constexpr double kPi = std::numbers::pi;

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Lower tail P(X <= -|t|) for the unit-scale t, from the incomplete beta
// with both arguments supplied exactly.
double lower_tail_unit(double nu, double t) {
  const double t2 = t * t;
  const double denom = t2 + nu;
  const auto ib = specfun::reg_inc_beta_pair(nu / denom, t2 / denom, 0.5 * nu, 0.5);
  return 0.5 * ib.value;
}

}  // namespace

ScaledT::ScaledT(double sigma, double nu) : sigma_(sigma), nu_(nu) {
  if (!(sigma > 0.0) || !std::isfinite(sigma)) {
    fail(ErrorKind::InvariantViolation,
         "sigma must be positive and finite, got " + std::to_string(sigma));
  }
  if (!(nu > 0.0) || !std::isfinite(nu)) {
    fail(ErrorKind::InvariantViolation,
         "nu must be positive and finite, got " + std::to_string(nu));
  }
}

double ScaledT::alpha() const {
  using specfun::log_gamma;
  return std::exp(log_gamma(0.5 * (nu_ + 1.0)) - log_gamma(0.5 * nu_) -
                  0.5 * std::log(nu_ * kPi));
}

double log_pdf(const ScaledT& d, double x) {
  using specfun::log_gamma;
  const double nu = d.nu();
  const double t = x / d.sigma();
  return log_gamma(0.5 * (nu + 1.0)) - log_gamma(0.5 * nu) - 0.5 * std::log(nu * kPi) -
         0.5 * (nu + 1.0) * std::log1p(t * t / nu) - std::log(d.sigma());
}

double pdf(const ScaledT& d, double x) { return std::exp(log_pdf(d, x)); }

double cdf(const ScaledT& d, double x) {
  if (x == 0.0) return 0.5;
  const double t = x / d.sigma();
  if (std::isinf(t)) return t > 0.0 ? 1.0 : 0.0;
  const double tail = lower_tail_unit(d.nu(), t);
  return t < 0.0 ? tail : 1.0 - tail;
}

double survival(const ScaledT& d, double x) { return cdf(d, -x); }

double quantile(const ScaledT& d, double p) {
  if (!(p > 0.0 && p < 1.0)) {
    fail(ErrorKind::Domain, "quantile requires 0 < p < 1");
  }
  if (p == 0.5) return 0.0;
  // Solve on the lower tail, where the CDF carries full relative precision.
  const bool upper = p > 0.5;
  const double target = upper ? 1.0 - p : p;
  // Cauchy quantile as the starting point; its tail is never lighter.
  const double guess = std::tan(kPi * (0.5 - target));
  double hi = 0.0;  // tail(hi) = 0.5 > target
  double lo = -guess;
  const ScaledT unit(1.0, d.nu());
  while (cdf(unit, lo) > target) {
    hi = lo;
    lo *= 2.0;
    if (std::isinf(lo)) fail(ErrorKind::NonConvergence, "quantile bracket diverged");
  }
  // Bisection on the bracket [lo, hi] with cdf(lo) <= target < cdf(hi).
  for (int iter = 0; iter < 2000; ++iter) {
    const double mid = 0.5 * (lo + hi);
    if (mid == lo || mid == hi) break;
    if (cdf(unit, mid) > target) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  const double t = std::fabs(target - cdf(unit, lo)) <= std::fabs(cdf(unit, hi) - target) ? lo : hi;
  return (upper ? -t : t) * d.sigma();
}

double moment(const ScaledT& d, int m) {
  if (m < 1) fail(ErrorKind::Domain, "moment order must be a positive integer");
  if (static_cast<double>(m) >= d.nu()) {
    fail(ErrorKind::Nonexistence, "moment of order " + std::to_string(m) +
                                      " does not exist for nu = " + std::to_string(d.nu()));
  }
  if (m % 2 == 1) return 0.0;
  const double nu = d.nu();
  double value = std::pow(d.sigma() * d.sigma() * nu, 0.5 * m);
  for (int i = 1; i <= m / 2; ++i) {
    value *= (2.0 * i - 1.0) / (nu - 2.0 * i);
  }
  return value;
}

double abs_moment(const ScaledT& d, double m) {
  using specfun::log_gamma;
  if (!(m > 0.0)) fail(ErrorKind::Domain, "absolute moment order must be positive");
  if (m >= d.nu()) {
    fail(ErrorKind::Nonexistence, "absolute moment of order " + std::to_string(m) +
                                      " does not exist for nu = " + std::to_string(d.nu()));
  }
  const double nu = d.nu();
  return std::exp(m * std::log(d.sigma()) + 0.5 * m * std::log(nu) +
                  log_gamma(0.5 * (nu - m)) + log_gamma(0.5 * (m + 1.0)) -
                  0.5 * std::log(kPi) - log_gamma(0.5 * nu));
}

double log_cf_kernel(double nu, double a) {
  if (a == 0.0) return 0.0;
  const double half = 0.5 * nu;
  return half * std::log(a) + specfun::log_bessel_k(half, a) -
         (half - 1.0) * std::numbers::ln2 - specfun::log_gamma(half);
}

double log_cf(const ScaledT& d, double r) {
  return log_cf_kernel(d.nu(), std::sqrt(d.nu()) * d.sigma() * std::fabs(r));
}

double cf(const ScaledT& d, double r) {
  // The kernel can exceed 1 by a few ulps near r = 0; the CF cannot.
  return std::min(1.0, std::exp(log_cf(d, r)));
}

std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t stream) {
  return splitmix64(splitmix64(seed) ^ splitmix64(stream + 0x632be59bd9b4e019ULL));
}

void accumulate_samples(const ScaledT& d, std::uint64_t engine_seed,
                        std::vector<double>& out, bool add) {
  std::mt19937_64 engine(engine_seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::chi_squared_distribution<double> chi2(d.nu());
  const double sigma = d.sigma();
  const double nu = d.nu();
  for (double& v : out) {
    const double g = normal(engine);
    const double c = chi2(engine);
    const double x = sigma * g / std::sqrt(c / nu);
    v = add ? v + x : x;
  }
}

std::vector<double> sample(const ScaledT& d, std::size_t n, std::uint64_t seed) {
  if (n < 1) fail(ErrorKind::Domain, "sample size must be at least 1");
  std::vector<double> out(n);
  accumulate_samples(d, stream_seed(seed, 0), out, false);
  return out;
}

}  // namespace tlincomb::tdist
