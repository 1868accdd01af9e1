#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "tlincomb/errors.hpp"
#include "tlincomb/specfun.hpp"

// K_nu(x) for real nu >= 0 and x > 0.
//
// nu is split as n + mu with |mu| <= 1/2. K_mu and K_{mu+1} come from
// Temme's series for x <= 2 or Steed's continued fraction (CF2) for x > 2,
// and forward recurrence (stable for K) climbs to nu. Orders above
// kDebyeOrder use the uniform asymptotic expansion instead of recurrence.
// All paths carry an explicit log scale, so ln K is available well beyond
// the range where K itself is representable.

namespace tlincomb::specfun {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kEps = std::numeric_limits<double>::epsilon();
constexpr double kTemmeCutoff = 2.0;
constexpr double kDebyeOrder = 500.0;
constexpr int kMaxIter = 100000;

// 1/Gamma(z) = sum_{k>=1} c_k z^k.
constexpr std::array<double, 28> kRecipGammaTaylor = {
    1.0,
    0.57721566490153286061,
    -0.65587807152025388108,
    -0.042002635034095235529,
    0.1665386113822914895,
    -0.042197734555544336748,
    -0.0096219715278769735621,
    0.0072189432466630995424,
    -0.0011651675918590651121,
    -0.00021524167411495097282,
    0.00012805028238811618615,
    -0.000020134854780788238656,
    -1.2504934821426706573e-6,
    1.1330272319816958824e-6,
    -2.0563384169776071035e-7,
    6.1160951044814158179e-9,
    5.0020076444692229301e-9,
    -1.1812745704870201446e-9,
    1.0434267116911005105e-10,
    7.782263439905071254e-12,
    -3.6968056186422057082e-12,
    5.100370287454475979e-13,
    -2.0583260535665067832e-14,
    -5.3481225394230179824e-15,
    1.2267786282382607902e-15,
    -1.1812593016974587695e-16,
    1.1866922547516003326e-18,
    1.4123806553180317816e-18};

struct TemmeGammas {
  double gam1;   // (1/G(1-mu) - 1/G(1+mu)) / (2 mu)
  double gam2;   // (1/G(1-mu) + 1/G(1+mu)) / 2
  double gampl;  // 1/G(1+mu)
  double gammi;  // 1/G(1-mu)
};

// From the Taylor series of 1/Gamma: the odd-k coefficients build gam2, the
// even-k coefficients build gam1, without the cancellation of the direct
// difference quotient at small mu.
TemmeGammas temme_gammas(double mu) {
  double g1 = 0.0;
  double g2 = 0.0;
  const double mu2 = mu * mu;
  double p = 1.0;
  for (std::size_t k = 0; k < kRecipGammaTaylor.size(); k += 2) {
    g2 += kRecipGammaTaylor[k] * p;
    g1 -= kRecipGammaTaylor[k + 1] * p;
    p *= mu2;
  }
  return {g1, g2, g2 - mu * g1, g2 + mu * g1};
}

struct KPair {
  double k_mu;
  double k_mu1;
  double log_scale;
};

KPair temme_series(double mu, double x) {
  const double x2 = 0.5 * x;
  const double pimu = kPi * mu;
  const double fact = std::fabs(pimu) < kEps ? 1.0 : pimu / std::sin(pimu);
  double d = -std::log(x2);
  double e = mu * d;
  const double fact2 = std::fabs(e) < kEps ? 1.0 : std::sinh(e) / e;
  const TemmeGammas g = temme_gammas(mu);
  double ff = fact * (g.gam1 * std::cosh(e) + g.gam2 * fact2 * d);
  double sum = ff;
  e = std::exp(e);
  double p = 0.5 * e / g.gampl;
  double q = 0.5 / (e * g.gammi);
  double c = 1.0;
  d = x2 * x2;
  double sum1 = p;
  const double mu2 = mu * mu;
  int i = 1;
  for (; i <= kMaxIter; ++i) {
    ff = (i * ff + p + q) / (i * static_cast<double>(i) - mu2);
    c *= d / i;
    p /= i - mu;
    q /= i + mu;
    const double del = c * ff;
    sum += del;
    const double del1 = c * (p - i * ff);
    sum1 += del1;
    if (std::fabs(del) < std::fabs(sum) * kEps) break;
  }
  if (i > kMaxIter) {
    fail(ErrorKind::NonConvergence, "bessel_k: Temme series did not converge");
  }
  return {sum, sum1 * 2.0 / x, 0.0};
}

KPair steed_cf2(double mu, double x) {
  double b = 2.0 * (1.0 + x);
  double d = 1.0 / b;
  double h = d;
  double delh = d;
  double q1 = 0.0;
  double q2 = 1.0;
  const double a1 = 0.25 - mu * mu;
  double q = a1;
  double c = a1;
  double a = -a1;
  double s = 1.0 + q * delh;
  int i = 2;
  for (; i <= kMaxIter; ++i) {
    a -= 2 * (i - 1);
    c = -a * c / i;
    const double qnew = (q1 - b * q2) / a;
    q1 = q2;
    q2 = qnew;
    q += c * qnew;
    b += 2.0;
    d = 1.0 / (b + a * d);
    delh = (b * d - 1.0) * delh;
    h += delh;
    const double dels = q * delh;
    s += dels;
    if (std::fabs(dels / s) < kEps) break;
  }
  if (i > kMaxIter) {
    fail(ErrorKind::NonConvergence, "bessel_k: continued fraction did not converge");
  }
  h = a1 * h;
  // exp(-x) is carried in the log scale.
  const double k_mu = std::sqrt(kPi / (2.0 * x)) / s;
  const double k_mu1 = k_mu * (mu + x + 0.5 - h) / x;
  return {k_mu, k_mu1, -x};
}

// Uniform asymptotic expansion for large order.
double log_bessel_k_debye(double nu, double x) {
  const double z = x / nu;
  const double root = std::sqrt(1.0 + z * z);
  const double eta = root + std::log(z / (1.0 + root));
  const double p = 1.0 / root;
  const double p2 = p * p;
  const double u1 = p * (3.0 - 5.0 * p2) / 24.0;
  const double u2 = p2 * (81.0 - 462.0 * p2 + 385.0 * p2 * p2) / 1152.0;
  const double u3 = p * p2 *
                    (30375.0 - 369603.0 * p2 + 765765.0 * p2 * p2 -
                     425425.0 * p2 * p2 * p2) /
                    414720.0;
  const double u4 = p2 * p2 *
                    (4465125.0 - 94121676.0 * p2 + 349922430.0 * p2 * p2 -
                     446185740.0 * p2 * p2 * p2 +
                     185910725.0 * p2 * p2 * p2 * p2) /
                    39813120.0;
  const double inv = 1.0 / nu;
  const double series =
      1.0 - inv * (u1 - inv * (u2 - inv * (u3 - inv * u4)));
  return 0.5 * std::log(kPi / (2.0 * nu)) - nu * eta -
         0.25 * std::log1p(z * z) + std::log(series);
}

}  // namespace

double log_bessel_k(double order, double x) {
  if (!(x > 0.0) || std::isinf(x)) {
    fail(ErrorKind::Domain, "bessel_k requires x > 0, got " + std::to_string(x));
  }
  if (!(order >= 0.0) || std::isinf(order)) {
    fail(ErrorKind::Domain, "bessel_k requires a finite order >= 0");
  }
  if (order > kDebyeOrder) return log_bessel_k_debye(order, x);

  const int n = static_cast<int>(order + 0.5);
  const double mu = order - n;
  KPair kp = x <= kTemmeCutoff ? temme_series(mu, x) : steed_cf2(mu, x);

  constexpr double big = 1e250;
  const double log_big = std::log(big);
  double k_lo = kp.k_mu;
  double k_hi = kp.k_mu1;
  double log_scale = kp.log_scale;
  for (int i = 1; i <= n; ++i) {
    const double next = (mu + i) * (2.0 / x) * k_hi + k_lo;
    k_lo = k_hi;
    k_hi = next;
    if (k_hi > big) {
      k_lo /= big;
      k_hi /= big;
      log_scale += log_big;
    }
  }
  return std::log(k_lo) + log_scale;
}

double bessel_k(double order, double x) {
  const double lk = log_bessel_k(order, x);
  if (lk > std::log(std::numeric_limits<double>::max())) {
    fail(ErrorKind::Overflow, "bessel_k overflows; use log_bessel_k");
  }
  return std::exp(lk);
}

}  // namespace tlincomb::specfun
