#include "tlincomb/fitting.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <cstdio>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

#include <boost/math/tools/minima.hpp>

#include "tlincomb/errors.hpp"

namespace tlincomb::fitting {

namespace {

using lincomb::LinComb;
using specfun::log_gamma;

constexpr double kPi = std::numbers::pi;
constexpr double kSqrtPi = 1.7724538509055160273;
constexpr double kSqrt2 = std::numbers::sqrt2;
constexpr double kNuFloor = 2.0 + 1e-6;

constexpr std::array<std::pair<FitMethod, std::string_view>, 4> kMethodNames{{
    {FitMethod::AbsMoment, "ABS_MOMENT"},
    {FitMethod::CfClosed, "CF_CLOSED"},
    {FitMethod::CfBisect, "CF_BISECT"},
    {FitMethod::Moment4, "MOMENT4"},
}};

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

tdist::ScaledT sigma_from_m2(double nu, double m2) {
  return tdist::ScaledT(std::sqrt((nu - 2.0) * m2 / nu), nu);
}

std::vector<double> log_grid(double lo, double hi, std::size_t count) {
  std::vector<double> out(count);
  const double a = std::log(lo), b = std::log(hi);
  for (std::size_t i = 0; i < count; ++i) {
    const double t = count == 1 ? 0.0 : static_cast<double>(i) / static_cast<double>(count - 1);
    out[i] = std::exp(a + t * (b - a));
  }
  out.front() = lo;
  out.back() = hi;
  return out;
}

}  // namespace

std::string_view to_string(FitMethod m) {
  for (const auto& [method, name] : kMethodNames) {
    if (method == m) return name;
  }
  return "UNKNOWN";
}

std::optional<FitMethod> parse_method(std::string_view s) {
  std::string norm(s);
  for (auto& ch : norm) {
    ch = ch == '-' ? '_' : static_cast<char>(std::toupper(static_cast<unsigned char>(ch)));
  }
  for (const auto& [method, name] : kMethodNames) {
    if (name == norm) return method;
  }
  return std::nullopt;
}

RationalApprox abs_moment_approx() { return {kSqrt2, -2.0 * kSqrt2, -kSqrtPi}; }

RationalApprox cf_approx() {
  return {constants::kCfLimit, -constants::kCfNuA, -constants::kCfNuB};
}

bool cf_constants_consistent(double tol) {
  using namespace constants;
  const double d1 = 2.0 * kCfLimit - kCfNuA;
  const double d2 = 2.0 - kCfNuB;
  return std::fabs(d1 - d2) <= tol && std::fabs(kCfNuA / d1 - kCfSigmaA) <= tol &&
         std::fabs(kCfNuB / d1 - kCfSigmaB) <= tol;
}

double h_exact(double nu) {
  if (!(nu > 2.0) || std::isnan(nu)) fail(ErrorKind::Domain, "h requires nu > 2");
  if (std::isinf(nu)) return kSqrt2;
  return std::exp(log_gamma(0.5 * (nu - 1.0)) - log_gamma(0.5 * nu)) * std::sqrt(nu - 2.0);
}

double g_exact(double nu, double r_e) {
  if (!(nu > 2.0) || std::isnan(nu)) fail(ErrorKind::Domain, "g requires nu > 2");
  if (!(r_e > 0.0) || !std::isfinite(r_e)) fail(ErrorKind::Domain, "g requires rE > 0");
  if (std::isinf(nu)) return std::exp(-0.5 * r_e * r_e);
  return std::exp(tdist::log_cf_kernel(nu, r_e * std::sqrt(nu - 2.0)));
}

double h_approx_max_error(double lo, double hi) {
  const auto approx = abs_moment_approx();
  double worst = 0.0;
  for (double nu : log_grid(std::max(lo, kNuFloor), hi, 2000)) {
    worst = std::max(worst, std::fabs(h_exact(nu) - approx(nu)));
  }
  return worst;
}

RationalApprox refit_rational(ApproxTarget target, double lo, double hi, double r_e) {
  if (!(lo > 2.0) || !(hi >= lo)) fail(ErrorKind::Domain, "refit domain must satisfy 2 < lo <= hi");
  const auto nus = log_grid(lo, hi, 200);
  std::vector<double> ys(nus.size());
  for (std::size_t i = 0; i < nus.size(); ++i) {
    ys[i] = target == ApproxTarget::H ? h_exact(nus[i]) : g_exact(nus[i], r_e);
  }

  // h: p1 = sqrt2, h(2) = 0 gives p2 = -2 p1, p3 free.
  // g: p1 = exp(-rE^2/2), g(2) = 1 gives p3 = 2 p1 + p2 - 2, p2 free.
  const double p1 = target == ApproxTarget::H ? kSqrt2 : std::exp(-0.5 * r_e * r_e);
  auto assemble = [&](double free) {
    return target == ApproxTarget::H ? RationalApprox{p1, -2.0 * p1, free}
                                     : RationalApprox{p1, free, 2.0 * p1 + free - 2.0};
  };
  auto sse = [&](double free) {
    const auto f = assemble(free);
    double s = 0.0;
    for (std::size_t i = 0; i < nus.size(); ++i) {
      const double e = f(nus[i]) - ys[i];
      s += e * e;
    }
    return std::isfinite(s) ? s : std::numeric_limits<double>::max();
  };
  // Keep the denominator nu + p3 positive on [lo, hi].
  double a, b;
  if (target == ApproxTarget::H) {
    a = -lo + 1e-9;
    b = 50.0;
  } else {
    a = -lo - 2.0 * p1 + 2.0 + 1e-9;
    b = 50.0;
  }
  std::uintmax_t max_iter = 500;
  const auto best = boost::math::tools::brent_find_minima(sse, a, b, 52, max_iter);
  return assemble(best.first);
}

FitReport fit_absmoment_k2(double m2, double m1abs) {
  if (!(m2 > 0.0) || !(m1abs > 0.0) || !std::isfinite(m2) || !std::isfinite(m1abs)) {
    fail(ErrorKind::InfeasibleRatio, "absolute-moment fit needs positive finite moments");
  }
  const double ratio = kSqrtPi * m1abs / std::sqrt(m2);
  if (!(ratio < kSqrt2)) {
    fail(ErrorKind::InfeasibleRatio, "sqrt(pi) E|Z| / sqrt(E[Z^2]) = " + num(ratio) +
                                         " is not below sqrt(2)");
  }
  const double root = 2.0 * std::sqrt(2.0 * m2);
  const double nu = (kPi * m1abs - root) / (kSqrtPi * m1abs - std::sqrt(2.0 * m2));
  if (!(nu > kNuFloor)) {
    fail(ErrorKind::InfeasibleRatio, "absolute-moment fit gives nu_z = " + num(nu));
  }
  const double sigma = std::sqrt((kPi - 2.0 * kSqrtPi) * m1abs * m2 / (kPi * m1abs - root));
  return FitReport{tdist::ScaledT(sigma, nu), FitMethod::AbsMoment, std::nullopt, 0,
                   std::nullopt, std::nullopt};
}

FitReport fit_absmoment_iter(const LinComb& zc, const specfun::Accuracy& acc) {
  const auto terms = zc.terms();
  for (const auto& t : terms) {
    if (!(t.nu > 2.0)) fail(ErrorKind::InvariantViolation, "nu must exceed 2");
  }
  FitReport report{terms[0].as_scaled_t(), FitMethod::AbsMoment, std::nullopt, 0,
                   std::nullopt, std::nullopt};
  double m2 = lincomb::second_moment(LinComb({terms[0]}));
  for (std::size_t k = 1; k < terms.size(); ++k) {
    const auto& t = terms[k];
    m2 += t.sigma * t.sigma * t.nu / (t.nu - 2.0);
    try {
      const lincomb::TTerm current{report.fitted.sigma(), report.fitted.nu()};
      const auto m1 = lincomb::abs_moment_k2(current, t, acc);
      auto next = fit_absmoment_k2(m2, m1.value);
      next.series = m1.diag;
      report = next;
    } catch (const Error& e) {
      fail(e.kind(), "step " + std::to_string(k) + ": " + e.what());
    }
    report.iterations = k;
  }
  return report;
}

FitReport fit_cf_closed(const LinComb& zc) {
  using namespace constants;
  const double m2 = lincomb::second_moment(zc);
  const double r = 1.0 / std::sqrt(m2);
  const double c = lincomb::cf_z(zc, r);
  if (c <= kCfLimit + 1e-9 || c >= 1.0 - 1e-12) {
    fail(ErrorKind::InfeasibleCf,
         "CF_Z(E[Z^2]^-1/2) = " + num(c) + " is outside (0.607, 1)");
  }
  const double nu = (kCfNuA - kCfNuB * c) / (kCfLimit - c);
  if (!(nu > 2.0)) {
    fail(ErrorKind::InfeasibleCf, "CF closed form gives nu_z = " + num(nu));
  }
  const double sigma = std::sqrt((c - 1.0) * m2 / (kCfSigmaA - kCfSigmaB * c));
  return FitReport{tdist::ScaledT(sigma, nu), FitMethod::CfClosed, r, 0, std::nullopt,
                   std::nullopt};
}

FitReport fit_cf_bisect(const LinComb& zc, double r) {
  if (!(r > 0.0) || !std::isfinite(r)) fail(ErrorKind::Domain, "r must be positive");
  const double m2 = lincomb::second_moment(zc);
  BisectionTrace trace;
  trace.target = lincomb::cf_z(zc, r);
  trace.r_e = r * std::sqrt(m2);
  const double c = trace.target;
  const double g_lo = g_exact(kBisectNuMin, trace.r_e);
  const double g_hi = g_exact(kBisectNuMax, trace.r_e);
  auto no_solution = [&] {
    fail(ErrorKind::NoSolution, "CF_Z(r) = " + num(c) + " outside (" +
                                    num(g_hi) + ", " + num(g_lo) +
                                    ") at r = " + num(r));
  };
  if (!(c < g_lo)) no_solution();
  double nu;
  if (c <= g_hi) {
    if (!(c > 0.0) || !(c > std::exp(-0.5 * trace.r_e * trace.r_e))) no_solution();
    nu = kBisectNuMax;
    trace.lo = trace.hi = nu;
    trace.effectively_gaussian = true;
  } else {
    double lo = kBisectNuMin, hi = kBisectNuMax;
    while (hi - lo >= kBisectWidth) {
      const double mid = 0.5 * (lo + hi);
      if (g_exact(mid, trace.r_e) > c) {
        lo = mid;
      } else {
        hi = mid;
      }
      ++trace.iterations;
    }
    trace.lo = lo;
    trace.hi = hi;
    nu = 0.5 * (lo + hi);
  }
  return FitReport{sigma_from_m2(nu, m2), FitMethod::CfBisect, r, trace.iterations,
                   std::nullopt, trace};
}

FitReport fit_moment4(const LinComb& zc) {
  const double m4 = lincomb::fourth_moment(zc);
  const double m2 = lincomb::second_moment(zc);
  const double kurtosis = m4 / (m2 * m2);
  if (!(kurtosis > 3.0)) {
    fail(ErrorKind::InfeasibleKurtosis, "kurtosis " + num(kurtosis) + " is not above 3");
  }
  const double nu = (4.0 * kurtosis - 6.0) / (kurtosis - 3.0);
  return FitReport{sigma_from_m2(nu, m2), FitMethod::Moment4, std::nullopt, 0, std::nullopt,
                   std::nullopt};
}

FitReport fit(const LinComb& zc, FitMethod method, std::optional<double> r,
              const specfun::Accuracy& acc) {
  switch (method) {
    case FitMethod::AbsMoment:
      return fit_absmoment_iter(zc, acc);
    case FitMethod::CfClosed:
      return fit_cf_closed(zc);
    case FitMethod::CfBisect:
      return fit_cf_bisect(zc, r.value_or(1.0 / std::sqrt(lincomb::second_moment(zc))));
    case FitMethod::Moment4:
      return fit_moment4(zc);
  }
  fail(ErrorKind::Unsupported, "unknown fit method");
}

}  // namespace tlincomb::fitting
