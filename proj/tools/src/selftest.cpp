#include <cmath>
#include <functional>
#include <numbers>
#include <sstream>
#include <string>

#include "tlincomb/errors.hpp"
#include "tlincomb/fitting.hpp"
#include "tlincomb/lincomb.hpp"
#include "tlincomb/specfun.hpp"
#include "tlincomb/tdist.hpp"
#include "tlincomb_cli/cli.hpp"

namespace tlincomb::cli {

namespace {

constexpr double kPi = std::numbers::pi;

bool close(double a, double b, double rel) {
  return std::fabs(a - b) <= rel * std::max(1.0, std::fabs(b));
}

std::string fmt(double a, double b) {
  std::ostringstream os;
  os.precision(17);
  os << a << " vs " << b;
  return os.str();
}

}  // namespace

std::vector<SelftestResult> run_selftest() {
  std::vector<SelftestResult> out;
  auto check = [&](const std::string& name, const std::function<std::string()>& body) {
    try {
      const std::string failure = body();
      out.push_back({name, failure.empty(), failure});
    } catch (const std::exception& e) {
      out.push_back({name, false, std::string("threw: ") + e.what()});
    }
  };
  auto expect = [](double got, double want, double rel) {
    return close(got, want, rel) ? std::string() : fmt(got, want);
  };

  check("closed-form constants", [] {
    using namespace fitting::constants;
    const bool exact = kCfLimit == 0.607 && kCfNuA == 0.7606 && kCfNuB == 1.5466 &&
                       kCfSigmaA == 1.6775 && kCfSigmaB == 3.4111;
    const auto h = fitting::abs_moment_approx();
    const bool abs_ok = h.p1 == std::numbers::sqrt2 && h.p2 == -2.0 * std::numbers::sqrt2 &&
                        close(h.p3, -std::sqrt(kPi), 1e-15);
    if (!exact) return std::string("CF closed-form constants differ from 0.607/0.7606/1.5466/1.6775/3.4111");
    if (!abs_ok) return std::string("absolute-moment constants differ from sqrt2, -2 sqrt2, -sqrt(pi)");
    return std::string();
  });
  check("CF constant consistency (1e-3)", [] {
    return fitting::cf_constants_consistent(1e-3) ? std::string()
                                                  : std::string("0.7606/0.4534 or 1.5466/0.4534 mismatch");
  });
  check("h approximation error bound on (2, 50]", [] {
    const double e = fitting::h_approx_max_error(2.0, 50.0);
    return e <= fitting::kHApproxErrorBound ? std::string() : fmt(e, fitting::kHApproxErrorBound);
  });
  check("gamma function values", [&] {
    auto a = expect(specfun::gamma_signed(5.0), 24.0, 1e-14);
    if (a.empty()) a = expect(specfun::gamma_signed(0.5), std::sqrt(kPi), 1e-14);
    if (a.empty()) a = expect(specfun::gamma_signed(-0.5), -2.0 * std::sqrt(kPi), 1e-13);
    return a;
  });
  check("incomplete beta symmetry", [&] {
    const double v = specfun::reg_inc_beta(0.3, 2.5, 4.0) + specfun::reg_inc_beta(0.7, 4.0, 2.5);
    return expect(v, 1.0, 1e-14);
  });
  check("Bessel K half-integer order", [&] {
    const double x = 1.7;
    return expect(specfun::bessel_k(0.5, x), std::sqrt(kPi / (2.0 * x)) * std::exp(-x), 1e-13);
  });
  check("2F1 elementary case", [&] {
    const double z = -3.5;
    return expect(specfun::gauss_2f1(1.0, 1.0, 2.0, z), std::log1p(-z) / -z, 1e-13);
  });
  check("t second moment and CDF symmetry", [&] {
    const tdist::ScaledT d(1.5, 5.0);
    auto a = expect(tdist::moment(d, 2), 2.25 * 5.0 / 3.0, 1e-14);
    if (a.empty()) a = expect(tdist::cdf(d, 0.8) + tdist::cdf(d, -0.8), 1.0, 1e-14);
    if (a.empty()) a = expect(tdist::quantile(d, tdist::cdf(d, 2.2)), 2.2, 1e-9);
    return a;
  });
  check("K=2 absolute moment vs i.i.d. closed form", [&] {
    const auto v = lincomb::abs_moment_k2({1.0, 3.0}, {1.0, 3.0});
    auto a = expect(v.value, 3.0 * std::sqrt(3.0) / kPi, 1e-8);
    if (a.empty()) {
      a = expect(lincomb::abs_moment_k2({2.0, 5.0}, {2.0, 5.0}).value,
                 lincomb::abs_moment_iid(2.0, 5.0), 1e-8);
    }
    return a;
  });
  check("K=2 absolute moment symmetry", [&] {
    const lincomb::TTerm a{1.0, 2.5}, b{2.0, 6.0};
    return expect(lincomb::abs_moment_k2(a, b).value, lincomb::abs_moment_k2(b, a).value, 1e-9);
  });
  check("limits of h and g", [&] {
    auto a = expect(fitting::h_exact(1e6), std::numbers::sqrt2, 1e-5);
    if (a.empty() && !(fitting::h_exact(2.0 + 1e-6) < 2e-3)) a = "h(2+) not near 0";
    if (a.empty()) a = expect(fitting::g_exact(2.0 + 1e-6, 1.0), 1.0, 1e-5);
    if (a.empty() && !(std::fabs(fitting::g_exact(1e6, 1.0) - 0.607) <= 5e-4)) a = "g(inf) not within 5e-4 of 0.607";
    return a;
  });
  check("MOMENT4 recovers a scaled t exactly", [&] {
    const auto r = fitting::fit_moment4(lincomb::LinComb({{1.0, 6.0}}));
    auto a = expect(r.fitted.nu(), 6.0, 1e-10);
    if (a.empty()) a = expect(r.fitted.sigma(), 1.0, 1e-10);
    return a;
  });
  check("absolute-moment fit preserves E[Z^2]", [&] {
    const lincomb::LinComb zc({{0.5, 2.5}, {1.0, 3.0}, {1.5, 3.5}});
    const auto r = fitting::fit_absmoment_iter(zc);
    const double s = r.fitted.sigma(), nu = r.fitted.nu();
    return expect(s * s * nu / (nu - 2.0), lincomb::second_moment(zc), 1e-9);
  });
  check("iterative fit with K=2 equals the pair fit", [&] {
    const lincomb::TTerm a{1.0, 3.0}, b{2.0, 4.0};
    const auto it = fitting::fit_absmoment_iter(lincomb::LinComb({a, b}));
    const auto direct = fitting::fit_absmoment_k2(lincomb::second_moment(lincomb::LinComb({a, b})),
                                                  lincomb::abs_moment_k2(a, b).value);
    return it.fitted == direct.fitted ? std::string()
                                      : fmt(it.fitted.nu(), direct.fitted.nu());
  });
  check("CF fits: scale equivariance of nu_z", [&] {
    const lincomb::LinComb a({{0.5, 3.0}, {1.0, 4.5}});
    const lincomb::LinComb b({{1.5, 3.0}, {3.0, 4.5}});
    auto x = expect(fitting::fit_cf_closed(a).fitted.nu(), fitting::fit_cf_closed(b).fitted.nu(), 1e-9);
    if (x.empty()) {
      x = expect(fitting::fit_cf_bisect(a, 0.7).fitted.nu(),
                 fitting::fit_cf_bisect(b, 0.7 / 3.0).fitted.nu(), 1e-9);
    }
    return x;
  });
  return out;
}

}  // namespace tlincomb::cli
