#include <cmath>
#include <numbers>
#include <random>

#include <gtest/gtest.h>
#include <boost/math/special_functions/bessel.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include "tlincomb/errors.hpp"
#include "tlincomb/fitting.hpp"
#include "tlincomb/lincomb.hpp"
#include "tlincomb/mceval.hpp"

using tlincomb::Error;
using tlincomb::ErrorKind;
using tlincomb::lincomb::LinComb;
using tlincomb::lincomb::TTerm;
using namespace tlincomb::fitting;
namespace lc = tlincomb::lincomb;
namespace td = tlincomb::tdist;
namespace mc = tlincomb::mceval;

namespace {

constexpr double kSqrt2 = std::numbers::sqrt2;
constexpr double kPi = std::numbers::pi;

ErrorKind kind_of(auto&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "no tlincomb::Error thrown";
  return ErrorKind::Unsupported;
}

LinComb staircase(int k) {
  std::vector<TTerm> t;
  for (int i = 1; i <= k; ++i) t.push_back({i / 2.0, 2.0 + i / 2.0});
  return LinComb(t);
}

double implied_m2(const FitReport& r) {
  const double s = r.fitted.sigma(), n = r.fitted.nu();
  return s * s * n / (n - 2.0);
}

// g from Boost's Bessel K, independent of the library
double g_boost(double nu, double re) {
  const double a = re * std::sqrt(nu - 2.0);
  return std::pow(a, nu / 2) * boost::math::cyl_bessel_k(nu / 2, a) /
         (std::pow(2.0, nu / 2 - 1) * boost::math::tgamma(nu / 2));
}

}  // namespace

TEST(Methods, NamesRoundTrip) {
  for (auto m : {FitMethod::AbsMoment, FitMethod::CfClosed, FitMethod::CfBisect, FitMethod::Moment4})
    EXPECT_EQ(parse_method(to_string(m)), m);
  EXPECT_EQ(parse_method("cf-bisect"), FitMethod::CfBisect);
  EXPECT_EQ(parse_method("abs_moment"), FitMethod::AbsMoment);
  EXPECT_FALSE(parse_method("cf").has_value());
}

TEST(Constants, ExactlyAsPublished) {
  const auto h = abs_moment_approx();
  EXPECT_EQ(h.p1, kSqrt2);
  EXPECT_EQ(h.p2, -2.0 * kSqrt2);
  EXPECT_NEAR(h.p3, -std::sqrt(kPi), 1e-15);
  const auto g = cf_approx();
  EXPECT_EQ(g.p1, 0.607);
  EXPECT_EQ(g.p2, -0.7606);
  EXPECT_EQ(g.p3, -1.5466);
  // p3 = p2 - 0.786
  EXPECT_NEAR(g.p3, g.p2 - 0.786, 1e-12);
  EXPECT_TRUE(cf_constants_consistent(1e-3));
  EXPECT_FALSE(cf_constants_consistent(1e-6));
}

TEST(HExact, Examples) {
  EXPECT_LT(h_exact(2.0 + 1e-9), 1e-4);
  EXPECT_NEAR(h_exact(1e6), kSqrt2, 1e-5);
  EXPECT_NEAR(h_exact(4.0), std::sqrt(kPi / 2.0), 1e-13);
  const double want = boost::math::tgamma(2.25) * std::sqrt(3.5) / boost::math::tgamma(2.75);
  EXPECT_NEAR(h_exact(5.5), want, 1e-13);
  EXPECT_EQ(kind_of([] { h_exact(2.0); }), ErrorKind::Domain);
}

TEST(HExact, IncreasingAndApproxBound) {
  double prev = 0.0;
  for (double nu = 2.01; nu < 500.0; nu *= 1.05) {
    EXPECT_GT(h_exact(nu), prev);
    prev = h_exact(nu);
  }
  const double e = h_approx_max_error(2.0, 50.0);
  EXPECT_LE(e, kHApproxErrorBound);
  // the bound is measured, not padded
  EXPECT_GT(e, kHApproxErrorBound - 2e-3);
}

TEST(GExact, Examples) {
  for (double re : {0.1, 1.0, 4.0}) EXPECT_NEAR(g_exact(2.0 + 1e-9, re), 1.0, 1e-4);
  EXPECT_NEAR(g_exact(1e6, 1.0), std::exp(-0.5), 1e-6);
  EXPECT_NEAR(g_exact(1e6, 1.0), 0.607, 5e-4);
  EXPECT_NEAR(g_exact(3.0, 1.0), g_boost(3.0, 1.0), 1e-9);
  for (double nu : {2.3, 7.0, 40.0}) EXPECT_NEAR(g_exact(nu, 2.0), g_boost(nu, 2.0), 1e-9);
  EXPECT_EQ(kind_of([] { g_exact(2.0, 1.0); }), ErrorKind::Domain);
  EXPECT_EQ(kind_of([] { g_exact(3.0, 0.0); }), ErrorKind::Domain);
}

TEST(GExact, DecreasingInNu) {
  for (double re : {0.1, 1.0, 2.0, 4.0}) {
    double prev = 1.0;
    for (double nu = 2.0 + 1e-3; nu <= 200.0; nu += 0.25) {
      const double g = g_exact(nu, re);
      EXPECT_LT(g, prev) << re << " " << nu;
      EXPECT_GT(g, 0.0);
      prev = g;
    }
  }
}

TEST(RefitRational, HMatchesPublishedShape) {
  const auto h = refit_rational(ApproxTarget::H, 2.01, 100.0);
  EXPECT_EQ(h.p1, kSqrt2);
  EXPECT_EQ(h.p2, -2.0 * kSqrt2);
  EXPECT_GE(h.p3, -1.80);
  EXPECT_LE(h.p3, -1.70);
  // the data sides with -sqrt(pi) over -sqrt(3)
  EXPECT_LT(std::fabs(h.p3 + std::sqrt(kPi)), std::fabs(h.p3 + std::sqrt(3.0)));
}

TEST(RefitRational, GMatchesPublishedConstants) {
  const auto g = refit_rational(ApproxTarget::G, 2.01, 100.0);
  EXPECT_NEAR(g.p1, 0.607, 0.002);
  EXPECT_NEAR(g.p2, -0.7606, 0.01);
  // g(2+) = 1 ties p3 to p2
  EXPECT_NEAR(g.p3, g.p2 + 2.0 * g.p1 - 2.0, 1e-12);
}

TEST(RefitRational, SinglePointInterpolates) {
  const auto g = refit_rational(ApproxTarget::G, 5.0, 5.0);
  EXPECT_NEAR(g(5.0), g_exact(5.0, 1.0), 1e-8);
  const auto h = refit_rational(ApproxTarget::H, 7.0, 7.0);
  EXPECT_NEAR(h(7.0), h_exact(7.0), 1e-8);
}

TEST(FitAbsMomentK2, PureScaledTRecovery) {
  const td::ScaledT d(2.0, 5.0);
  const auto r = fit_absmoment_k2(td::moment(d, 2), td::abs_moment(d, 1.0));
  EXPECT_EQ(r.method, FitMethod::AbsMoment);
  EXPECT_NEAR(r.fitted.nu(), 5.0, 0.02 * 5.0);
  EXPECT_NEAR(r.fitted.sigma(), 2.0, 0.01 * 2.0);
}

TEST(FitAbsMomentK2, ClosedFormInvertsApproximation) {
  // the closed form solves h_approx(nu) = R exactly
  const auto h = abs_moment_approx();
  for (double nu : {2.5, 4.0, 9.0, 30.0}) {
    const double m2 = 3.0;
    const double m1 = h(nu) * std::sqrt(m2) / std::sqrt(kPi);
    const auto r = fit_absmoment_k2(m2, m1);
    EXPECT_NEAR(r.fitted.nu(), nu, 1e-9 * nu);
    EXPECT_NEAR(implied_m2(r), m2, 1e-9 * m2);
  }
}

TEST(FitAbsMomentK2, IidPairAgainstMonteCarlo) {
  const LinComb z({{1, 3}, {1, 3}});
  const auto r = fit_absmoment_k2(6.0, 3.0 * std::sqrt(3.0) / kPi);
  const auto s = mc::sample_z(z, 1'000'000, 1);
  const auto h = mc::build_histogram(s);
  EXPECT_LT(mc::bhattacharyya(h, r.fitted).d_b, 0.01);
}

TEST(FitAbsMomentK2, InfeasibleRatio) {
  const double m2 = 2.0;
  const double at_limit = kSqrt2 * std::sqrt(m2) / std::sqrt(kPi);
  EXPECT_EQ(kind_of([&] { fit_absmoment_k2(m2, at_limit); }), ErrorKind::InfeasibleRatio);
  EXPECT_EQ(kind_of([&] { fit_absmoment_k2(m2, 1.1 * at_limit); }), ErrorKind::InfeasibleRatio);
  // tiny ratio puts nu_z at or below 2
  EXPECT_EQ(kind_of([&] { fit_absmoment_k2(m2, 1e-9); }), ErrorKind::InfeasibleRatio);
}

TEST(FitAbsMomentIter, SingleTermEchoes) {
  const auto r = fit_absmoment_iter(LinComb({{1.7, 3.3}}));
  EXPECT_EQ(r.fitted, td::ScaledT(1.7, 3.3));
  EXPECT_EQ(r.iterations, 0u);
}

TEST(FitAbsMomentIter, PairEqualsDirect) {
  const TTerm a{0.8, 3.5}, b{1.9, 7.0};
  const LinComb z({a, b});
  const auto it = fit_absmoment_iter(z);
  const auto direct = fit_absmoment_k2(lc::second_moment(z), lc::abs_moment_k2(a, b).value);
  EXPECT_EQ(it.fitted, direct.fitted);
  EXPECT_EQ(it.iterations, 1u);
  ASSERT_TRUE(it.series.has_value());
}

TEST(FitAbsMomentIter, StaircaseK7Ks) {
  const auto z = staircase(7);
  const auto r = fit_absmoment_iter(z);
  EXPECT_EQ(r.iterations, 6u);
  EXPECT_LT(mc::ks_distance(mc::sample_z(z, 1'000'000, 1), r.fitted), 0.01);
}

TEST(FitAbsMomentIter, StepIndexInErrors) {
  try {
    fit_absmoment_iter(LinComb({{1, 5}, {0.01, 4}}), {1e-12, 100});
    ADD_FAILURE();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::NonConvergence);
    EXPECT_NE(std::string(e.what()).find("step 1"), std::string::npos) << e.what();
  }
}

TEST(FitCfClosed, PureScaledTRecovery) {
  const auto r = fit_cf_closed(LinComb({{1.0, 5.0}}));
  EXPECT_EQ(r.method, FitMethod::CfClosed);
  EXPECT_NEAR(r.fitted.nu(), 5.0, 0.02 * 5.0);
  EXPECT_NEAR(r.fitted.sigma(), 1.0, 0.01);
  ASSERT_TRUE(r.r_used.has_value());
  EXPECT_DOUBLE_EQ(*r.r_used, 1.0 / std::sqrt(5.0 / 3.0));
}

TEST(FitCfClosed, ClosedFormInvertsApproximation) {
  const auto g = cf_approx();
  for (double nu : {2.5, 4.0, 9.0, 30.0}) {
    // a K=1 input whose c equals the approximation at nu
    double lo = 2.0 + 1e-9, hi = 1e6;
    for (int i = 0; i < 200; ++i) {
      const double mid = std::sqrt(lo * hi);
      (g_exact(mid, 1.0) > g(nu) ? lo : hi) = mid;
    }
    const auto r = fit_cf_closed(LinComb({{1.0, lo}}));
    EXPECT_NEAR(r.fitted.nu(), nu, 1e-6 * nu);
  }
}

TEST(FitCfClosed, InfeasibleCf) {
  // Gaussian-like input: c falls to e^-1/2 < 0.607
  EXPECT_EQ(kind_of([] { fit_cf_closed(LinComb({{1.0, 1e4}})); }), ErrorKind::InfeasibleCf);
  // c -> 1 as nu -> 2
  EXPECT_EQ(kind_of([] { fit_cf_closed(LinComb({{1.0, 2.0 + 1e-14}})); }), ErrorKind::InfeasibleCf);
}

TEST(FitCfBisect, RecoversPureScaledT) {
  for (double nu : {2.5, 3.0, 5.0, 10.0, 20.0}) {
    const LinComb z({{1.5, nu}});
    for (double r : {0.1, 0.5, 1.0}) {
      const auto f = fit_cf_bisect(z, r);
      EXPECT_NEAR(f.fitted.nu(), nu, 1e-6 * nu);
      EXPECT_NEAR(f.fitted.sigma(), 1.5, 1e-7);
      ASSERT_TRUE(f.bisection.has_value());
      EXPECT_LE(f.bisection->hi - f.bisection->lo, kBisectWidth);
    }
  }
}

TEST(FitCfBisect, AgreesWithClosedForm) {
  for (int k : {2, 4, 7}) {
    const auto z = staircase(k);
    const double r = 1.0 / std::sqrt(lc::second_moment(z));
    const double closed = fit_cf_closed(z).fitted.nu();
    const double bis = fit_cf_bisect(z, r).fitted.nu();
    if (bis > 2.2 && bis < 50.0) EXPECT_LE(std::fabs(closed - bis), 0.1) << k;
  }
}

TEST(FitCfBisect, BracketHoldsForStaircase) {
  const auto z = staircase(4);
  const double m2 = lc::second_moment(z);
  const double r = 1.0 / std::sqrt(m2);
  const double c = lc::cf_z(z, r);
  EXPECT_LT(c, g_exact(kBisectNuMin, r * std::sqrt(m2)));
  EXPECT_GT(c, g_exact(kBisectNuMax, r * std::sqrt(m2)));
}

TEST(FitCfBisect, NoSolution) {
  EXPECT_EQ(kind_of([] { fit_cf_bisect(staircase(4), 1e6); }), ErrorKind::NoSolution);
  EXPECT_EQ(kind_of([] { fit_cf_bisect(staircase(4), 0.0); }), ErrorKind::Domain);
}

TEST(FitCfBisect, EffectivelyGaussian) {
  const auto f = fit_cf_bisect(LinComb::iid(1.0, 50.0, 400), 0.05);
  EXPECT_EQ(f.fitted.nu(), kBisectNuMax);
  ASSERT_TRUE(f.bisection.has_value());
  EXPECT_TRUE(f.bisection->effectively_gaussian);
}

TEST(FitMoment4, Examples) {
  const auto r = fit_moment4(LinComb({{1.0, 6.0}}));
  EXPECT_NEAR(r.fitted.nu(), 6.0, 1e-10);
  EXPECT_NEAR(r.fitted.sigma(), 1.0, 1e-10);
  // kurtosis 6 for the i.i.d. nu = 5 pair, hence nu_z = 6
  const auto p = fit_moment4(LinComb({{1, 5}, {1, 5}}));
  EXPECT_NEAR(p.fitted.nu(), 6.0, 1e-12);
  EXPECT_NEAR(p.fitted.sigma(), std::sqrt(10.0 / 3.0 * 4.0 / 6.0), 1e-12);
  EXPECT_EQ(kind_of([] { fit_moment4(LinComb({{1, 4.0}, {1, 6}})); }), ErrorKind::Nonexistence);
}

TEST(FitMoment4, KurtosisAgainstMonteCarlo) {
  // sample kurtosis of the pair (nu = 9 keeps the estimator's variance finite)
  const LinComb z({{1, 9}, {1, 9}});
  const auto s = mc::sample_z(z, 10'000'000, 12);
  double m2 = 0.0, m4 = 0.0;
  for (double x : s) {
    m2 += x * x;
    m4 += x * x * x * x;
  }
  m2 /= s.size();
  m4 /= s.size();
  const double k_exact = lc::fourth_moment(z) / std::pow(lc::second_moment(z), 2);
  EXPECT_GT(m4 / (m2 * m2), 3.0);
  EXPECT_NEAR(m4 / (m2 * m2), k_exact, 0.05 * k_exact);
}

TEST(Fit, DispatchAndDefaultR) {
  const auto z = staircase(3);
  EXPECT_EQ(fit(z, FitMethod::CfClosed).fitted, fit_cf_closed(z).fitted);
  const double r0 = 1.0 / std::sqrt(lc::second_moment(z));
  EXPECT_EQ(fit(z, FitMethod::CfBisect).fitted, fit_cf_bisect(z, r0).fitted);
  EXPECT_EQ(fit(z, FitMethod::CfBisect, 0.3).fitted, fit_cf_bisect(z, 0.3).fitted);
  EXPECT_EQ(fit(z, FitMethod::AbsMoment).fitted, fit_absmoment_iter(z).fitted);
}

// Invariants over random inputs

class RandomInputs : public ::testing::Test {
 protected:
  std::vector<LinComb> make(double nu_lo, double nu_hi, int count, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> us(0.2, 3.0), un(nu_lo, nu_hi);
    std::vector<LinComb> out;
    for (int i = 0; i < count; ++i) {
      std::vector<TTerm> t;
      const int k = 1 + i % 5;
      for (int j = 0; j < k; ++j) t.push_back({us(rng), un(rng)});
      out.emplace_back(t);
    }
    return out;
  }
};

TEST_F(RandomInputs, ClosedAndBisectAgree) {
  for (const auto& z : make(2.5, 20.0, 60, 1)) {
    const double r = 1.0 / std::sqrt(lc::second_moment(z));
    EXPECT_LE(std::fabs(fit_cf_closed(z).fitted.nu() - fit_cf_bisect(z, r).fitted.nu()), 0.15);
  }
}

TEST_F(RandomInputs, SecondMomentPreserved) {
  for (const auto& z : make(4.2, 20.0, 60, 2)) {
    const double m2 = lc::second_moment(z);
    for (auto m : {FitMethod::AbsMoment, FitMethod::CfBisect, FitMethod::Moment4}) {
      const auto r = fit(z, m);
      EXPECT_NEAR(implied_m2(r), m2, 1e-9 * m2) << to_string(m);
      EXPECT_GT(r.fitted.nu(), 2.0);
      EXPECT_GT(r.fitted.sigma(), 0.0);
    }
  }
}

// sigma_z of the CF closed form comes from its own rounded constants
TEST_F(RandomInputs, SecondMomentPreservedByCfClosed) {
  for (const auto& z : make(2.5, 20.0, 60, 2)) {
    const double m2 = lc::second_moment(z);
    EXPECT_NEAR(implied_m2(fit_cf_closed(z)), m2, 1e-9 * m2);
  }
}

TEST_F(RandomInputs, ScaleEquivariance) {
  for (const auto& z : make(4.2, 20.0, 30, 3)) {
    for (double c : {0.05, 3.0, 40.0}) {
      std::vector<TTerm> t(z.terms().begin(), z.terms().end());
      for (auto& x : t) x.sigma *= c;
      const LinComb zs(t);
      for (auto m : {FitMethod::AbsMoment, FitMethod::CfClosed, FitMethod::CfBisect, FitMethod::Moment4}) {
        const auto a = fit(z, m);
        const auto b = fit(zs, m);
        EXPECT_NEAR(b.fitted.nu(), a.fitted.nu(), 1e-9 * a.fitted.nu()) << to_string(m);
        EXPECT_NEAR(b.fitted.sigma(), c * a.fitted.sigma(), 1e-9 * c * a.fitted.sigma()) << to_string(m);
        if (a.r_used) {
          ASSERT_TRUE(b.r_used.has_value());
          EXPECT_NEAR(*b.r_used, *a.r_used / c, 1e-12 * *a.r_used / c);
        }
      }
    }
  }
}
