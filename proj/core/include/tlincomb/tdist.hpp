#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

namespace tlincomb::tdist {

/// sigma * T(nu): Student's t with nu degrees of freedom, scaled by sigma.
class ScaledT {
 public:
  /// Throws InvariantViolation unless sigma > 0 and nu > 0 (both finite).
  ScaledT(double sigma, double nu);

  double sigma() const { return sigma_; }
  double nu() const { return nu_; }

  /// Normalising constant of the unit-scale density,
  /// Gamma((nu+1)/2) / (Gamma(nu/2) sqrt(nu pi)).
  double alpha() const;

  friend bool operator==(const ScaledT&, const ScaledT&) = default;

 private:
  double sigma_;
  double nu_;
};

double pdf(const ScaledT& d, double x);
double log_pdf(const ScaledT& d, double x);
double cdf(const ScaledT& d, double x);

/// Upper tail P(X > x), without the cancellation of 1 - cdf.
double survival(const ScaledT& d, double x);

/// Inverse CDF for p in (0, 1), to |cdf(x) - p| <= 1e-12.
double quantile(const ScaledT& d, double p);

/// E[X^m] for a positive integer m < nu. Throws Nonexistence otherwise.
double moment(const ScaledT& d, int m);

/// E[|X|^m] for real 0 < m < nu. Throws Nonexistence for m >= nu.
double abs_moment(const ScaledT& d, double m);

/// Characteristic function E[exp(i r X)] (real, even in r, 1 at r = 0).
double cf(const ScaledT& d, double r);
double log_cf(const ScaledT& d, double r);

/// ln of (a^(nu/2) K_{nu/2}(a)) / (2^(nu/2 - 1) Gamma(nu/2)); the t
/// characteristic function with a = sqrt(nu) sigma |r|. Zero at a = 0.
double log_cf_kernel(double nu, double a);

/// n i.i.d. draws of sigma * G / sqrt(C / nu), with G standard normal and
/// C chi-square(nu). The generator is seeded from stream_seed(seed, 0).
std::vector<double> sample(const ScaledT& d, std::size_t n, std::uint64_t seed);

/// Deterministic seed for the stream'th independent generator derived from
/// a user seed (splitmix64 mixing of both words).
std::uint64_t stream_seed(std::uint64_t seed, std::uint64_t stream);

/// Appends sigma-scaled t draws from an already-seeded 64-bit engine state.
/// Used by sample() and by the linear-combination sampler.
void accumulate_samples(const ScaledT& d, std::uint64_t engine_seed,
                        std::vector<double>& out, bool add);

}  // namespace tlincomb::tdist
