#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "tlincomb/specfun.hpp"
#include "tlincomb/tdist.hpp"

// Exact statistics of Z = sum_i sigma_i T_i for independent Student's t
// addends T_i ~ T(nu_i).

namespace tlincomb::lincomb {

/// One addend sigma * T(nu). Construction checks sigma > 0 and nu > 0;
/// operations that need finite variance check nu > 2 themselves.
struct TTerm {
  double sigma;
  double nu;

  static TTerm make(double sigma, double nu);
  tdist::ScaledT as_scaled_t() const { return tdist::ScaledT(sigma, nu); }
  friend bool operator==(const TTerm&, const TTerm&) = default;
};

class LinComb {
 public:
  /// Throws InvariantViolation for an empty list or an invalid term.
  explicit LinComb(std::vector<TTerm> terms);

  std::span<const TTerm> terms() const { return terms_; }
  std::size_t size() const { return terms_.size(); }
  const TTerm& operator[](std::size_t i) const { return terms_[i]; }

  /// K copies of sigma * T(nu).
  static LinComb iid(double sigma, double nu, std::size_t k);

 private:
  std::vector<TTerm> terms_;
};

/// Truncation record of the absolute-moment series.
struct SeriesDiag {
  std::size_t terms_used = 0;
  double last_rel_term = 0.0;  // i * |last change| / |tail-completed sum|
  double tail_estimate = 0.0;  // estimated remainder / partial sum
  bool converged = false;
};

/// sum_i sigma_i^2 nu_i / (nu_i - 2). InvariantViolation if any nu_i <= 2.
double second_moment(const LinComb& zc);

/// E[Z^4] by multinomial expansion. Nonexistence if any nu_i <= 4.
double fourth_moment(const LinComb& zc);

/// Product of the addend characteristic functions, accumulated in logs.
double cf_z(const LinComb& zc, double r);
double log_cf_z(const LinComb& zc, double r);

struct AbsMoment {
  double value;
  SeriesDiag diag;
};

/// E|sigma_1 T_1 + sigma_2 T_2| in closed form plus one convergent series.
/// The addends are ordered internally so that the hypergeometric factors are
/// evaluated in their fast-converging region; the result is symmetric.
/// Throws NonConvergence if acc.max_terms is exhausted.
AbsMoment abs_moment_k2(const TTerm& t1, const TTerm& t2,
                        const specfun::Accuracy& acc = {});

/// The K=2 absolute moment with the addends used exactly in the order given.
/// Exposed so the two orderings can be checked against each other.
AbsMoment abs_moment_k2_ordered(const TTerm& t1, const TTerm& t2,
                                const specfun::Accuracy& acc = {});

/// First `count` partial sums of the series part of the K=2 absolute moment
/// (the sum over i in the I'_{2,2} expansion, without its prefactor), in the
/// order given. Used to study truncation error.
std::vector<double> abs_moment_series_partial_sums(const TTerm& t1, const TTerm& t2,
                                                   std::size_t count);

/// Closed-form E|sigma T_1 + sigma T_2| for i.i.d. addends. Only k = 2 is
/// supported (Unsupported otherwise).
double abs_moment_iid(double sigma, double nu, int k = 2);

}  // namespace tlincomb::lincomb
