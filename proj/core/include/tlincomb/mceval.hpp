#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "tlincomb/lincomb.hpp"
#include "tlincomb/tdist.hpp"

// Monte-Carlo reference for Z and the distances used to score a fit.

namespace tlincomb::mceval {

inline constexpr std::size_t kDefaultBins = 1000;
inline constexpr std::size_t kDefaultSamples = 1'000'000;
inline constexpr double kSpanLow = 0.0005;
inline constexpr double kSpanHigh = 0.9995;

/// Equal-width bins over an empirical quantile span plus two tail cells.
struct Histogram {
  std::vector<double> edges;   // bins + 1, strictly increasing
  std::vector<double> masses;  // bins
  std::size_t n_samples = 0;
  double underflow = 0.0;  // mass below edges.front()
  double overflow = 0.0;   // mass at or above edges.back()

  std::size_t bins() const { return masses.size(); }
  /// The same masses over edges moved by offset.
  Histogram shifted(double offset) const;
};

struct BhattaEstimate {
  double d_b = 0.0;
  double coefficient = 1.0;  // sum sqrt(p q)
  std::size_t bins = 0;
  std::size_t n_samples = 0;
  std::uint64_t seed = 0;
};

/// gamma1 K^gamma2 + gamma3.
struct ScalingFit {
  double gamma1 = 0.0;
  double gamma2 = 0.0;
  double gamma3 = 0.0;
  double rss = 0.0;

  double operator()(double k) const;
};

/// n draws of Z; term i draws from the stream stream_seed(seed, i).
std::vector<double> sample_z(const lincomb::LinComb& zc, std::size_t n, std::uint64_t seed);

/// bins >= 10, samples non-empty. DegenerateRange if the span is empty.
Histogram build_histogram(std::span<const double> samples, std::size_t bins = kDefaultBins);

/// Binned Bhattacharyya distance between the histogram and the fitted law,
/// tail cells included. seed is carried through for the record only.
BhattaEstimate bhattacharyya(const Histogram& h, const tdist::ScaledT& fit,
                             std::uint64_t seed = 0);

/// Kolmogorov-Smirnov distance. The _sorted variant expects ascending input.
double ks_distance(std::span<const double> samples, const tdist::ScaledT& fit);
double ks_distance_sorted(std::span<const double> sorted, const tdist::ScaledT& fit);

/// Least squares fit of gamma1 K^gamma2 + gamma3 with gamma2 searched on
/// (0, 3]. Needs at least three points.
ScalingFit fit_scaling(std::span<const double> k, std::span<const double> y);

}  // namespace tlincomb::mceval
