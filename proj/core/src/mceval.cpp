#include "tlincomb/mceval.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include <boost/math/tools/minima.hpp>

#include "tlincomb/errors.hpp"

namespace tlincomb::mceval {

Histogram Histogram::shifted(double offset) const {
  Histogram out = *this;
  for (double& e : out.edges) e += offset;
  return out;
}

double ScalingFit::operator()(double k) const { return gamma1 * std::pow(k, gamma2) + gamma3; }

std::vector<double> sample_z(const lincomb::LinComb& zc, std::size_t n, std::uint64_t seed) {
  if (n < 1) fail(ErrorKind::Domain, "sample size must be at least 1");
  std::vector<double> out(n);
  for (std::size_t i = 0; i < zc.size(); ++i) {
    tdist::accumulate_samples(zc[i].as_scaled_t(), tdist::stream_seed(seed, i), out, i > 0);
  }
  return out;
}

Histogram build_histogram(std::span<const double> samples, std::size_t bins) {
  if (samples.empty()) fail(ErrorKind::Domain, "histogram of an empty sample");
  if (bins < 10) fail(ErrorKind::Domain, "histogram needs at least 10 bins");
  std::vector<double> sorted(samples.begin(), samples.end());
  std::sort(sorted.begin(), sorted.end());
  const double last = static_cast<double>(sorted.size() - 1);
  const double lo = sorted[static_cast<std::size_t>(std::floor(kSpanLow * last))];
  const double hi = sorted[static_cast<std::size_t>(std::ceil(kSpanHigh * last))];
  if (!(hi > lo)) {
    fail(ErrorKind::DegenerateRange, "sample quantile span is empty (all values equal?)");
  }

  Histogram h;
  h.n_samples = samples.size();
  h.edges.resize(bins + 1);
  const double width = (hi - lo) / static_cast<double>(bins);
  for (std::size_t i = 0; i <= bins; ++i) h.edges[i] = lo + width * static_cast<double>(i);
  h.edges.back() = hi;

  std::vector<std::size_t> counts(bins, 0);
  std::size_t below = 0, above = 0;
  for (double x : sorted) {
    if (x < lo) {
      ++below;
    } else if (x >= hi) {
      ++above;
    } else {
      auto idx = static_cast<std::size_t>((x - lo) / width);
      idx = std::min(idx, bins - 1);
      // Floating-point division can land one bin off near an edge.
      if (x < h.edges[idx]) --idx;
      else if (idx + 1 < bins && x >= h.edges[idx + 1]) ++idx;
      ++counts[idx];
    }
  }
  const double n = static_cast<double>(h.n_samples);
  h.masses.resize(bins);
  for (std::size_t i = 0; i < bins; ++i) h.masses[i] = static_cast<double>(counts[i]) / n;
  h.underflow = static_cast<double>(below) / n;
  h.overflow = static_cast<double>(above) / n;
  return h;
}

BhattaEstimate bhattacharyya(const Histogram& h, const tdist::ScaledT& fit, std::uint64_t seed) {
  double coef = 0.0;
  double prev_cdf = tdist::cdf(fit, h.edges.front());
  coef += std::sqrt(h.underflow * prev_cdf);
  for (std::size_t i = 0; i < h.bins(); ++i) {
    const double next_cdf = tdist::cdf(fit, h.edges[i + 1]);
    coef += std::sqrt(h.masses[i] * std::max(0.0, next_cdf - prev_cdf));
    prev_cdf = next_cdf;
  }
  coef += std::sqrt(h.overflow * tdist::survival(fit, h.edges.back()));
  coef = std::min(coef, 1.0);

  BhattaEstimate out;
  out.coefficient = coef;
  out.d_b = coef > 0.0 ? -std::log(coef) : std::numeric_limits<double>::infinity();
  out.bins = h.bins();
  out.n_samples = h.n_samples;
  out.seed = seed;
  return out;
}

double ks_distance_sorted(std::span<const double> sorted, const tdist::ScaledT& fit) {
  if (sorted.empty()) fail(ErrorKind::Domain, "KS distance of an empty sample");
  const double n = static_cast<double>(sorted.size());
  double d = 0.0;
  std::size_t i = 0;
  while (i < sorted.size()) {
    std::size_t j = i + 1;
    while (j < sorted.size() && sorted[j] == sorted[i]) ++j;
    const double f = tdist::cdf(fit, sorted[i]);
    d = std::max({d, f - static_cast<double>(i) / n, static_cast<double>(j) / n - f});
    i = j;
  }
  return std::min(d, 1.0);
}

double ks_distance(std::span<const double> samples, const tdist::ScaledT& fit) {
  std::vector<double> sorted(samples.begin(), samples.end());
  std::sort(sorted.begin(), sorted.end());
  return ks_distance_sorted(sorted, fit);
}

ScalingFit fit_scaling(std::span<const double> k, std::span<const double> y) {
  if (k.size() != y.size() || k.size() < 3) {
    fail(ErrorKind::Domain, "scaling fit needs at least three (K, value) pairs");
  }
  const double n = static_cast<double>(k.size());
  auto solve = [&](double g2) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < k.size(); ++i) {
      const double x = std::pow(k[i], g2);
      sx += x;
      sy += y[i];
      sxx += x * x;
      sxy += x * y[i];
    }
    ScalingFit f;
    f.gamma2 = g2;
    const double det = n * sxx - sx * sx;
    f.gamma1 = det != 0.0 ? (n * sxy - sx * sy) / det : 0.0;
    f.gamma3 = (sy - f.gamma1 * sx) / n;
    for (std::size_t i = 0; i < k.size(); ++i) {
      const double e = f(k[i]) - y[i];
      f.rss += e * e;
    }
    return f;
  };
  // Coarse scan for the basin, then Brent inside it.
  constexpr double kLo = 1e-3, kHi = 3.0;
  constexpr int kScan = 300;
  const double step = (kHi - kLo) / kScan;
  double best_g2 = kLo;
  double best_rss = std::numeric_limits<double>::infinity();
  for (int i = 0; i <= kScan; ++i) {
    const double g2 = kLo + step * i;
    const double rss = solve(g2).rss;
    if (rss < best_rss) {
      best_rss = rss;
      best_g2 = g2;
    }
  }
  std::uintmax_t max_iter = 500;
  const auto best = boost::math::tools::brent_find_minima(
      [&](double g2) { return solve(g2).rss; }, std::max(kLo, best_g2 - step),
      std::min(kHi, best_g2 + step), 40, max_iter);
  return solve(best.first);
}

}  // namespace tlincomb::mceval
