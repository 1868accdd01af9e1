#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "tlincomb/fitting.hpp"
#include "tlincomb/mceval.hpp"

// Parameter sweeps over i.i.d. sums of unit-scale t terms. Each (nu, K)
// cell draws its own Monte-Carlo sample from a seed derived from
// (seed, nu, K) alone, so results do not depend on scheduling.

namespace tlincomb::mceval {

struct SweepConfig {
  std::size_t n = kDefaultSamples;
  std::size_t bins = kDefaultBins;
  std::uint64_t seed = 1;
  unsigned threads = 0;  // 0: TLINCOMB_THREADS or hardware concurrency
};

struct SweepRow {
  double nu = 0.0;
  int k = 0;
  std::optional<double> r;
  fitting::FitMethod method = fitting::FitMethod::CfClosed;
  std::optional<double> sigma_z;
  std::optional<double> nu_z;
  std::optional<double> d_b;
  std::optional<double> ks;
  std::string status = "ok";  // "ok", "effectively_gaussian" or an error name
  std::string detail;         // error message when status is an error
};

struct ScalingEntry {
  double nu = 0.0;
  ScalingFit sigma_z;
  ScalingFit nu_z;
};

enum class SweepKind { Nu, K, R };

struct SweepTable {
  SweepKind kind = SweepKind::Nu;
  SweepConfig config;
  std::vector<SweepRow> rows;
  std::vector<ScalingEntry> scaling;  // sweep_k only
};

std::string_view to_string(SweepKind kind);

/// Seed of the Monte-Carlo sample for the i.i.d. cell (nu, K).
std::uint64_t cell_seed(std::uint64_t seed, double nu, int k);

/// requested (or the hardware concurrency when 0), capped by TLINCOMB_THREADS.
unsigned resolve_threads(unsigned requested);

/// One row per (nu, K, method), i.i.d. sigma = 1 terms.
SweepTable sweep_nu(const std::vector<double>& nu_grid, const std::vector<int>& k_set,
                    const std::vector<fitting::FitMethod>& methods, const SweepConfig& cfg);

/// CF_CLOSED fits per (K, nu) and the power-law scaling of each trace.
SweepTable sweep_k(const std::vector<int>& k_grid, const std::vector<double>& nu_set,
                   const SweepConfig& cfg);

/// CF_BISECT fits at every r per (nu, K).
SweepTable sweep_r(const std::vector<double>& r_grid, const std::vector<double>& nu_set,
                   const std::vector<int>& k_set, const SweepConfig& cfg);

/// True if the smallest finite d_B among rows (taken in order) is neither
/// the first nor the last finite entry.
bool has_interior_minimum(const std::vector<SweepRow>& rows);

}  // namespace tlincomb::mceval
