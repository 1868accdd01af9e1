#pragma once

#include <string>

#include <nlohmann/json.hpp>

#include "tlincomb/fitting.hpp"
#include "tlincomb/lincomb.hpp"
#include "tlincomb/sweep.hpp"

// JSON and CSV forms of results. JSON is the complete record; CSV carries
// the flat sweep columns only.

namespace tlincomb::report {

using nlohmann::json;

json to_json(const lincomb::SeriesDiag& d);
json to_json(const fitting::BisectionTrace& t);
json to_json(const fitting::FitReport& r);
json to_json(const lincomb::LinComb& zc);

/// Reads what to_json(FitReport) wrote. Only the fitted law, method and
/// r_used are restored. Throws InvariantViolation on malformed input.
fitting::FitReport fit_report_from_json(const json& j);

/// Sweep rows plus run metadata (seed, n, bins, version).
json to_json(const mceval::SweepTable& t);

/// Header "nu,K,r,method,sigma_z,nu_z,d_b,ks,status" and one line per row.
/// Missing values are empty fields.
std::string to_csv(const mceval::SweepTable& t);

/// {seed, n, bins, version}.
json run_metadata(std::uint64_t seed, std::size_t n, std::size_t bins);

}  // namespace tlincomb::report
