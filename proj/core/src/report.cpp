#include "tlincomb/report.hpp"

#include <cstdio>
#include <cstdlib>
#include <sstream>

#include "tlincomb/errors.hpp"
#include "tlincomb/version.hpp"

namespace tlincomb::report {

namespace {

template <typename T>
json optional_value(const std::optional<T>& v) {
  return v ? json(*v) : json(nullptr);
}

// Shortest text that reads back to the same double.
std::string number(double v) {
  char buf[32];
  for (int prec = 15; prec <= 17; ++prec) {
    std::snprintf(buf, sizeof buf, "%.*g", prec, v);
    if (std::strtod(buf, nullptr) == v) break;
  }
  return buf;
}

std::string csv_field(const std::optional<double>& v) { return v ? number(*v) : std::string(); }

std::string csv_text(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

}  // namespace

json to_json(const lincomb::SeriesDiag& d) {
  return {{"terms_used", d.terms_used},
          {"last_rel_term", d.last_rel_term},
          {"tail_estimate", d.tail_estimate},
          {"converged", d.converged}};
}

json to_json(const fitting::BisectionTrace& t) {
  return {{"target", t.target},         {"r_e", t.r_e}, {"lo", t.lo}, {"hi", t.hi},
          {"iterations", t.iterations}, {"effectively_gaussian", t.effectively_gaussian}};
}

json to_json(const fitting::FitReport& r) {
  json diag = nullptr;
  if (r.series) diag = {{"series", to_json(*r.series)}};
  if (r.bisection) diag = {{"bisection", to_json(*r.bisection)}};
  return {{"sigma_z", r.fitted.sigma()},
          {"nu_z", r.fitted.nu()},
          {"method", fitting::to_string(r.method)},
          {"r_used", optional_value(r.r_used)},
          {"iterations", r.iterations},
          {"diagnostics", diag}};
}

json to_json(const lincomb::LinComb& zc) {
  json terms = json::array();
  for (const auto& t : zc.terms()) terms.push_back({{"sigma", t.sigma}, {"nu", t.nu}});
  return terms;
}

fitting::FitReport fit_report_from_json(const json& j) {
  try {
    const json& f = j.contains("fit") ? j.at("fit") : j;
    const auto method = fitting::parse_method(f.at("method").get<std::string>());
    if (!method) fail(ErrorKind::InvariantViolation, "unknown fit method in JSON");
    fitting::FitReport r{tdist::ScaledT(f.at("sigma_z").get<double>(), f.at("nu_z").get<double>()),
                         *method, std::nullopt, 0, std::nullopt, std::nullopt};
    if (f.contains("r_used") && !f.at("r_used").is_null()) r.r_used = f.at("r_used").get<double>();
    if (f.contains("iterations")) r.iterations = f.at("iterations").get<std::size_t>();
    return r;
  } catch (const json::exception& e) {
    fail(ErrorKind::InvariantViolation, std::string("malformed fit JSON: ") + e.what());
  }
}

json run_metadata(std::uint64_t seed, std::size_t n, std::size_t bins) {
  return {{"seed", seed}, {"n", n}, {"bins", bins}, {"version", std::string(version())}};
}

json to_json(const mceval::SweepTable& t) {
  json rows = json::array();
  for (const auto& row : t.rows) {
    json jr = {{"nu", row.nu},
               {"K", row.k},
               {"r", optional_value(row.r)},
               {"method", fitting::to_string(row.method)},
               {"sigma_z", optional_value(row.sigma_z)},
               {"nu_z", optional_value(row.nu_z)},
               {"d_b", optional_value(row.d_b)},
               {"ks", optional_value(row.ks)},
               {"status", row.status}};
    if (!row.detail.empty()) jr["detail"] = row.detail;
    rows.push_back(std::move(jr));
  }
  json out = {{"run", run_metadata(t.config.seed, t.config.n, t.config.bins)},
              {"sweep", mceval::to_string(t.kind)},
              {"rows", rows}};
  if (!t.scaling.empty()) {
    json sc = json::array();
    auto triple = [](const mceval::ScalingFit& f) {
      return json{{"gamma1", f.gamma1}, {"gamma2", f.gamma2}, {"gamma3", f.gamma3}, {"rss", f.rss}};
    };
    for (const auto& s : t.scaling) {
      sc.push_back({{"nu", s.nu}, {"sigma_z", triple(s.sigma_z)}, {"nu_z", triple(s.nu_z)}});
    }
    out["scaling"] = sc;
  }
  return out;
}

std::string to_csv(const mceval::SweepTable& t) {
  std::ostringstream os;
  os << "nu,K,r,method,sigma_z,nu_z,d_b,ks,status\n";
  for (const auto& row : t.rows) {
    os << number(row.nu) << ',' << row.k << ',' << csv_field(row.r) << ','
       << fitting::to_string(row.method) << ',' << csv_field(row.sigma_z) << ','
       << csv_field(row.nu_z) << ',' << csv_field(row.d_b) << ',' << csv_field(row.ks) << ','
       << csv_text(row.status) << '\n';
  }
  return os.str();
}

}  // namespace tlincomb::report
