#include "tlincomb_cli/cli.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>
#include <stdexcept>

#include <CLI11.hpp>

#include "tlincomb/errors.hpp"
#include "tlincomb/mceval.hpp"
#include "tlincomb/report.hpp"
#include "tlincomb/sweep.hpp"
#include "tlincomb/version.hpp"

namespace tlincomb::cli {

namespace {

using report::json;

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

double parse_real(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  double v = 0.0;
  const auto* end = s.data() + s.size();
  const auto [ptr, ec] = std::from_chars(s.data(), end, v);
  if (ec != std::errc() || ptr != end || s.empty()) {
    throw std::invalid_argument("not a number: '" + std::string(s) + "'");
  }
  return v;
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    out.push_back(s.substr(start, pos == std::string_view::npos ? s.npos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

struct Options {
  std::string terms;
  std::string method = "CF_CLOSED";
  std::optional<double> r;
  std::size_t n = mceval::kDefaultSamples;
  std::size_t bins = mceval::kDefaultBins;
  std::uint64_t seed = 1;
  std::string out;
  std::string format = "json";
  std::string grid;
  bool eval = false;
  std::string fit_json;
  std::string sweep;
  std::string k_list;
  std::string nu_list;
  std::string methods;
  unsigned threads = 0;
};

json config_json(const Options& o, const std::vector<lincomb::TTerm>& terms) {
  json t = json::array();
  for (const auto& term : terms) t.push_back({{"sigma", term.sigma}, {"nu", term.nu}});
  return {{"terms", t},     {"method", o.method}, {"r", o.r ? json(*o.r) : json(nullptr)},
          {"n", o.n},       {"bins", o.bins},     {"seed", o.seed},
          {"format", o.format}, {"version", std::string(version())}};
}

void emit(const Options& o, const std::string& text, std::ostream& out) {
  if (o.out.empty()) {
    out << text;
    return;
  }
  std::ofstream f(o.out, std::ios::binary);
  if (!f) throw IoError("cannot open '" + o.out + "' for writing");
  f << text;
  if (!f) throw IoError("write to '" + o.out + "' failed");
}

void check_format(const Options& o) {
  if (o.format != "json" && o.format != "csv") {
    throw std::invalid_argument("--format must be json or csv");
  }
}

lincomb::LinComb load_terms(const Options& o) {
  if (o.terms.empty()) throw std::invalid_argument("--terms is required");
  return lincomb::LinComb(parse_terms(o.terms));
}

json evaluate(const lincomb::LinComb& zc, const tdist::ScaledT& fit, const Options& o) {
  auto samples = mceval::sample_z(zc, o.n, o.seed);
  std::sort(samples.begin(), samples.end());
  const auto hist = mceval::build_histogram(samples, o.bins);
  const auto bh = mceval::bhattacharyya(hist, fit, o.seed);
  return {{"d_b", bh.d_b},
          {"ks", mceval::ks_distance_sorted(samples, fit)},
          {"n", o.n},
          {"bins", o.bins},
          {"seed", o.seed}};
}

std::string fit_csv(const json& j) {
  std::ostringstream os;
  const json& f = j.at("fit");
  os << "sigma_z,nu_z,method,r_used";
  if (j.contains("eval")) os << ",d_b,ks";
  os << '\n' << f.at("sigma_z").dump() << ',' << f.at("nu_z").dump() << ','
     << f.at("method").get<std::string>() << ',' << (f.at("r_used").is_null() ? "" : f.at("r_used").dump());
  if (j.contains("eval")) os << ',' << j["eval"]["d_b"].dump() << ',' << j["eval"]["ks"].dump();
  os << '\n';
  return os.str();
}

int cmd_stats(const Options& o, std::ostream& out) {
  check_format(o);
  const auto zc = load_terms(o);
  const double m2 = lincomb::second_moment(zc);
  json j = {{"config", config_json(o, {zc.terms().begin(), zc.terms().end()})},
            {"K", zc.size()},
            {"second_moment", m2}};
  if (zc.size() == 1) {
    j["abs_moment"] = tdist::abs_moment(zc[0].as_scaled_t(), 1.0);
  } else if (zc.size() == 2) {
    const auto am = lincomb::abs_moment_k2(zc[0], zc[1]);
    j["abs_moment"] = am.value;
    j["series"] = report::to_json(am.diag);
  } else {
    j["abs_moment"] = nullptr;
    j["abs_moment_note"] = "via iterative fit only";
  }
  try {
    j["fourth_moment"] = lincomb::fourth_moment(zc);
  } catch (const Error&) {
    j["fourth_moment"] = nullptr;
  }
  std::vector<double> rs;
  if (!o.grid.empty()) {
    rs = parse_grid(o.grid);
  } else {
    rs.push_back(o.r.value_or(1.0 / std::sqrt(m2)));
  }
  json cf = json::array();
  for (double r : rs) cf.push_back({{"r", r}, {"cf", lincomb::cf_z(zc, r)}});
  j["cf"] = cf;

  if (o.format == "csv") {
    std::ostringstream os;
    os << "quantity,value\n"
       << "second_moment," << j["second_moment"].dump() << '\n'
       << "abs_moment," << (j["abs_moment"].is_null() ? "" : j["abs_moment"].dump()) << '\n'
       << "fourth_moment," << (j["fourth_moment"].is_null() ? "" : j["fourth_moment"].dump()) << '\n';
    for (const auto& c : cf) os << "cf(" << c["r"].dump() << ")," << c["cf"].dump() << '\n';
    emit(o, os.str(), out);
  } else {
    emit(o, j.dump(2) + "\n", out);
  }
  return kOk;
}

fitting::FitMethod method_of(const Options& o) {
  const auto m = fitting::parse_method(o.method);
  if (!m) throw std::invalid_argument("unknown method '" + o.method + "'");
  if (o.r && *m != fitting::FitMethod::CfBisect) {
    throw std::invalid_argument("--r is only valid with --method CF_BISECT");
  }
  if (o.r && !(*o.r > 0.0)) throw std::invalid_argument("--r must be positive");
  return *m;
}

int cmd_fit(const Options& o, std::ostream& out) {
  check_format(o);
  const auto zc = load_terms(o);
  const auto method = method_of(o);
  const auto rep = fitting::fit(zc, method, o.r);
  json j = {{"config", config_json(o, {zc.terms().begin(), zc.terms().end()})},
            {"fit", report::to_json(rep)}};
  if (o.eval) j["eval"] = evaluate(zc, rep.fitted, o);
  emit(o, o.format == "csv" ? fit_csv(j) : j.dump(2) + "\n", out);
  return kOk;
}

int cmd_eval(const Options& o, std::ostream& out) {
  check_format(o);
  if (o.fit_json.empty()) throw std::invalid_argument("--fit-json is required");
  std::ifstream f(o.fit_json);
  if (!f) throw IoError("cannot read '" + o.fit_json + "'");
  json parsed;
  try {
    parsed = json::parse(f);
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("invalid JSON in --fit-json: ") + e.what());
  }
  const auto rep = report::fit_report_from_json(parsed);
  auto zc = [&] {
    if (!o.terms.empty() || !parsed.contains("config") || !parsed["config"].contains("terms")) return load_terms(o);
    std::vector<lincomb::TTerm> terms;
    try {
      for (const auto& t : parsed["config"]["terms"])
        terms.push_back({t.at("sigma").get<double>(), t.at("nu").get<double>()});
    } catch (const json::exception& e) {
      throw std::invalid_argument(std::string("bad config.terms in --fit-json: ") + e.what());
    }
    return lincomb::LinComb(terms);
  }();
  json j = {{"config", config_json(o, {zc.terms().begin(), zc.terms().end()})},
            {"fit", report::to_json(rep)},
            {"eval", evaluate(zc, rep.fitted, o)}};
  emit(o, o.format == "csv" ? fit_csv(j) : j.dump(2) + "\n", out);
  return kOk;
}

std::vector<int> parse_k_list(std::string_view text) {
  std::vector<int> out;
  for (double v : parse_list(text)) {
    if (v < 1 || v != std::floor(v) || v > 1e6) throw std::invalid_argument("K values must be positive integers");
    out.push_back(static_cast<int>(v));
  }
  return out;
}

void write_sweep_summary(const mceval::SweepTable& t, std::ostream& os) {
  using mceval::SweepKind;
  // Group rows by (nu, K) in table order.
  std::vector<std::pair<std::size_t, std::size_t>> groups;
  for (std::size_t i = 0; i < t.rows.size(); ++i) {
    if (groups.empty() || t.rows[i].nu != t.rows[groups.back().first].nu ||
        t.rows[i].k != t.rows[groups.back().first].k) {
      groups.push_back({i, i + 1});
    } else {
      groups.back().second = i + 1;
    }
  }
  for (const auto& [b, e] : groups) {
    const auto& first = t.rows[b];
    os << "nu=" << first.nu << " K=" << first.k << ": ";
    if (t.kind == SweepKind::R) {
      std::vector<mceval::SweepRow> cell(t.rows.begin() + b, t.rows.begin() + e);
      os << "interior_minimum=" << (mceval::has_interior_minimum(cell) ? "true" : "false");
    } else if (t.kind == SweepKind::Nu) {
      const mceval::SweepRow* best = nullptr;
      for (std::size_t i = b; i < e; ++i) {
        if (t.rows[i].d_b && (!best || *t.rows[i].d_b < *best->d_b)) best = &t.rows[i];
      }
      os << "best=" << (best ? fitting::to_string(best->method) : "none");
    } else {
      os << "sigma_z=" << (first.sigma_z ? std::to_string(*first.sigma_z) : "-")
         << " nu_z=" << (first.nu_z ? std::to_string(*first.nu_z) : "-");
    }
    os << '\n';
  }
  for (const auto& s : t.scaling) {
    os << "nu=" << s.nu << " scaling sigma_z: gamma=(" << s.sigma_z.gamma1 << ", "
       << s.sigma_z.gamma2 << ", " << s.sigma_z.gamma3 << ") nu_z: gamma=(" << s.nu_z.gamma1
       << ", " << s.nu_z.gamma2 << ", " << s.nu_z.gamma3 << ")\n";
  }
}

int cmd_sweep(const Options& o, std::ostream& out, std::ostream& err) {
  check_format(o);
  if (o.grid.empty()) throw std::invalid_argument("--grid is required");
  mceval::SweepConfig cfg{o.n, o.bins, o.seed, o.threads};
  if (cfg.n < 1) throw std::invalid_argument("--n must be at least 1");
  const auto grid = parse_grid(o.grid);
  const std::vector<double> default_nu{2.5, 5.0, 10.0};
  const std::vector<int> default_k{3, 12};
  const auto nus = o.nu_list.empty() ? default_nu : parse_list(o.nu_list);
  const auto ks = o.k_list.empty() ? default_k : parse_k_list(o.k_list);

  mceval::SweepTable table;
  if (o.sweep == "nu") {
    std::vector<fitting::FitMethod> methods{fitting::FitMethod::AbsMoment,
                                            fitting::FitMethod::CfClosed,
                                            fitting::FitMethod::Moment4};
    if (!o.methods.empty()) {
      methods.clear();
      for (auto name : split(o.methods, ',')) {
        const auto m = fitting::parse_method(name);
        if (!m) throw std::invalid_argument("unknown method '" + std::string(name) + "'");
        methods.push_back(*m);
      }
    }
    table = mceval::sweep_nu(grid, ks, methods, cfg);
  } else if (o.sweep == "K" || o.sweep == "k") {
    std::vector<int> kgrid;
    for (double v : grid) {
      if (v < 1 || v != std::floor(v)) throw std::invalid_argument("K grid must hold positive integers");
      kgrid.push_back(static_cast<int>(v));
    }
    table = mceval::sweep_k(kgrid, nus, cfg);
  } else if (o.sweep == "r") {
    table = mceval::sweep_r(grid, nus, ks, cfg);
  } else {
    throw std::invalid_argument("--sweep must be one of nu, K, r");
  }

  const json j = report::to_json(table);
  if (o.format == "csv") {
    emit(o, report::to_csv(table), out);
    if (!o.out.empty() && j.contains("scaling")) {
      Options side = o;
      side.out = o.out + ".scaling.json";
      emit(side, json{{"run", j["run"]}, {"scaling", j["scaling"]}}.dump(2) + "\n", out);
    }
  } else {
    emit(o, j.dump(2) + "\n", out);
  }
  write_sweep_summary(table, o.out.empty() ? err : out);
  return kOk;
}

int cmd_selftest(std::ostream& out) {
  const auto results = run_selftest();
  int failed = 0;
  for (const auto& r : results) {
    out << (r.passed ? "PASS " : "FAIL ") << r.name;
    if (!r.passed && !r.detail.empty()) out << ": " << r.detail;
    out << '\n';
    if (!r.passed) ++failed;
  }
  out << results.size() - failed << "/" << results.size() << " checks passed\n";
  return failed == 0 ? kOk : kSelftestFailed;
}

}  // namespace

std::vector<lincomb::TTerm> parse_terms(std::string_view text) {
  std::vector<lincomb::TTerm> out;
  for (auto item : split(text, ',')) {
    const auto parts = split(item, ':');
    if (parts.size() != 2) {
      throw std::invalid_argument("term '" + std::string(item) + "' is not of the form sigma:nu");
    }
    out.push_back({parse_real(parts[0]), parse_real(parts[1])});
  }
  return out;
}

std::vector<double> parse_list(std::string_view text) {
  std::vector<double> out;
  for (auto item : split(text, ',')) out.push_back(parse_real(item));
  return out;
}

std::vector<double> parse_grid(std::string_view text) {
  const auto parts = split(text, ':');
  std::vector<double> out;
  if (parts.size() == 4 && parts[0] == "logspace") {
    const double a = parse_real(parts[1]);
    const double b = parse_real(parts[2]);
    const double count = parse_real(parts[3]);
    if (count < 1 || count != std::floor(count) || count > 1e6) {
      throw std::invalid_argument("logspace count must be a positive integer");
    }
    const auto n = static_cast<std::size_t>(count);
    for (std::size_t i = 0; i < n; ++i) {
      const double t = n == 1 ? 0.0 : static_cast<double>(i) / static_cast<double>(n - 1);
      out.push_back(std::pow(10.0, a + t * (b - a)));
    }
    return out;
  }
  if (parts.size() == 3) {
    const double start = parse_real(parts[0]);
    const double step = parse_real(parts[1]);
    const double stop = parse_real(parts[2]);
    if (!(step > 0.0) || !(stop >= start)) {
      throw std::invalid_argument("grid needs step > 0 and stop >= start");
    }
    const double span = (stop - start) / step;
    if (span > 1e6) throw std::invalid_argument("grid has too many points");
    const auto n = static_cast<std::size_t>(std::floor(span + 1e-9)) + 1;
    for (std::size_t i = 0; i < n; ++i) out.push_back(start + step * static_cast<double>(i));
    return out;
  }
  if (parts.size() == 1) return parse_list(text);
  throw std::invalid_argument("grid must be start:step:stop or logspace:a:b:count");
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Fit linear combinations of Student's t variables by a single scaled t", "tlincomb"};
  app.set_version_flag("--version", std::string(version()));
  app.require_subcommand(1);
  Options o;

  auto add_terms = [&](CLI::App* c) {
    c->add_option("--terms", o.terms, "Addends as \"sigma1:nu1,sigma2:nu2,...\"")->required();
  };
  auto add_mc = [&](CLI::App* c) {
    c->add_option("--n", o.n, "Monte-Carlo sample size");
    c->add_option("--bins", o.bins, "Histogram bins");
    c->add_option("--seed", o.seed, "Random seed");
  };
  auto add_output = [&](CLI::App* c) {
    c->add_option("--out", o.out, "Output file (default: stdout)");
    c->add_option("--format", o.format, "json or csv");
  };

  auto* stats = app.add_subcommand("stats", "E[Z^2], E|Z|, E[Z^4] and CF_Z");
  add_terms(stats);
  stats->add_option("--r", o.r, "CF argument (default E[Z^2]^-1/2)");
  stats->add_option("--grid", o.grid, "CF arguments: start:step:stop or logspace:a:b:count");
  add_output(stats);

  auto* fit = app.add_subcommand("fit", "Fit a scaled t");
  add_terms(fit);
  fit->add_option("--method", o.method, "ABS_MOMENT, CF_CLOSED, CF_BISECT or MOMENT4");
  fit->add_option("--r", o.r, "CF argument for CF_BISECT");
  fit->add_flag("--eval", o.eval, "Also score the fit against a Monte-Carlo sample");
  add_mc(fit);
  add_output(fit);

  auto* eval = app.add_subcommand("eval", "Score a saved fit against a Monte-Carlo sample");
  eval->add_option("--terms", o.terms, "Addends (default: config.terms of the fit JSON)");
  eval->add_option("--fit-json", o.fit_json, "JSON written by 'fit'")->required();
  add_mc(eval);
  add_output(eval);

  auto* sweep = app.add_subcommand("sweep", "Parameter sweeps over i.i.d. sums");
  sweep->add_option("--sweep", o.sweep, "nu, K or r")->required();
  sweep->add_option("--grid", o.grid, "Swept values: start:step:stop or logspace:a:b:count")
      ->required();
  sweep->add_option("--K", o.k_list, "K values, comma separated (nu and r sweeps)");
  sweep->add_option("--nu", o.nu_list, "nu values, comma separated (K and r sweeps)");
  sweep->add_option("--methods", o.methods, "Methods for the nu sweep, comma separated");
  sweep->add_option("--threads", o.threads, "Worker threads (also capped by TLINCOMB_THREADS)");
  add_mc(sweep);
  add_output(sweep);

  auto* selftest = app.add_subcommand("selftest", "Run the built-in consistency checks");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForVersion&) {
    out << version() << '\n';
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kInvalidInput;
  }

  try {
    if (stats->parsed()) return cmd_stats(o, out);
    if (fit->parsed()) return cmd_fit(o, out);
    if (eval->parsed()) return cmd_eval(o, out);
    if (sweep->parsed()) return cmd_sweep(o, out, err);
    if (selftest->parsed()) return cmd_selftest(out);
  } catch (const IoError& e) {
    err << "error: " << e.what() << '\n';
    return kIoError;
  } catch (const Error& e) {
    err << "error: " << to_string(e.kind()) << ": " << e.what() << '\n';
    return is_infeasible(e.kind()) ? kInfeasible : kInvalidInput;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return kInvalidInput;
  }
  return kInvalidInput;
}

}  // namespace tlincomb::cli
