#include "tlincomb/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <cmath>
#include <cstdlib>
#include <functional>
#include <string>
#include <thread>

#include "tlincomb/errors.hpp"

namespace tlincomb::mceval {

namespace {

using fitting::FitMethod;

struct Job {
  FitMethod method;
  std::optional<double> r;
};

struct Cell {
  double nu;
  int k;
  std::vector<Job> jobs;
  std::size_t first_row;
};

void run_parallel(std::size_t count, unsigned threads, const std::function<void(std::size_t)>& f) {
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, count));
  if (threads <= 1) {
    for (std::size_t i = 0; i < count; ++i) f(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  std::exception_ptr first_error;
  std::atomic<bool> failed{false};
  for (unsigned t = 0; t < threads; ++t) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < count && !failed; i = next++) {
        try {
          f(i);
        } catch (...) {
          if (!failed.exchange(true)) first_error = std::current_exception();
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  if (first_error) std::rethrow_exception(first_error);
}

void evaluate_cell(const Cell& cell, const SweepConfig& cfg, std::vector<SweepRow>& rows) {
  const auto zc = lincomb::LinComb::iid(1.0, cell.nu, static_cast<std::size_t>(cell.k));
  const std::uint64_t seed = cell_seed(cfg.seed, cell.nu, cell.k);
  auto samples = sample_z(zc, cfg.n, seed);
  std::sort(samples.begin(), samples.end());
  const auto hist = build_histogram(samples, cfg.bins);

  for (std::size_t j = 0; j < cell.jobs.size(); ++j) {
    SweepRow& row = rows[cell.first_row + j];
    row.nu = cell.nu;
    row.k = cell.k;
    row.method = cell.jobs[j].method;
    row.r = cell.jobs[j].r;
    try {
      const auto rep = fitting::fit(zc, row.method, row.r);
      row.r = rep.r_used;
      row.sigma_z = rep.fitted.sigma();
      row.nu_z = rep.fitted.nu();
      row.d_b = bhattacharyya(hist, rep.fitted, seed).d_b;
      row.ks = ks_distance_sorted(samples, rep.fitted);
      if (rep.bisection && rep.bisection->effectively_gaussian) row.status = "effectively_gaussian";
    } catch (const Error& e) {
      row.status = std::string(to_string(e.kind()));
      row.detail = e.what();
    }
  }
}

SweepTable run_cells(SweepKind kind, std::vector<Cell> cells, const SweepConfig& cfg) {
  SweepTable table;
  table.kind = kind;
  table.config = cfg;
  std::size_t total = 0;
  for (auto& c : cells) {
    c.first_row = total;
    total += c.jobs.size();
  }
  table.rows.resize(total);
  run_parallel(cells.size(), resolve_threads(cfg.threads),
               [&](std::size_t i) { evaluate_cell(cells[i], cfg, table.rows); });
  return table;
}

void check_grid(bool ok, const char* what) {
  if (!ok) fail(ErrorKind::Domain, what);
}

}  // namespace

std::string_view to_string(SweepKind kind) {
  switch (kind) {
    case SweepKind::Nu:
      return "nu";
    case SweepKind::K:
      return "K";
    case SweepKind::R:
      return "r";
  }
  return "unknown";
}

std::uint64_t cell_seed(std::uint64_t seed, double nu, int k) {
  return tdist::stream_seed(tdist::stream_seed(seed, std::bit_cast<std::uint64_t>(nu)),
                            static_cast<std::uint64_t>(k));
}

unsigned resolve_threads(unsigned requested) {
  unsigned n = requested > 0 ? requested : std::max(1u, std::thread::hardware_concurrency());
  if (const char* env = std::getenv("TLINCOMB_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && v >= 1) n = std::min(n, static_cast<unsigned>(v));
  }
  return n;
}

SweepTable sweep_nu(const std::vector<double>& nu_grid, const std::vector<int>& k_set,
                    const std::vector<FitMethod>& methods, const SweepConfig& cfg) {
  check_grid(!nu_grid.empty() && !k_set.empty() && !methods.empty(), "sweep grids must be non-empty");
  std::vector<Cell> cells;
  for (double nu : nu_grid) {
    for (int k : k_set) {
      Cell c{nu, k, {}, 0};
      for (auto m : methods) c.jobs.push_back({m, std::nullopt});
      cells.push_back(std::move(c));
    }
  }
  return run_cells(SweepKind::Nu, std::move(cells), cfg);
}

SweepTable sweep_k(const std::vector<int>& k_grid, const std::vector<double>& nu_set,
                   const SweepConfig& cfg) {
  check_grid(!k_grid.empty() && !nu_set.empty(), "sweep grids must be non-empty");
  check_grid(std::is_sorted(k_grid.begin(), k_grid.end()) &&
                 std::adjacent_find(k_grid.begin(), k_grid.end()) == k_grid.end(),
             "K grid must be increasing");
  std::vector<Cell> cells;
  for (double nu : nu_set) {
    for (int k : k_grid) cells.push_back(Cell{nu, k, {{FitMethod::CfClosed, std::nullopt}}, 0});
  }
  auto table = run_cells(SweepKind::K, std::move(cells), cfg);

  for (double nu : nu_set) {
    std::vector<double> ks, sig, nus;
    for (const auto& row : table.rows) {
      if (row.nu == nu && row.sigma_z && row.nu_z) {
        ks.push_back(row.k);
        sig.push_back(*row.sigma_z);
        nus.push_back(*row.nu_z);
      }
    }
    if (ks.size() >= 3) table.scaling.push_back({nu, fit_scaling(ks, sig), fit_scaling(ks, nus)});
  }
  return table;
}

SweepTable sweep_r(const std::vector<double>& r_grid, const std::vector<double>& nu_set,
                   const std::vector<int>& k_set, const SweepConfig& cfg) {
  check_grid(!r_grid.empty() && !nu_set.empty() && !k_set.empty(), "sweep grids must be non-empty");
  for (double r : r_grid) check_grid(r > 0.0 && std::isfinite(r), "r grid must be positive");
  std::vector<Cell> cells;
  for (double nu : nu_set) {
    for (int k : k_set) {
      Cell c{nu, k, {}, 0};
      for (double r : r_grid) c.jobs.push_back({FitMethod::CfBisect, r});
      cells.push_back(std::move(c));
    }
  }
  return run_cells(SweepKind::R, std::move(cells), cfg);
}

bool has_interior_minimum(const std::vector<SweepRow>& rows) {
  std::vector<double> d;
  for (const auto& row : rows) {
    if (row.d_b && std::isfinite(*row.d_b)) d.push_back(*row.d_b);
  }
  if (d.size() < 3) return false;
  const auto it = std::min_element(d.begin(), d.end());
  return it != d.begin() && it != d.end() - 1;
}

}  // namespace tlincomb::mceval
