#include <algorithm>
#include <vector>

#include <benchmark/benchmark.h>

#include "tlincomb/fitting.hpp"
#include "tlincomb/lincomb.hpp"
#include "tlincomb/mceval.hpp"
#include "tlincomb/specfun.hpp"

using namespace tlincomb;

namespace {

lincomb::LinComb config(int k, double nu0 = 2.0) {
  std::vector<lincomb::TTerm> t;
  for (int i = 1; i <= k; ++i) t.push_back({i / 2.0, nu0 + i / 2.0});
  return lincomb::LinComb(t);
}

void BM_BesselK(benchmark::State& st) {
  double x = 0.1;
  for (auto _ : st) {
    benchmark::DoNotOptimize(specfun::bessel_k(2.75, x));
    x = x < 40.0 ? x * 1.1 : 0.1;
  }
}
BENCHMARK(BM_BesselK);

void BM_Hyp2F1(benchmark::State& st) {
  double z = -5.0;
  for (auto _ : st) {
    benchmark::DoNotOptimize(specfun::gauss_2f1(1.5, 2.25, 4.0, z));
    z = z < 0.95 ? z + 0.05 : -5.0;
  }
}
BENCHMARK(BM_Hyp2F1);

// argument is nu of both terms
void BM_AbsMomentK2(benchmark::State& st) {
  const double nu = static_cast<double>(st.range(0)) / 2.0;
  for (auto _ : st) benchmark::DoNotOptimize(lincomb::abs_moment_k2({1.0, nu}, {1.7, nu + 1.5}).value);
}
BENCHMARK(BM_AbsMomentK2)->Arg(5)->Arg(10)->Arg(40);

void BM_CfZ(benchmark::State& st) {
  const auto z = config(static_cast<int>(st.range(0)));
  double r = 0.01;
  for (auto _ : st) {
    benchmark::DoNotOptimize(lincomb::cf_z(z, r));
    r = r < 5.0 ? r * 1.05 : 0.01;
  }
}
BENCHMARK(BM_CfZ)->Arg(2)->Arg(12);

void BM_Fit(benchmark::State& st) {
  const auto method = static_cast<fitting::FitMethod>(st.range(0));
  const auto z = config(7, 4.0);  // MOMENT4 needs every nu > 4
  for (auto _ : st) benchmark::DoNotOptimize(fitting::fit(z, method).fitted);
  st.SetLabel(std::string(fitting::to_string(method)));
}
BENCHMARK(BM_Fit)
    ->Arg(static_cast<int>(fitting::FitMethod::AbsMoment))
    ->Arg(static_cast<int>(fitting::FitMethod::CfClosed))
    ->Arg(static_cast<int>(fitting::FitMethod::CfBisect))
    ->Arg(static_cast<int>(fitting::FitMethod::Moment4));

void BM_SampleZ(benchmark::State& st) {
  const auto z = config(7);
  const auto n = static_cast<std::size_t>(st.range(0));
  for (auto _ : st) benchmark::DoNotOptimize(mceval::sample_z(z, n, 1).data());
  st.SetItemsProcessed(static_cast<int64_t>(st.iterations() * n));
}
BENCHMARK(BM_SampleZ)->Arg(100000);

void BM_Bhattacharyya(benchmark::State& st) {
  const auto z = config(4);
  auto s = mceval::sample_z(z, 200000, 1);
  std::sort(s.begin(), s.end());
  const auto h = mceval::build_histogram(s, 1000);
  const auto f = fitting::fit_cf_closed(z).fitted;
  for (auto _ : st) benchmark::DoNotOptimize(mceval::bhattacharyya(h, f, 1).d_b);
}
BENCHMARK(BM_Bhattacharyya);

}  // namespace

BENCHMARK_MAIN();
