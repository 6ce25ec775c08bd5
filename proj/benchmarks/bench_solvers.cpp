#include <benchmark/benchmark.h>

#include <cmath>

#include "hicomp/analysis.hpp"
#include "hicomp/cns.hpp"
#include "hicomp/pme.hpp"

using namespace hicomp;

namespace {

Field tent(const Grid& g) {
  return Field::from_function(g, [](double x) { return std::max(0.0, 1.0 - std::abs(x)); });
}

void BM_PmeStep(benchmark::State& st) {
  const Grid g = make_grid(-8.0, 8.0, static_cast<int>(st.range(0)));
  const PhysParams p = PhysParams::make(1.25, 2.0, 0.0);
  const PmeState s{0.0, tent(g)};
  const double dt = kPmeCfl * pme_stable_dt(s, p);
  for (auto _ : st) benchmark::DoNotOptimize(pme_step(s, p, dt));
  st.SetItemsProcessed(st.iterations() * st.range(0));
}

void BM_CnsStep(benchmark::State& st) {
  const Grid g = make_grid(-8.0, 8.0, static_cast<int>(st.range(0)));
  const PhysParams p = PhysParams::make(1.25, 2.0, 1e-2);
  const CnsState s = well_prepared_init(tent(g), p);
  const double dt = cfl_dt(s, p);
  for (auto _ : st) benchmark::DoNotOptimize(cns_step(s, p, dt));
  st.SetItemsProcessed(st.iterations() * st.range(0));
}

void BM_HMinus1Norm(benchmark::State& st) {
  const Grid g = make_grid(-8.0, 8.0, static_cast<int>(st.range(0)));
  const Field f = Field::from_function(g, [](double x) { return x * std::exp(-x * x); });
  for (auto _ : st) benchmark::DoNotOptimize(h_minus1_norm(f));
  st.SetItemsProcessed(st.iterations() * st.range(0));
}

}  // namespace

BENCHMARK(BM_PmeStep)->RangeMultiplier(2)->Range(512, 4096);
BENCHMARK(BM_CnsStep)->RangeMultiplier(2)->Range(512, 4096);
BENCHMARK(BM_HMinus1Norm)->RangeMultiplier(2)->Range(512, 4096);

BENCHMARK_MAIN();
