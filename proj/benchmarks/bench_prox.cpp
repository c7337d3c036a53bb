#include <benchmark/benchmark.h>

#include "rcs/prox.hpp"
#include "rcs/rng.hpp"

namespace {

rcs::Vec random_inputs(int n) {
  rcs::Rng rng(7);
  rcs::Vec t(n);
  for (auto& v : t) v = 4.0 * (rng.uniform01() - 0.5);
  return t;
}

void BM_ProxVector(benchmark::State& state, const rcs::PenaltySpec& p) {
  const rcs::Vec t = random_inputs(static_cast<int>(state.range(0)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(rcs::prox_vector(p, t, 2.0));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

}  // namespace

BENCHMARK_CAPTURE(BM_ProxVector, soft, rcs::PenaltySpec::soft())->Arg(1 << 16);
BENCHMARK_CAPTURE(BM_ProxVector, hard, rcs::PenaltySpec::hard())->Arg(1 << 16);
BENCHMARK_CAPTURE(BM_ProxVector, lq_half, rcs::PenaltySpec::lq(0.5))->Arg(1 << 16);
BENCHMARK_CAPTURE(BM_ProxVector, scad, rcs::PenaltySpec::scad(0.5, 3.7))->Arg(1 << 16);
BENCHMARK_CAPTURE(BM_ProxVector, mc, rcs::PenaltySpec::mc(0.5, 2.0))->Arg(1 << 16);
