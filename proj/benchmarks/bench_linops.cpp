#include <benchmark/benchmark.h>

#include "rcs/linop.hpp"
#include "rcs/rng.hpp"
#include "rcs/wavelets.hpp"

namespace {

rcs::Vec random_vec(int n, std::uint64_t seed) {
  rcs::Rng rng(seed);
  rcs::Vec x(n);
  for (auto& v : x) v = rng.normal();
  return x;
}

void BM_PartialDctApply(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const auto A = rcs::LinearMap::partial_dct(n, n * 2 / 5, 1);
  const rcs::Vec x = random_vec(n, 2);
  for (auto _ : state) benchmark::DoNotOptimize(A.apply(x));
}

void BM_GaussianApply(benchmark::State& state) {
  const auto A = rcs::LinearMap::gaussian_orthonormal(200, 512, 1);
  const rcs::Vec x = random_vec(512, 2);
  for (auto _ : state) benchmark::DoNotOptimize(A.apply(x));
}

void BM_HaarSynthesis(benchmark::State& state) {
  const int side = static_cast<int>(state.range(0));
  const auto psi = rcs::as_synthesis_map(side);
  const rcs::Vec theta = random_vec(side * side, 3);
  for (auto _ : state) benchmark::DoNotOptimize(psi.apply(theta));
}

}  // namespace

BENCHMARK(BM_PartialDctApply)->Arg(1 << 12)->Arg(1 << 16);
BENCHMARK(BM_GaussianApply);
BENCHMARK(BM_HaarSynthesis)->Arg(64)->Arg(256);
