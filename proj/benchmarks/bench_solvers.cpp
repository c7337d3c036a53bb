#include <benchmark/benchmark.h>

#include "rcs/bench.hpp"
#include "rcs/solvers.hpp"

namespace {

void BM_LqlaAdmm(benchmark::State& state) {
  rcs::ExperimentSpec spec;
  spec.kind = rcs::ExperimentKind::SparsitySweep;
  spec.n = 512;
  spec.m = 200;
  spec.k_grid = {30};
  spec.noise = rcs::NoiseSpec::gmm(0.1, 1000.0, 30.0);
  spec.methods = {rcs::parse_method("lqla-admm(q=0.5)")};
  spec.mu_grid = {0.01};
  const rcs::Instance inst = rcs::make_sweep_instance(spec, 30, 0);

  rcs::SolverConfig cfg;
  cfg.mu = 0.01;
  cfg.max_iter = static_cast<int>(state.range(0));
  cfg.tol = 1e-300;  // run the full budget
  const rcs::Vec x0(spec.n, 0.0);
  const auto p = rcs::PenaltySpec::lq(0.5);
  for (auto _ : state) {
    benchmark::DoNotOptimize(rcs::solve_lqla_admm(inst.A, inst.y, p, cfg, x0));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

}  // namespace

BENCHMARK(BM_LqlaAdmm)->Arg(100)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
