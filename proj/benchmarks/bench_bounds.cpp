// Copyright 2026 The cdtbounds Authors.
// Licensed under the Apache License, Version 2.0.

#include <benchmark/benchmark.h>

#include "cdt/bounds.hpp"
#include "cdt/instance_io.hpp"

namespace {

void BM_Relaxation(benchmark::State& state) {
  const cdt::CdtInstance inst = cdt::generate_instance(static_cast<int>(state.range(0)), 1);
  const cdt::BoundReport two =
      cdt::lb_two_cut(inst, cdt::lb_one_cut(inst, cdt::lb_dual(inst)));
  for (auto _ : state)
    benchmark::DoNotOptimize(cdt::solve_relaxation(inst, two.final_lambda, two.cuts));
}
BENCHMARK(BM_Relaxation)->Arg(5)->Arg(20)->Arg(50);

void BM_Pipeline(benchmark::State& state) {
  const auto target = static_cast<cdt::BoundKind>(state.range(0));
  const cdt::CdtInstance inst = cdt::generate_instance(static_cast<int>(state.range(1)), 1);
  for (auto _ : state) benchmark::DoNotOptimize(cdt::run_pipeline(inst, target));
  state.SetLabel(std::string(cdt::bound_name(target)));
}
BENCHMARK(BM_Pipeline)
    ->ArgsProduct({{0, 1, 2, 3, 4}, {5, 20}})
    ->Unit(benchmark::kMillisecond);

void BM_Example1(benchmark::State& state) {
  const cdt::CdtInstance ex = cdt::example1();
  for (auto _ : state) benchmark::DoNotOptimize(cdt::run_all_bounds(ex));
}
BENCHMARK(BM_Example1)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
