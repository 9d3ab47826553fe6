// Copyright 2026 The cdtbounds Authors.
// Licensed under the Apache License, Version 2.0.

#include <benchmark/benchmark.h>

#include <random>

#include "cdt/trs.hpp"

namespace {

cdt::TrsProblem random_problem(int n, unsigned seed) {
  std::mt19937 rng(seed);
  std::normal_distribution<double> nd;
  cdt::Matrix h(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j <= i; ++j) h(i, j) = h(j, i) = nd(rng);
  cdt::Vector g(n);
  for (int i = 0; i < n; ++i) g(i) = nd(rng);
  return {h, g, 1.0};
}

void BM_TrsGlobal(benchmark::State& state) {
  const cdt::TrsProblem p = random_problem(static_cast<int>(state.range(0)), 1);
  for (auto _ : state) benchmark::DoNotOptimize(cdt::trs_global(p));
}
BENCHMARK(BM_TrsGlobal)->Arg(2)->Arg(5)->Arg(20)->Arg(50)->Arg(200);

void BM_AnalyzeTrs(benchmark::State& state) {
  const cdt::TrsProblem p = random_problem(static_cast<int>(state.range(0)), 2);
  for (auto _ : state) benchmark::DoNotOptimize(cdt::analyze_trs(p));
}
BENCHMARK(BM_AnalyzeTrs)->Arg(2)->Arg(5)->Arg(20)->Arg(50)->Arg(200);

}  // namespace
