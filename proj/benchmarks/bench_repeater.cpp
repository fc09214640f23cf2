// Copyright 2026 The pairfuse Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <benchmark/benchmark.h>

#include "pairfuse/repeater.hpp"

namespace {

using namespace pairfuse;

void BM_FirstGenOpt(benchmark::State& state) {
  const RepeaterParams p = scheme_params(0.99, 100).with_length(1000.0);
  for (auto _ : state) benchmark::DoNotOptimize(t_first_opt(p));
}
BENCHMARK(BM_FirstGenOpt);

void BM_SecondGenOpt(benchmark::State& state) {
  const RepeaterParams p = scheme_params(0.99, 100).with_length(1000.0);
  for (auto _ : state) benchmark::DoNotOptimize(t_second_opt(p));
}
BENCHMARK(BM_SecondGenOpt);

void BM_Sweep(benchmark::State& state) {
  const std::vector<double> etas{0.95, 0.99};
  const std::vector<int> ds{2, 10, 100};
  const std::vector<int> gens{1, 2};
  const auto grid = geometric_grid(100.0, 5000.0, 50);
  for (auto _ : state) benchmark::DoNotOptimize(repeater_sweep(etas, ds, 0, grid, gens));
}
BENCHMARK(BM_Sweep)->Unit(benchmark::kMillisecond);

void BM_MonteCarloFirstGen(benchmark::State& state) {
  const RepeaterParams p = RepeaterParams::standard(0.95, 400.0);
  for (auto _ : state) benchmark::DoNotOptimize(mc_first_gen(p, 3, 1000, 1));
}
BENCHMARK(BM_MonteCarloFirstGen)->Unit(benchmark::kMillisecond);

}  // namespace
