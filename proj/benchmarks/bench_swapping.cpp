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

#include "pairfuse/swapping.hpp"

namespace {

using namespace pairfuse;

void BM_Bes(benchmark::State& state) {
  const int d = static_cast<int>(state.range(0));
  const int k = static_cast<int>(state.range(1));
  const QuditState left = psi_intermediate(d, {0, 1}, {1, 2}, Sign::Plus);
  const QuditState right = psi_intermediate(d, {0, 2}, {1, 2}, Sign::Minus);
  for (auto _ : state) benchmark::DoNotOptimize(bes(left, right, k));
}
BENCHMARK(BM_Bes)->Args({3, 0})->Args({3, 1})->Args({5, 0})->Unit(benchmark::kMillisecond);

void BM_CanonicalForm(benchmark::State& state) {
  const QuditState psi = psi_intermediate(5, {1, 3}, {4, 2}, Sign::Minus);
  for (auto _ : state) benchmark::DoNotOptimize(canonical_form(psi));
}
BENCHMARK(BM_CanonicalForm);

void BM_Chain(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(run_chain(3, static_cast<int>(state.range(0)), 3));
}
BENCHMARK(BM_Chain)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

}  // namespace
