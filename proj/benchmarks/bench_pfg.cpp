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

#include "pairfuse/pfg.hpp"

namespace {

using namespace pairfuse;

void BM_DeriveKraus(benchmark::State& state) {
  const PfgCircuit circuit = build_circuit(static_cast<int>(state.range(0)), static_cast<int>(state.range(1)));
  for (auto _ : state) {
    std::size_t patterns = 0;
    derive_kraus(circuit, [&](const FockBasisState&, std::span<const Complex>) { ++patterns; });
    benchmark::DoNotOptimize(patterns);
  }
}
BENCHMARK(BM_DeriveKraus)->Args({3, 0})->Args({5, 0})->Args({3, 1})->Args({2, 2})->Unit(benchmark::kMillisecond);

void BM_PovmCompleteness(benchmark::State& state) {
  const int d = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(povm_completeness(d, 5));
}
BENCHMARK(BM_PovmCompleteness)->Arg(10)->Arg(100)->Unit(benchmark::kMicrosecond);

}  // namespace
