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
#include "pairfuse/qudit.hpp"

namespace {

using namespace pairfuse;

void BM_ApplyTransferDense(benchmark::State& state) {
  const int k = static_cast<int>(state.range(0));
  const PfgCircuit circuit = build_circuit(3, k);
  const FockVector input = circuit.input(0, 1);
  for (auto _ : state) benchmark::DoNotOptimize(apply_transfer(circuit.transfer, input));
}
BENCHMARK(BM_ApplyTransferDense)->Arg(0)->Arg(1)->Unit(benchmark::kMicrosecond);

void BM_ApplyTransferBlocks(benchmark::State& state) {
  const int k = static_cast<int>(state.range(0));
  const PfgCircuit circuit = build_circuit(3, k);
  const FockVector input = circuit.input(0, 1);
  for (auto _ : state) benchmark::DoNotOptimize(circuit.blocks.apply(input));
}
BENCHMARK(BM_ApplyTransferBlocks)->Arg(0)->Arg(1)->Arg(2)->Unit(benchmark::kMicrosecond);

void BM_Encode(benchmark::State& state) {
  const QuditState psi = psi_intermediate(5, {0, 1}, {1, 3}, Sign::Plus);
  for (auto _ : state) benchmark::DoNotOptimize(encode(psi));
}
BENCHMARK(BM_Encode);

}  // namespace
