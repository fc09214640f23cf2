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

#include "pairfuse/stabilizer_lemma.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace pairfuse {

StabilizerSpec StabilizerSpec::make(int k, int p, int d) {
  if (k < 0) throw std::invalid_argument("k must be >= 0");
  if (p < 0 || p > k) throw std::invalid_argument("p must satisfy 0 <= p <= k (p = " + std::to_string(p) + ", k = " + std::to_string(k) + ")");
  if (d < 2) throw std::invalid_argument("d must be >= 2");
  if (k > 10) throw EngineCapacityError("k > 10 is outside the supported range");
  return StabilizerSpec{k, p, d};
}

std::string StabilizerSpec::to_string() const {
  return "k=" + std::to_string(k) + " p=" + std::to_string(p) + " d=" + std::to_string(d);
}

Sign parity_class(const FockBasisState& pattern, const StabilizerSpec& spec) {
  if (pattern.mode_count() != spec.mode_count()) {
    throw std::invalid_argument("pattern has " + std::to_string(pattern.mode_count()) + " modes, expected " +
                                std::to_string(spec.mode_count()));
  }
  int s = 0;
  for (int mode = 0; mode < pattern.mode_count(); ++mode) {
    if (((mode / spec.d) >> spec.p) & 1) s += pattern[mode];
  }
  return s % 2 == 0 ? Sign::Plus : Sign::Minus;
}

TransferMatrix x_type_operator(const StabilizerSpec& spec) {
  std::vector<int> target(static_cast<std::size_t>(spec.mode_count()));
  for (int mode = 0; mode < spec.mode_count(); ++mode) {
    const int block = (mode / spec.d) ^ (1 << spec.p);
    target[static_cast<std::size_t>(mode)] = block * spec.d + mode % spec.d;
  }
  return TransferMatrix::permutation(target);
}

TransferMatrix z_type_operator(const StabilizerSpec& spec) {
  std::vector<Complex> phases(static_cast<std::size_t>(spec.mode_count()));
  for (int mode = 0; mode < spec.mode_count(); ++mode) {
    phases[static_cast<std::size_t>(mode)] = ((mode / spec.d) >> spec.p) & 1 ? -1.0 : 1.0;
  }
  return TransferMatrix::diagonal(phases);
}

namespace {

TransferMatrix hadamard_power(int k) {
  TransferMatrix out = TransferMatrix::hadamard();
  for (int q = 0; q < k; ++q) out = kron(out, TransferMatrix::hadamard());
  return out;
}

}  // namespace

TransferMatrix hadamard_layer(int k, int d) {
  if (k < 0 || d < 2) throw std::invalid_argument("hadamard_layer needs k >= 0 and d >= 2");
  return kron(hadamard_power(k), TransferMatrix::identity(d));
}

BlockDiagonalTransfer hadamard_layer_blocks(int k, int d) {
  if (k < 0 || d < 2) throw std::invalid_argument("hadamard_layer_blocks needs k >= 0 and d >= 2");
  const int blocks = 1 << (k + 1);
  std::vector<std::vector<int>> groups(static_cast<std::size_t>(d));
  for (int i = 0; i < d; ++i) {
    for (int b = 0; b < blocks; ++b) groups[static_cast<std::size_t>(i)].push_back(b * d + i);
  }
  return BlockDiagonalTransfer(hadamard_power(k), std::move(groups));
}

LemmaReport verify_lemma(const FockVector& psi_plus, const FockVector& psi_minus, const StabilizerSpec& spec,
                         double tolerance, bool collect_patterns) {
  if (psi_plus.mode_count() != spec.mode_count() || psi_minus.mode_count() != spec.mode_count()) {
    throw std::invalid_argument("lemma inputs must have " + std::to_string(spec.mode_count()) + " modes");
  }
  const TransferMatrix x_op = x_type_operator(spec);
  const double dev_plus = max_abs_difference(apply_transfer(x_op, psi_plus), psi_plus);
  const double dev_minus = max_abs_difference(apply_transfer(x_op, psi_minus), psi_minus.scaled(-1.0));
  if (psi_plus.empty() || dev_plus > tolerance) {
    throw std::invalid_argument("psi_plus is not a +1 eigenstate of the X-type stabilizer (deviation " +
                                std::to_string(dev_plus) + ")");
  }
  if (psi_minus.empty() || dev_minus > tolerance) {
    throw std::invalid_argument("psi_minus is not a -1 eigenstate of the X-type stabilizer (deviation " +
                                std::to_string(dev_minus) + ")");
  }

  LemmaReport report;
  report.spec = spec;
  const std::vector<FockVector> inputs{psi_plus, psi_minus};
  hadamard_layer_blocks(spec.k, spec.d)
      .for_each_output(inputs, [&](const FockBasisState& pattern, std::span<const Complex> amplitudes) {
        const Sign parity = parity_class(pattern, spec);
        const Complex own = parity == Sign::Plus ? amplitudes[0] : amplitudes[1];
        const Complex wrong = parity == Sign::Plus ? amplitudes[1] : amplitudes[0];
        if (own != Complex(0.0, 0.0)) {
          (parity == Sign::Plus ? report.plus_support : report.minus_support)++;
          if (collect_patterns) (parity == Sign::Plus ? report.plus_patterns : report.minus_patterns).push_back(pattern);
        }
        report.max_wrong_parity_amplitude = std::max(report.max_wrong_parity_amplitude, std::abs(wrong));
        if (std::abs(wrong) > tolerance) report.violations.push_back(pattern);
      });
  std::sort(report.plus_patterns.begin(), report.plus_patterns.end());
  std::sort(report.minus_patterns.begin(), report.minus_patterns.end());
  report.passed = report.violations.empty();
  return report;
}

std::vector<LemmaCase> lemma_cases(const StabilizerSpec& spec) {
  std::vector<LemmaCase> out;
  const int d = spec.d;
  for (int i = 0; i < d; ++i) {
    for (int j = i + 1; j < d; ++j) {
      auto build = [&](Sign sign) {
        QuditState head = spec.p == 0 ? pairwise_psi(d, i, j, sign) : xi_state(d, i, j, sign, 1 << spec.p);
        for (int q = spec.p + 1; q <= spec.k; ++q) head = tensor(head, ghz(d, 1 << q));
        return encode(head);
      };
      std::string name = spec.p == 0 ? "psi" : "xi(" + std::to_string(2 << spec.p) + ")";
      name += "_{" + std::to_string(i) + "," + std::to_string(j) + "}";
      for (int q = spec.p + 1; q <= spec.k; ++q) name += " x ghz(" + std::to_string(1 << q) + ")";
      out.push_back(LemmaCase{std::move(name), build(Sign::Plus), build(Sign::Minus)});
    }
  }
  return out;
}

}  // namespace pairfuse
