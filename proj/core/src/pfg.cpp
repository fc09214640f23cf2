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

#include "pairfuse/pfg.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <unordered_map>

namespace pairfuse {

std::string OutcomeLabel::to_string() const {
  switch (kind) {
    case OutcomeKind::Same:
      return "Same(" + std::to_string(i) + ")";
    case OutcomeKind::Phi:
      return "Phi(" + std::to_string(i) + "," + std::to_string(j) + "," + to_char(sign) + ")";
    case OutcomeKind::Psi:
      return "Psi(" + std::to_string(i) + "," + std::to_string(j) + "," + to_char(sign) + ")";
  }
  return "?";
}

double phi_weight(int d, int k) {
  double c = 0.0;
  for (int p = 1; p <= k; ++p) c += std::pow(static_cast<double>(d), -p);
  return c;
}

std::vector<KrausOutcome> kraus_set(int d, int k) {
  if (d < 2 || k < 0) throw std::invalid_argument("kraus_set needs d >= 2 and k >= 0");
  std::vector<KrausOutcome> out;
  const double same = std::pow(static_cast<double>(d), -k);
  for (int i = 0; i < d; ++i) out.push_back({OutcomeLabel::same(i), same});
  if (k > 0) {
    const double c = phi_weight(d, k);
    for (int i = 0; i < d; ++i)
      for (int j = i + 1; j < d; ++j)
        for (Sign s : {Sign::Plus, Sign::Minus}) out.push_back({OutcomeLabel::phi(i, j, s), c});
  }
  for (int i = 0; i < d; ++i)
    for (int j = i + 1; j < d; ++j)
      for (Sign s : {Sign::Plus, Sign::Minus}) out.push_back({OutcomeLabel::psi(i, j, s), 1.0});
  return out;
}

Eigen::VectorXd label_vector(const OutcomeLabel& label, int d) {
  Eigen::VectorXd v = Eigen::VectorXd::Zero(d * d);
  const double h = 1.0 / std::sqrt(2.0);
  const double s = to_int(label.sign);
  switch (label.kind) {
    case OutcomeKind::Same:
      v(label.i * d + label.i) = 1.0;
      break;
    case OutcomeKind::Phi:
      v(label.i * d + label.i) = h;
      v(label.j * d + label.j) = s * h;
      break;
    case OutcomeKind::Psi:
      v(label.i * d + label.j) = h;
      v(label.j * d + label.i) = s * h;
      break;
  }
  return v;
}

QuditState label_state(const OutcomeLabel& label, int d) {
  switch (label.kind) {
    case OutcomeKind::Same: {
      const std::vector<int> digits{label.i, label.i};
      return QuditState::basis(d, digits);
    }
    case OutcomeKind::Phi:
      return pairwise_phi(d, label.i, label.j, label.sign);
    case OutcomeKind::Psi:
      return pairwise_psi(d, label.i, label.j, label.sign);
  }
  throw std::logic_error("unknown outcome kind");
}

FockVector PfgCircuit::input(const QuditState& two_qudit) const {
  if (two_qudit.dimension() != d || two_qudit.qudit_count() != 2) {
    throw std::invalid_argument("PFG input must be a two-qudit state of dimension " + std::to_string(d));
  }
  if (k == 0) return encode(two_qudit);
  return encode(tensor(two_qudit, ancilla_qudits));
}

FockVector PfgCircuit::input(int a, int b) const {
  const std::vector<int> digits{a, b};
  return input(QuditState::basis(d, digits));
}

PfgCircuit build_circuit(int d, int k) {
  if (d < 2) throw std::invalid_argument("PFG needs d >= 2");
  if (k < 0) throw std::invalid_argument("PFG needs k >= 0");
  if (k > 10 || 2 * (1 << k) > kMaxPhotons) {
    throw EngineCapacityError("PFG with k = " + std::to_string(k) + " exceeds the " + std::to_string(kMaxPhotons) +
                              "-photon engine limit");
  }
  if ((2 << k) * d > 1024) throw EngineCapacityError("PFG interferometer exceeds 1024 modes");

  QuditState ancilla_qudits(d, 0);
  ancilla_qudits.add_index(0, 1.0);
  FockVector ancilla = FockVector::vacuum(0);
  if (k > 0) {
    ancilla_qudits = ghz(d, 2);
    for (int q = 2; q <= k; ++q) ancilla_qudits = tensor(ancilla_qudits, ghz(d, 1 << q));
    ancilla = encode(ancilla_qudits);
  }
  return PfgCircuit{d, k, hadamard_layer(k, d), hadamard_layer_blocks(k, d), std::move(ancilla_qudits),
                    std::move(ancilla)};
}

std::vector<int> conserved_counts(const FockBasisState& pattern, int d) {
  if (d < 1 || pattern.mode_count() % d != 0) {
    throw std::invalid_argument("pattern mode count is not divisible by d");
  }
  std::vector<int> counts(static_cast<std::size_t>(d), 0);
  for (int mode = 0; mode < pattern.mode_count(); ++mode) counts[static_cast<std::size_t>(mode % d)] += pattern[mode];
  return counts;
}

int lowest_unset_digit(int n) {
  if (n < 0) throw std::invalid_argument("negative photon count");
  if (n == 0) return kInfiniteDigit;
  int q = 1;
  while (n % (1 << q) == 0) ++q;
  return q;
}

PatternStats pattern_stats(const FockBasisState& pattern, int d) {
  PatternStats stats;
  stats.counts = conserved_counts(pattern, d);
  int best = kInfiniteDigit;
  for (int n : stats.counts) {
    stats.digits.push_back(lowest_unset_digit(n));
    best = std::min(best, stats.digits.back());
  }
  if (best == kInfiniteDigit) throw std::domain_error("empty detection pattern");
  stats.v = best - 1;
  for (int i = 0; i < d; ++i) {
    if (stats.digits[static_cast<std::size_t>(i)] == best) stats.argmin.push_back(i);
  }
  return stats;
}

Classification classify(const FockBasisState& pattern, int d, int k) {
  if (pattern.mode_count() != (2 << k) * d) {
    throw std::invalid_argument("pattern does not belong to a PFG with d = " + std::to_string(d) +
                                ", k = " + std::to_string(k));
  }
  Classification out;
  out.stats = pattern_stats(pattern, d);
  const auto& stats = out.stats;
  const auto bad = [&] {
    return std::domain_error("impossible pattern " + pattern.to_string() + ": v = " + std::to_string(stats.v) +
                             " with |I| = " + std::to_string(stats.argmin.size()));
  };
  if (stats.v == k + 1) {
    if (stats.argmin.size() != 1) throw bad();
    out.label = OutcomeLabel::same(stats.argmin[0]);
    return out;
  }
  if (stats.v > k + 1 || stats.argmin.size() != 2) throw bad();
  const Sign sign = parity_class(pattern, StabilizerSpec{k, stats.v, d});
  const int i = stats.argmin[0];
  const int j = stats.argmin[1];
  out.label = stats.v == 0 ? OutcomeLabel::psi(i, j, sign) : OutcomeLabel::phi(i, j, sign);
  return out;
}

namespace {

bool kraus_within_capacity(int d, int k) { return (k <= 1 && d <= 5) || (k == 2 && d <= 3); }

std::vector<FockVector> basis_inputs(const PfgCircuit& circuit) {
  std::vector<FockVector> inputs;
  inputs.reserve(static_cast<std::size_t>(circuit.d * circuit.d));
  for (int a = 0; a < circuit.d; ++a)
    for (int b = 0; b < circuit.d; ++b) inputs.push_back(circuit.input(a, b));
  return inputs;
}

}  // namespace

void derive_kraus(const PfgCircuit& circuit, const KrausSink& sink) {
  if (!kraus_within_capacity(circuit.d, circuit.k)) {
    throw EngineCapacityError("Kraus derivation supports d <= 5 for k <= 1 and d <= 3 for k = 2 (got d = " +
                              std::to_string(circuit.d) + ", k = " + std::to_string(circuit.k) + ")");
  }
  const auto inputs = basis_inputs(circuit);
  circuit.blocks.for_each_output(inputs, sink);
}

std::map<FockBasisState, Eigen::VectorXcd> derive_kraus_map(const PfgCircuit& circuit) {
  if (circuit.k >= 2 && circuit.d >= 3) {
    throw EngineCapacityError("materialized Kraus map is too large; stream with derive_kraus instead");
  }
  std::map<FockBasisState, Eigen::VectorXcd> out;
  derive_kraus(circuit, [&](const FockBasisState& pattern, std::span<const Complex> functional) {
    Eigen::VectorXcd v(static_cast<Eigen::Index>(functional.size()));
    for (std::size_t r = 0; r < functional.size(); ++r) v(static_cast<Eigen::Index>(r)) = functional[r];
    out.emplace(pattern, std::move(v));
  });
  return out;
}

KrausVerification verify_kraus(const PfgCircuit& circuit, double tolerance) {
  const int d = circuit.d;
  const int dd = d * d;
  KrausVerification report;
  report.d = d;
  report.k = circuit.k;
  for (const auto& outcome : kraus_set(d, circuit.k)) report.labels[outcome.label].expected_weight = outcome.weight;

  std::vector<double> probability(static_cast<std::size_t>(dd), 0.0);
  std::map<OutcomeLabel, Eigen::VectorXd> vectors;
  double same_mass = 0.0;

  derive_kraus(circuit, [&](const FockBasisState& pattern, std::span<const Complex> functional) {
    ++report.patterns;
    const OutcomeLabel label = classify(pattern, d, circuit.k).label;
    auto it = vectors.find(label);
    if (it == vectors.end()) it = vectors.emplace(label, label_vector(label, d)).first;
    const Eigen::VectorXd& l = it->second;

    Complex c = 0.0;
    for (int r = 0; r < dd; ++r) c += functional[static_cast<std::size_t>(r)] * l(r);
    double residual = 0.0;
    double mass = 0.0;
    for (int r = 0; r < dd; ++r) {
      const Complex amp = functional[static_cast<std::size_t>(r)];
      residual = std::max(residual, std::abs(amp - c * l(r)));
      probability[static_cast<std::size_t>(r)] += std::norm(amp);
      mass += std::norm(amp);
    }
    report.max_residual = std::max(report.max_residual, residual);
    if (label.kind == OutcomeKind::Same) same_mass += mass / dd;

    auto& summary = report.labels[label];
    summary.observed_weight += std::norm(c);
    ++summary.patterns;
  });

  for (const auto& [label, summary] : report.labels) {
    const double dev = std::abs(summary.observed_weight - summary.expected_weight);
    report.max_weight_deviation = std::max(report.max_weight_deviation, dev);
    if (summary.expected_weight == 0.0) {
      report.failures.push_back("unexpected outcome " + label.to_string());
    } else if (summary.patterns == 0) {
      report.failures.push_back("missing outcome " + label.to_string());
    } else if (dev > tolerance) {
      report.failures.push_back("weight of " + label.to_string() + " is " + std::to_string(summary.observed_weight) +
                                ", expected " + std::to_string(summary.expected_weight));
    }
  }
  for (double p : probability) report.max_probability_deviation = std::max(report.max_probability_deviation, std::abs(p - 1.0));
  if (report.max_residual > tolerance) {
    report.failures.push_back("Kraus residual " + std::to_string(report.max_residual) + " exceeds tolerance");
  }
  if (report.max_probability_deviation > tolerance) {
    report.failures.push_back("outcome probabilities do not sum to one (deviation " +
                              std::to_string(report.max_probability_deviation) + ")");
  }
  report.empirical_failure = same_mass;
  report.empirical_success = 1.0 - same_mass;
  report.analytic_success = success_probability(d, circuit.k, ProbabilityMode::Analytic);
  if (std::abs(report.empirical_success - report.analytic_success) > tolerance) {
    report.failures.push_back("empirical success " + std::to_string(report.empirical_success) +
                              " differs from 1 - d^-(k+1)");
  }
  report.passed = report.failures.empty();
  return report;
}

PovmCheck povm_completeness(int d, int k) {
  if (d < 2 || k < 0) throw std::invalid_argument("povm_completeness needs d >= 2 and k >= 0");
  const auto dim = static_cast<std::uint64_t>(d) * static_cast<std::uint64_t>(d);
  std::unordered_map<std::uint64_t, double> sum;
  for (const auto& outcome : kraus_set(d, k)) {
    const Eigen::VectorXd v = label_vector(outcome.label, d);
    std::vector<std::pair<std::uint64_t, double>> support;
    for (Eigen::Index r = 0; r < v.size(); ++r)
      if (v(r) != 0.0) support.emplace_back(static_cast<std::uint64_t>(r), v(r));
    for (const auto& [r, vr] : support)
      for (const auto& [c, vc] : support) sum[r * dim + c] += outcome.weight * vr * vc;
  }
  PovmCheck check;
  std::uint64_t diagonal_seen = 0;
  for (const auto& [key, value] : sum) {
    const bool diagonal = key / dim == key % dim;
    diagonal_seen += diagonal ? 1 : 0;
    check.max_deviation = std::max(check.max_deviation, std::abs(value - (diagonal ? 1.0 : 0.0)));
  }
  if (diagonal_seen != dim) check.max_deviation = std::max(check.max_deviation, 1.0);
  check.weight_identity_residual = std::pow(static_cast<double>(d), -k) + (d - 1) * phi_weight(d, k) - 1.0;
  return check;
}

double success_probability(int d, int k, ProbabilityMode mode) {
  if (d < 2 || k < 0) throw std::invalid_argument("success_probability needs d >= 2 and k >= 0");
  if (mode == ProbabilityMode::Analytic) return 1.0 - std::pow(static_cast<double>(d), -(k + 1));
  return verify_kraus(build_circuit(d, k)).empirical_success;
}

std::map<OutcomeLabel, double> outcome_distribution(const PfgCircuit& circuit, const QuditState& two_qudit) {
  const std::vector<FockVector> inputs{circuit.input(two_qudit)};
  std::map<OutcomeLabel, double> out;
  circuit.blocks.for_each_output(inputs, [&](const FockBasisState& pattern, std::span<const Complex> amp) {
    out[classify(pattern, circuit.d, circuit.k).label] += std::norm(amp[0]);
  });
  return out;
}

std::map<int, double> level_distribution(const PfgCircuit& circuit, const QuditState& two_qudit) {
  const std::vector<FockVector> inputs{circuit.input(two_qudit)};
  std::map<int, double> out;
  circuit.blocks.for_each_output(inputs, [&](const FockBasisState& pattern, std::span<const Complex> amp) {
    out[pattern_stats(pattern, circuit.d).v] += std::norm(amp[0]);
  });
  return out;
}

}  // namespace pairfuse
