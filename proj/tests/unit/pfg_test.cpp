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

#include <cmath>
#include <map>
#include <random>
#include <set>
#include <vector>

#include <gtest/gtest.h>

#include "pairfuse/pfg.hpp"
#include "pairfuse/stabilizer_lemma.hpp"

namespace pairfuse {
namespace {

FockBasisState fs(std::vector<int> occ) { return FockBasisState(std::move(occ)); }

// Pattern on the (d, k) layout with the given photons per mode.
FockBasisState pattern_with(int d, int k, const std::map<int, int>& photons) {
  std::vector<int> occ(static_cast<std::size_t>((2 << k) * d), 0);
  for (const auto& [mode, n] : photons) occ[static_cast<std::size_t>(mode)] = n;
  return fs(occ);
}

TEST(Pfg, BuildCircuitQutritNoAncilla) {
  const PfgCircuit c = build_circuit(3, 0);
  EXPECT_EQ(c.transfer.mode_count(), 6);
  EXPECT_EQ(c.ancilla.mode_count(), 0);
  EXPECT_EQ(c.ancilla_photons(), 0);
  const TransferMatrix oracle = kron(TransferMatrix::hadamard(), TransferMatrix::identity(3));
  EXPECT_LT((c.transfer.matrix() - oracle.matrix()).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(Pfg, BuildCircuitQutritOneAncilla) {
  const PfgCircuit c = build_circuit(3, 1);
  EXPECT_EQ(c.mode_count(), 12);
  EXPECT_EQ(c.ancilla_photons(), 2);
  EXPECT_LT(max_abs_difference(c.ancilla, encode(ghz(3, 2))), 1e-15);
}

TEST(Pfg, BuildCircuitQubitTwoAncillae) {
  const PfgCircuit c = build_circuit(2, 2);
  EXPECT_EQ(c.mode_count(), 16);
  EXPECT_EQ(c.ancilla_photons(), 6);
  EXPECT_EQ(c.ancilla.photon_numbers(), std::vector<int>{6});
  EXPECT_THROW(build_circuit(1, 0), std::invalid_argument);
  EXPECT_THROW(build_circuit(2, 4), EngineCapacityError);
}

TEST(Pfg, ConservedCounts) {
  EXPECT_EQ(conserved_counts(fs({1, 0, 0, 0, 0, 1}), 3), (std::vector<int>{1, 0, 1}));
  EXPECT_EQ(conserved_counts(fs({2, 0, 0, 2}), 2), (std::vector<int>{2, 2}));
  std::mt19937_64 rng(3);
  std::uniform_int_distribution<int> pick(0, 11);
  for (int t = 0; t < 50; ++t) {
    std::vector<int> occ(12, 0);
    const int n = 1 + t % 7;
    for (int p = 0; p < n; ++p) ++occ[static_cast<std::size_t>(pick(rng))];
    int total = 0;
    for (int c : conserved_counts(fs(occ), 3)) total += c;
    EXPECT_EQ(total, n);
  }
}

TEST(Pfg, LowestUnsetDigit) {
  EXPECT_EQ(lowest_unset_digit(1), 1);
  EXPECT_EQ(lowest_unset_digit(2), 2);
  EXPECT_EQ(lowest_unset_digit(3), 1);
  EXPECT_EQ(lowest_unset_digit(4), 3);
  EXPECT_EQ(lowest_unset_digit(6), 2);
  EXPECT_EQ(lowest_unset_digit(0), kInfiniteDigit);
}

TEST(Pfg, ClassifyPsiLevel) {
  // N = (3, 1, 0)
  const Classification c = classify(pattern_with(3, 1, {{0, 3}, {1, 1}}), 3, 1);
  EXPECT_EQ(c.stats.counts, (std::vector<int>{3, 1, 0}));
  EXPECT_EQ(c.stats.digits, (std::vector<int>{1, 1, kInfiniteDigit}));
  EXPECT_EQ(c.stats.v, 0);
  EXPECT_EQ(c.stats.argmin, (std::vector<int>{0, 1}));
  EXPECT_EQ(c.label.kind, OutcomeKind::Psi);
  EXPECT_EQ(c.label.i, 0);
  EXPECT_EQ(c.label.j, 1);
}

TEST(Pfg, ClassifySameLevel) {
  // N = (4, 0, 0)
  const Classification c = classify(pattern_with(3, 1, {{0, 2}, {3, 1}, {9, 1}}), 3, 1);
  EXPECT_EQ(c.stats.digits[0], 3);
  EXPECT_EQ(c.stats.v, 2);
  EXPECT_EQ(c.label, OutcomeLabel::same(0));
}

TEST(Pfg, ClassifyPhiLevel) {
  // N = (2, 2, 0)
  const Classification c = classify(pattern_with(3, 1, {{0, 1}, {3, 1}, {1, 2}}), 3, 1);
  EXPECT_EQ(c.stats.digits, (std::vector<int>{2, 2, kInfiniteDigit}));
  EXPECT_EQ(c.stats.v, 1);
  EXPECT_EQ(c.label.kind, OutcomeKind::Phi);
  EXPECT_EQ(c.label.i, 0);
  EXPECT_EQ(c.label.j, 1);
  // The sign is the parity at p = v.
  EXPECT_EQ(c.label.sign, parity_class(pattern_with(3, 1, {{0, 1}, {3, 1}, {1, 2}}), StabilizerSpec::make(1, 1, 3)));
}

TEST(Pfg, ClassifyRejectsImpossiblePattern) {
  // N = (1, 1, 1, 1) at k = 1 would give |I| = 4 at v = 0.
  EXPECT_THROW(classify(pattern_with(4, 1, {{0, 1}, {1, 1}, {2, 1}, {3, 1}}), 4, 1), std::domain_error);
}

TEST(Pfg, KrausSetWeights) {
  const auto set = kraus_set(3, 1);
  std::map<OutcomeKind, double> weight;
  for (const auto& o : set) weight[o.label.kind] = o.weight;
  EXPECT_NEAR(weight[OutcomeKind::Same], 1.0 / 3.0, 1e-15);
  EXPECT_NEAR(weight[OutcomeKind::Phi], 1.0 / 3.0, 1e-15);
  EXPECT_NEAR(weight[OutcomeKind::Psi], 1.0, 1e-15);
  EXPECT_NEAR(phi_weight(3, 2), 4.0 / 9.0, 1e-15);
  EXPECT_EQ(phi_weight(5, 0), 0.0);
  // k = 0 has no Phi outcomes.
  for (const auto& o : kraus_set(4, 0)) EXPECT_NE(o.label.kind, OutcomeKind::Phi);
  EXPECT_EQ(kraus_set(4, 0).size(), static_cast<std::size_t>(4 + 4 * 3));
}

TEST(Pfg, DeriveKrausQubitBellMeasurement) {
  const auto map = derive_kraus_map(build_circuit(2, 0));
  std::map<OutcomeLabel, double> weight;
  for (const auto& [pattern, functional] : map) {
    const OutcomeLabel label = classify(pattern, 2, 0).label;
    const Eigen::VectorXd bra = label_vector(label, 2);
    const Complex overlap = bra.cast<Complex>().dot(functional);
    EXPECT_NEAR((functional - overlap * bra.cast<Complex>()).cwiseAbs().maxCoeff(), 0.0, 1e-9);
    weight[label] += std::norm(overlap);
  }
  EXPECT_EQ(weight.size(), 4u);
  EXPECT_NEAR(weight[OutcomeLabel::same(0)], 1.0, 1e-12);
  EXPECT_NEAR(weight[OutcomeLabel::same(1)], 1.0, 1e-12);
  EXPECT_NEAR(weight[OutcomeLabel::psi(0, 1, Sign::Plus)], 1.0, 1e-12);
  EXPECT_NEAR(weight[OutcomeLabel::psi(0, 1, Sign::Minus)], 1.0, 1e-12);
}

TEST(Pfg, VerifyKrausSmallCases) {
  for (auto [d, k] : {std::pair{2, 0}, std::pair{3, 0}, std::pair{2, 1}, std::pair{3, 1}}) {
    const KrausVerification r = verify_kraus(build_circuit(d, k));
    EXPECT_TRUE(r.passed) << d << "," << k;
    EXPECT_LE(r.max_residual, 1e-9);
    EXPECT_LE(r.max_weight_deviation, 1e-9);
    EXPECT_LE(r.max_probability_deviation, 1e-9);
    EXPECT_NEAR(r.empirical_success, 1.0 - std::pow(d, -(k + 1)), 1e-9);
  }
}

TEST(Pfg, VerifyKrausQutritOneAncillaWeights) {
  const KrausVerification r = verify_kraus(build_circuit(3, 1));
  for (const auto& [label, s] : r.labels) {
    const double expected = label.kind == OutcomeKind::Psi ? 1.0 : 1.0 / 3.0;
    EXPECT_NEAR(s.observed_weight, expected, 1e-9) << label.to_string();
  }
}

TEST(Pfg, VerifyKrausQutritTwoAncillae) {
  const KrausVerification r = verify_kraus(build_circuit(3, 2));
  EXPECT_TRUE(r.passed);
  EXPECT_NEAR(r.labels.at(OutcomeLabel::phi(0, 1, Sign::Plus)).observed_weight, 4.0 / 9.0, 1e-9);
  EXPECT_NEAR(r.labels.at(OutcomeLabel::same(2)).observed_weight, 1.0 / 9.0, 1e-9);
}

TEST(Pfg, DeriveKrausCapacity) {
  EXPECT_THROW(derive_kraus(build_circuit(7, 0), [](const FockBasisState&, std::span<const Complex>) {}),
               EngineCapacityError);
  EXPECT_THROW(derive_kraus(build_circuit(4, 2), [](const FockBasisState&, std::span<const Complex>) {}),
               EngineCapacityError);
  EXPECT_THROW(derive_kraus_map(build_circuit(3, 2)), EngineCapacityError);
}

TEST(Pfg, PovmCompleteness) {
  EXPECT_LE(povm_completeness(2, 0).max_deviation, 1e-15);
  const PovmCheck c31 = povm_completeness(3, 1);
  EXPECT_LE(c31.max_deviation, 1e-12);
  EXPECT_NEAR(1.0 / 3.0 + 2.0 * phi_weight(3, 1), 1.0, 1e-15);
  EXPECT_NEAR(phi_weight(10, 2), 0.11, 1e-15);
  EXPECT_NEAR(std::pow(10.0, -2) + 9 * phi_weight(10, 2), 1.0, 1e-15);
  EXPECT_LE(povm_completeness(10, 2).weight_identity_residual, 1e-15);
  for (int d : {2, 7, 50})
    for (int k = 0; k <= 5; ++k) EXPECT_LE(povm_completeness(d, k).max_deviation, 1e-12);
}

TEST(Pfg, SuccessProbability) {
  EXPECT_DOUBLE_EQ(success_probability(2, 0, ProbabilityMode::Analytic), 0.5);
  EXPECT_NEAR(success_probability(10, 0, ProbabilityMode::Analytic), 0.9, 1e-15);
  EXPECT_NEAR(success_probability(3, 1, ProbabilityMode::Analytic), 8.0 / 9.0, 1e-15);
  EXPECT_NEAR(success_probability(2, 0, ProbabilityMode::Empirical), 0.5, 1e-9);
  EXPECT_NEAR(success_probability(3, 1, ProbabilityMode::Empirical), 8.0 / 9.0, 1e-9);
  EXPECT_THROW(success_probability(10, 0, ProbabilityMode::Empirical), EngineCapacityError);
}

TEST(Pfg, EveryPatternClassifiesAndMatchesOneLabel) {
  for (auto [d, k] : {std::pair{3, 0}, std::pair{4, 0}, std::pair{2, 1}, std::pair{3, 1}}) {
    const PfgCircuit circuit = build_circuit(d, k);
    derive_kraus(circuit, [&](const FockBasisState& pattern, std::span<const Complex> functional) {
      const OutcomeLabel label = classify(pattern, d, k).label;
      const Eigen::VectorXd bra = label_vector(label, d);
      Complex c = 0.0;
      for (int r = 0; r < d * d; ++r) c += bra(r) * functional[static_cast<std::size_t>(r)];
      double residual = 0.0;
      for (int r = 0; r < d * d; ++r)
        residual = std::max(residual, std::abs(functional[static_cast<std::size_t>(r)] - c * bra(r)));
      EXPECT_LE(residual, 1e-9) << pattern.to_string();
    });
  }
}

TEST(Pfg, RandomInputsConserveProbability) {
  std::mt19937_64 rng(41);
  std::normal_distribution<double> g;
  for (auto [d, k] : {std::pair{3, 0}, std::pair{3, 1}}) {
    const PfgCircuit circuit = build_circuit(d, k);
    for (int t = 0; t < 3; ++t) {
      QuditState in(d, 2);
      for (int r = 0; r < d * d; ++r) in.add_index(static_cast<QuditState::Index>(r), Complex(g(rng), g(rng)));
      in = in.normalized();
      double total = 0.0;
      for (const auto& [label, p] : outcome_distribution(circuit, in)) total += p;
      EXPECT_NEAR(total, 1.0, 1e-9);
    }
  }
}

TEST(Pfg, DecompositionOfDiagonalInput) {
  // Input |ii> at d = 3, k = 2: each (v = p, I = {i, j}) event has
  // probability d^-p, and Same(i) has d^-k.
  const int d = 3;
  const int k = 2;
  const PfgCircuit circuit = build_circuit(d, k);
  const int i = 1;
  const std::vector<FockVector> inputs{circuit.input(i, i)};
  std::map<std::pair<int, std::vector<int>>, double> events;
  circuit.blocks.for_each_output(inputs, [&](const FockBasisState& pattern, std::span<const Complex> amp) {
    const Classification c = classify(pattern, d, k);
    events[{c.stats.v, c.stats.argmin}] += std::norm(amp[0]);
  });
  double total = 0.0;
  for (const auto& [key, p] : events) {
    const auto& [v, argmin] = key;
    total += p;
    if (v == k + 1) {
      EXPECT_EQ(argmin, std::vector<int>{i});
      EXPECT_NEAR(p, std::pow(d, -k), 1e-9);
    } else {
      ASSERT_GE(v, 1);
      EXPECT_EQ(argmin.size(), 2u);
      EXPECT_NEAR(p, std::pow(d, -v), 1e-9) << "v = " << v;
    }
  }
  EXPECT_EQ(events.size(), static_cast<std::size_t>(1 + k * (d - 1)));
  EXPECT_NEAR(total, 1.0, 1e-9);

  const auto levels = level_distribution(circuit, QuditState::basis(d, std::vector{i, i}));
  for (int v = 1; v <= k; ++v) EXPECT_NEAR(levels.at(v), (d - 1) * std::pow(d, -v), 1e-9);
  EXPECT_NEAR(levels.at(k + 1), std::pow(d, -k), 1e-9);
}

TEST(Pfg, PhiInputBranchWeights) {
  const int d = 3;
  for (int k = 1; k <= 2; ++k) {
    const PfgCircuit circuit = build_circuit(d, k);
    for (Sign s : {Sign::Plus, Sign::Minus}) {
      const auto dist = outcome_distribution(circuit, pairwise_phi(d, 0, 2, s));
      double phi_total = 0.0;
      double same_total = 0.0;
      for (const auto& [label, p] : dist) {
        if (label.kind == OutcomeKind::Phi) phi_total += p;
        if (label.kind == OutcomeKind::Same) same_total += p;
        if (label.kind == OutcomeKind::Psi) {
          EXPECT_LE(p, 1e-12);
        }
      }
      EXPECT_NEAR(dist.at(OutcomeLabel::phi(0, 2, s)), phi_weight(d, k), 1e-9);
      EXPECT_NEAR(phi_total, (d - 1) * phi_weight(d, k), 1e-9);
      EXPECT_NEAR(same_total, std::pow(d, -k), 1e-9);
    }
  }
}

TEST(Pfg, LabelStrings) {
  EXPECT_EQ(OutcomeLabel::same(0).to_string(), "Same(0)");
  EXPECT_EQ(OutcomeLabel::phi(0, 1, Sign::Plus).to_string(), "Phi(0,1,+)");
  EXPECT_EQ(OutcomeLabel::psi(1, 2, Sign::Minus).to_string(), "Psi(1,2,-)");
}

}  // namespace
}  // namespace pairfuse
