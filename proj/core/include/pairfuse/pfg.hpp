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

#pragma once

// Pairwise fusion gate: interferometer H^{(x)k+1} (x) I_d with GHZ ancillae,
// pattern classification, and empirical Kraus tomography.
//
// Mode layout: mode mu = block * d + level. Block 0 carries input qudit 1,
// block 1 input qudit 2, blocks [2^q, 2^{q+1}) carry GHZ(2^q) for q = 1..k.

#include <compare>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "pairfuse/fock.hpp"
#include "pairfuse/qudit.hpp"
#include "pairfuse/stabilizer_lemma.hpp"

namespace pairfuse {

enum class OutcomeKind { Same, Phi, Psi };

/// Same(i), Phi(i,j,s) or Psi(i,j,s) with i < j. Same uses j == i and
/// sign Plus.
struct OutcomeLabel {
  OutcomeKind kind = OutcomeKind::Same;
  int i = 0;
  int j = 0;
  Sign sign = Sign::Plus;

  static OutcomeLabel same(int i) { return {OutcomeKind::Same, i, i, Sign::Plus}; }
  static OutcomeLabel phi(int i, int j, Sign s) { return {OutcomeKind::Phi, i, j, s}; }
  static OutcomeLabel psi(int i, int j, Sign s) { return {OutcomeKind::Psi, i, j, s}; }

  bool is_success() const { return kind != OutcomeKind::Same; }
  /// "Same(0)", "Phi(0,1,+)", "Psi(1,2,-)".
  std::string to_string() const;

  auto operator<=>(const OutcomeLabel&) const = default;
  bool operator==(const OutcomeLabel&) const = default;
};

struct KrausOutcome {
  OutcomeLabel label;
  double weight = 0.0;
};

/// c_k = sum_{p=1}^k d^{-p}; zero for k = 0.
double phi_weight(int d, int k);

/// Labels and weights of the closed-form Kraus set, ordered Same, Phi, Psi.
std::vector<KrausOutcome> kraus_set(int d, int k);

/// Real coefficients of the labeled two-qudit state over index a*d + b.
Eigen::VectorXd label_vector(const OutcomeLabel& label, int d);

/// Two-qudit state named by the label (|ii>, phi_{ij+-} or psi_{ij+-}).
QuditState label_state(const OutcomeLabel& label, int d);

struct PfgCircuit {
  int d = 2;
  int k = 0;
  /// Dense H^{(x)k+1} (x) I_d.
  TransferMatrix transfer;
  /// Same interferometer, factorized over residue classes.
  BlockDiagonalTransfer blocks;
  /// GHZ(2) (x) ... (x) GHZ(2^k) as qudits; zero qudits for k = 0.
  QuditState ancilla_qudits;
  /// Encoded ancilla; the 0-mode vacuum for k = 0.
  FockVector ancilla;

  int mode_count() const { return (2 << k) * d; }
  int ancilla_photons() const { return 2 * ((1 << k) - 1); }
  int total_photons() const { return 2 + ancilla_photons(); }

  /// encode(two_qudit (x) ancilla).
  FockVector input(const QuditState& two_qudit) const;
  FockVector input(int a, int b) const;
};

/// Throws std::invalid_argument for d < 2 or k < 0 and EngineCapacityError
/// when the photon number exceeds kMaxPhotons or the interferometer exceeds
/// 1024 modes.
PfgCircuit build_circuit(int d, int k);

/// N_i = photons in modes congruent to i mod d.
std::vector<int> conserved_counts(const FockBasisState& pattern, int d);

/// Sentinel for f(0).
inline constexpr int kInfiniteDigit = 1 << 30;

struct PatternStats {
  std::vector<int> counts;
  std::vector<int> digits;
  int v = 0;
  std::vector<int> argmin;
};

/// f(n) = smallest q >= 1 with 2^q not dividing n; kInfiniteDigit for n = 0.
int lowest_unset_digit(int n);

PatternStats pattern_stats(const FockBasisState& pattern, int d);

struct Classification {
  PatternStats stats;
  OutcomeLabel label;
};

/// Labels a detection pattern. Throws std::domain_error if the argmin set
/// does not fit the level v.
Classification classify(const FockBasisState& pattern, int d, int k);

/// Receives one pattern with its amplitude for every input |a>|b>, indexed
/// a*d + b.
using KrausSink = std::function<void(const FockBasisState& pattern, std::span<const Complex> functional)>;

/// Streams the Kraus functional of every pattern. Throws EngineCapacityError
/// beyond d <= 5 (k <= 1) or d <= 3 (k == 2).
void derive_kraus(const PfgCircuit& circuit, const KrausSink& sink);

/// Materialized derive_kraus. Only intended for small circuits; throws
/// EngineCapacityError for k >= 2 with d >= 3.
std::map<FockBasisState, Eigen::VectorXcd> derive_kraus_map(const PfgCircuit& circuit);

struct LabelSummary {
  double expected_weight = 0.0;
  double observed_weight = 0.0;
  std::size_t patterns = 0;
};

struct KrausVerification {
  int d = 0;
  int k = 0;
  std::size_t patterns = 0;
  /// max over patterns of max_ab |K[ab] - c L[ab]| with c the best phase fit.
  double max_residual = 0.0;
  /// max over labels of |observed weight - expected weight|.
  double max_weight_deviation = 0.0;
  /// max over inputs |ab> of |sum_pattern |K[ab]|^2 - 1|.
  double max_probability_deviation = 0.0;
  double empirical_failure = 0.0;
  double analytic_success = 0.0;
  double empirical_success = 0.0;
  std::map<OutcomeLabel, LabelSummary> labels;
  std::vector<std::string> failures;
  bool passed = false;
};

KrausVerification verify_kraus(const PfgCircuit& circuit, double tolerance = 1e-9);

struct PovmCheck {
  double max_deviation = 0.0;
  /// d^{-k} + (d-1) c_k - 1.
  double weight_identity_residual = 0.0;
};

/// Sum of the POVM elements of kraus_set(d, k) minus the identity, built
/// sparsely so large d stays cheap.
PovmCheck povm_completeness(int d, int k);

enum class ProbabilityMode { Analytic, Empirical };

/// Analytic 1 - d^{-(k+1)}, or the engine value on the maximally mixed input.
double success_probability(int d, int k, ProbabilityMode mode);

/// Outcome probabilities for one two-qudit input.
std::map<OutcomeLabel, double> outcome_distribution(const PfgCircuit& circuit, const QuditState& two_qudit);

/// Probability of each level v for one two-qudit input.
std::map<int, double> level_distribution(const PfgCircuit& circuit, const QuditState& two_qudit);

}  // namespace pairfuse
