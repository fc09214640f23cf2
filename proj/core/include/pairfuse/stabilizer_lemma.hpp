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

// Parity classification of detection patterns behind the H^{(x)k+1} (x) I_d
// interferometer, and a checker showing that +-1 eigenstates of an X-type
// mode permutation land on disjoint pattern sets.
//
// Mode mu belongs to block floor(mu / d). Block indices carry k+1 bits; the
// stabilizer I^{(x)k-p} (x) X (x) I^{(x)p} (x) I_d flips bit p.

#include <string>
#include <vector>

#include "pairfuse/fock.hpp"
#include "pairfuse/qudit.hpp"

namespace pairfuse {

struct StabilizerSpec {
  int k = 0;
  int p = 0;
  int d = 2;

  /// Throws std::invalid_argument unless k >= 0, 0 <= p <= k and d >= 2.
  static StabilizerSpec make(int k, int p, int d);

  int block_count() const { return 1 << (k + 1); }
  int mode_count() const { return block_count() * d; }
  std::string to_string() const;
};

/// Eigenvalue of the pattern under B(I^{(x)k-p} (x) Z (x) I^{(x)p} (x) I_d):
/// (-1)^s where s counts photons in blocks whose bit p is set.
Sign parity_class(const FockBasisState& pattern, const StabilizerSpec& spec);

/// I^{(x)k-p} (x) X (x) I^{(x)p} (x) I_d as a mode permutation.
TransferMatrix x_type_operator(const StabilizerSpec& spec);
/// I^{(x)k-p} (x) Z (x) I^{(x)p} (x) I_d.
TransferMatrix z_type_operator(const StabilizerSpec& spec);

/// H^{(x)k+1} (x) I_d as a dense matrix.
TransferMatrix hadamard_layer(int k, int d);
/// The same interferometer as d independent copies of H^{(x)k+1}, one per
/// residue class {i, d+i, 2d+i, ...}.
BlockDiagonalTransfer hadamard_layer_blocks(int k, int d);

struct LemmaReport {
  StabilizerSpec spec;
  std::size_t plus_support = 0;
  std::size_t minus_support = 0;
  /// Largest |amplitude| of an evolved state on a pattern of the other class.
  double max_wrong_parity_amplitude = 0.0;
  std::vector<FockBasisState> violations;
  /// Filled only when patterns are requested.
  std::vector<FockBasisState> plus_patterns;
  std::vector<FockBasisState> minus_patterns;
  bool passed = false;
};

/// Checks that B(H^{(x)k+1} (x) I_d)|psi_+> only populates S_+ patterns and
/// |psi_-> only S_- patterns. Throws std::invalid_argument if either input
/// is not the stated eigenstate of x_type_operator(spec) within `tolerance`.
LemmaReport verify_lemma(const FockVector& psi_plus, const FockVector& psi_minus, const StabilizerSpec& spec,
                         double tolerance = 1e-9, bool collect_patterns = false);

/// Fock-space pair (psi_+, psi_-) fed to verify_lemma.
struct LemmaCase {
  std::string name;
  FockVector plus;
  FockVector minus;
};

/// Eigenstate pairs arising when the fusion circuit is analysed: for p = 0,
/// psi_{i,j,+-} followed by the GHZ ancillae; for p >= 1, Xi_{i,j,+-}(2^{p+1})
/// followed by GHZ(2^q) for q = p+1..k. One case per pair i < j.
std::vector<LemmaCase> lemma_cases(const StabilizerSpec& spec);

}  // namespace pairfuse
