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

// Boosted entanglement swapping at the qudit level. The PFG acts through its
// closed-form Kraus set; M(y, z) is a single-qudit measurement that removes
// the which-term information left on one qudit.
//
// Qudit indices are 0-based throughout.

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

#include <Eigen/Dense>

#include "pairfuse/fock.hpp"
#include "pairfuse/pfg.hpp"
#include "pairfuse/qudit.hpp"

namespace pairfuse {

/// Qudit state with a role tag per qudit.
struct Register {
  QuditState state;
  std::vector<std::string> labels;

  /// Tags default to "q0", "q1", ...
  static Register make(QuditState state, std::vector<std::string> labels = {});
  int qudit_count() const { return state.qudit_count(); }
};

/// Enumerate every outcome, or draw one with a seeded generator.
struct BranchMode {
  bool sample = false;
  std::uint64_t seed = 0;

  static BranchMode enumerate() { return {}; }
  static BranchMode sampled(std::uint64_t seed) { return {true, seed}; }
};

/// Which of y0+z0 = y1+z1 (first) and y0+z1 = y1+z0 (second) hold mod d.
enum class Degeneracy { None, First, Second, Both };

Degeneracy degeneracy(PairSpec y, PairSpec z, int d);
std::string to_string(Degeneracy value);

struct MyzOutcome {
  /// "A+", "A-", "B+", "B-", "A", "B" or "fail(v)".
  std::string name;
  bool failure = false;
  /// Bra coefficients over Z_d.
  Eigen::VectorXd bra;
};

/// M(y, z). A-type outcomes use levels y0+z0, y1+z1; B-type use y0+z1,
/// y1+z0. Levels not covered get rank-one "fail" projectors.
struct MeasurementMyz {
  int d = 2;
  PairSpec y;
  PairSpec z;
  Degeneracy kind = Degeneracy::None;
  std::vector<MyzOutcome> kraus;

  static MeasurementMyz make(PairSpec y, PairSpec z, int d);
  /// max |sum_K K^dagger K - I|.
  double completeness_deviation() const;
};

struct PfgBranch {
  KrausOutcome outcome;
  double probability = 0.0;
  Register post;
};

struct MyzBranch {
  MyzOutcome outcome;
  double probability = 0.0;
  Register post;
};

/// Applies the Kraus set of a (d, k) PFG to qudits (a, b), which are removed.
/// Branches with probability below 1e-14 are dropped; posts are normalized.
std::vector<PfgBranch> apply_pfg(const Register& reg, int a, int b, int k, BranchMode mode = {});

/// apply_pfg on qudit a of `left` and qudit b of `right` for the product
/// register left (x) right, without materializing the product first.
std::vector<PfgBranch> apply_pfg_across(const Register& left, int a, const Register& right, int b, int k,
                                        BranchMode mode = {});

/// Applies M(y, z) to one qudit, which is removed.
std::vector<MyzBranch> apply_myz(const Register& reg, int qudit, const MeasurementMyz& m, BranchMode mode = {});

/// Parameters of phase * psi_intermediate(d, x, z, sign) with x.first < x.second.
struct PsiParams {
  PairSpec x;
  PairSpec z;
  Sign sign = Sign::Plus;
  Complex phase = 1.0;

  std::string to_string() const;
  auto key() const { return std::tuple(x, z, sign); }
};

/// Recognizes the four-qudit family up to a global phase (tolerance on the
/// max amplitude difference). The input is normalized first.
std::optional<PsiParams> canonical_form(const QuditState& state, double tolerance = 1e-9);

struct SwapBranch {
  /// Outcome names in the order they occurred.
  std::vector<std::string> path;
  double probability = 0.0;
  bool success = false;
  QuditState state;
  std::optional<PsiParams> params;
};

/// PFG on qudits (2, 3) of C (x) C.
std::vector<SwapBranch> fuse_cc(int d, int k, BranchMode mode = {});

/// Psi_{x,y,s} (x) C -> Psi_{x,z,s'}: PFG on qudits (3, 4), then M(y, z) on
/// qudit 2 with z the PFG outcome pair. Throws std::invalid_argument if
/// `psi` is not in the Psi family.
std::vector<SwapBranch> extend(const QuditState& psi, int k, BranchMode mode = {});

/// Psi_{x,y,s} (x) Psi_{u,v,s'} -> Psi_{x,.,s''}: PFG on qudits (3, 4), then
/// M(y, w) on qudit 2 and M(w, u) on the right state's second qudit.
std::vector<SwapBranch> bes(const QuditState& left, const QuditState& right, int k, BranchMode mode = {});

/// Fidelity of the two-qubit state left after the local maps
/// |i, i+x_a> -> |i>|a> and |j+z_b, j> -> |b>|j> with the Bell state
/// (|01> + s|10>)/sqrt(2).
double bell_fidelity(const QuditState& state, const PsiParams& params);

/// Two-qubit density matrix (basis |ab>) behind bell_fidelity.
Eigen::Matrix4cd extracted_qubit_pair(const QuditState& state, const PsiParams& params);

struct ChainStage {
  int stage = 0;
  std::size_t left_classes = 0;
  std::size_t right_classes = 0;
  double success_probability = 0.0;
  double min_pair_success = 1.0;
  double max_pair_success = 0.0;
  std::size_t success_branches = 0;
  std::size_t non_canonical = 0;
  double max_branch_probability_error = 0.0;
};

struct ChainClass {
  PsiParams params;
  double probability = 0.0;
  QuditState state;
  double bell_fidelity = 0.0;
};

struct ChainEvent {
  int stage = 0;
  std::string left;
  std::string right;
  std::vector<std::string> path;
  double probability = 0.0;
  bool success = false;
  std::optional<PsiParams> params;
};

struct ChainReport {
  int d = 0;
  int k = 0;
  int length = 0;
  double fuse_success = 0.0;
  std::vector<ChainStage> stages;
  std::vector<ChainClass> final_classes;
  double min_bell_fidelity = 1.0;
};

/// Exhaustive BES chain: start from the successful outcomes of fuse_cc,
/// then apply `length` BES steps, each against a fresh fuse_cc output.
/// Branches are merged by (x, z, sign) between stages.
ChainReport run_chain(int d, int k, int length, const std::function<void(const ChainEvent&)>& trace = {});

/// One fuse_cc outcome recomputed on photons: encode C (x) C, run the PFG
/// interferometer with its ancilla, project the detectors onto `pattern`
/// (local to the 2^{k+1} d PFG modes) and decode the remaining modes.
struct FockBranch {
  FockBasisState pattern;
  OutcomeLabel label;
  double probability = 0.0;
  QuditState state;
};

std::vector<FockBranch> fuse_cc_fock(int d, int k);

}  // namespace pairfuse
