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

// Sparse Fock-space states and their evolution under linear-optical
// interferometers.
//
// A transfer matrix U acts on creation operators as a_i^+ -> sum_j u_ji a_j^+.
// The induced many-photon unitary B(U) is applied term by term: every Fock
// basis state is rebuilt as a product of transformed creation operators
// acting on the vacuum, so bosonic normalization factors are exact.

#include <complex>
#include <cstddef>
#include <functional>
#include <map>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace pairfuse {

using Complex = std::complex<double>;

/// Raised when a request would exceed the sizes the engine is built for
/// (photon number, mode count, or term count).
class EngineCapacityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr int kMaxPhotons = 16;
inline constexpr double kDefaultPruneThreshold = 1e-12;

/// Occupation-number basis state |n_0, n_1, ..., n_{m-1}>.
class FockBasisState {
 public:
  FockBasisState() = default;
  explicit FockBasisState(std::vector<int> occupations);

  static FockBasisState vacuum(int mode_count);

  int mode_count() const { return static_cast<int>(occupations_.size()); }
  int photon_count() const;
  int operator[](int mode) const { return occupations_[static_cast<std::size_t>(mode)]; }
  std::span<const int> occupations() const { return occupations_; }

  // "n_0,n_1,...,n_{m-1}"
  std::string to_string() const;

  // Lexicographic on the occupation sequence.
  auto operator<=>(const FockBasisState&) const = default;
  bool operator==(const FockBasisState&) const = default;

 private:
  std::vector<int> occupations_;
};

/// Sparse complex superposition over Fock basis states of a fixed mode count.
/// Terms are kept in lexicographic order of their basis states.
class FockVector {
 public:
  using TermMap = std::map<FockBasisState, Complex>;

  explicit FockVector(int mode_count = 0) : mode_count_(mode_count) {}

  static FockVector basis(const FockBasisState& state, Complex amplitude = 1.0);
  static FockVector vacuum(int mode_count);

  int mode_count() const { return mode_count_; }
  const TermMap& terms() const { return terms_; }
  std::size_t size() const { return terms_.size(); }
  bool empty() const { return terms_.empty(); }

  /// Adds `amplitude` to the coefficient of `state`.
  void add(const FockBasisState& state, Complex amplitude);
  Complex amplitude(const FockBasisState& state) const;

  double norm_squared() const;
  bool is_normalized(double tolerance = 1e-10) const;
  FockVector normalized() const;
  FockVector scaled(Complex factor) const;
  FockVector pruned(double threshold = kDefaultPruneThreshold) const;

  /// <this|other>
  Complex inner(const FockVector& other) const;

  /// Photon numbers present in the support (sorted, unique).
  std::vector<int> photon_numbers() const;

  FockVector& operator+=(const FockVector& other);

  /// Line-oriented text: "n_0,...,n_{m-1} : re imag" per term, sorted.
  std::string to_text() const;
  static FockVector from_text(std::string_view text);

 private:
  int mode_count_ = 0;
  TermMap terms_;
};

/// Largest absolute amplitude difference over the union of supports.
double max_abs_difference(const FockVector& a, const FockVector& b);

/// m x m unitary specifying an interferometer. Entry (j, i) is u_ji, the
/// amplitude for a photon entering mode i to leave in mode j.
class TransferMatrix {
 public:
  static constexpr double kUnitarityTolerance = 1e-10;

  /// Throws std::invalid_argument if `matrix` is not square and unitary.
  explicit TransferMatrix(Eigen::MatrixXcd matrix);

  static TransferMatrix identity(int mode_count);
  static TransferMatrix hadamard();
  static TransferMatrix pauli_x();
  static TransferMatrix pauli_z();
  /// Photon in mode i moves to mode target[i].
  static TransferMatrix permutation(std::span<const int> target);
  static TransferMatrix diagonal(std::span<const Complex> phases);

  int mode_count() const { return static_cast<int>(matrix_.rows()); }
  const Eigen::MatrixXcd& matrix() const { return matrix_; }
  Complex operator()(int out_mode, int in_mode) const { return matrix_(out_mode, in_mode); }

  TransferMatrix operator*(const TransferMatrix& rhs) const;

 private:
  Eigen::MatrixXcd matrix_;
};

/// U (+) V.
TransferMatrix direct_sum(const TransferMatrix& u, const TransferMatrix& v);
/// Kronecker product; mode index = i_u * m_v + i_v.
TransferMatrix kron(const TransferMatrix& u, const TransferMatrix& v);
/// U acting on `modes` of an m-mode system, identity elsewhere.
TransferMatrix embed(const TransferMatrix& u, std::span<const int> modes, int mode_count);

/// B(U)|psi>.
FockVector apply_transfer(const TransferMatrix& u, const FockVector& psi,
                          double prune_threshold = kDefaultPruneThreshold);

/// B(U) applied to the ordered mode subset `modes`; other modes are
/// spectators. Equivalent to apply_transfer(embed(u, modes, m), psi).
FockVector apply_transfer_on_modes(const TransferMatrix& u, std::span<const int> modes,
                                   const FockVector& psi,
                                   double prune_threshold = kDefaultPruneThreshold);

/// a (x) b, with b's modes appended after a's.
FockVector tensor(const FockVector& a, const FockVector& b);

/// Born-rule distribution over full detection patterns. Requires a
/// normalized input.
std::map<FockBasisState, double> measure_all(const FockVector& psi);

struct PatternProjection {
  double probability = 0.0;
  /// Renormalized state of the unmeasured modes (ascending mode order).
  /// Empty when the probability is zero.
  FockVector residual;
};

/// Detects `pattern` on `on_modes` (pattern[q] photons on on_modes[q]).
PatternProjection project_pattern(const FockVector& psi, const FockBasisState& pattern,
                                  std::span<const int> on_modes);

// Block-diagonal evolution ----------------------------------------------------

/// Interferometer made of identical copies of `block` acting on disjoint
/// mode groups. Photon number inside each group is conserved, so the
/// evolution is computed group by group and never materializes more than
/// one conserved-count sector at a time.
class BlockDiagonalTransfer {
 public:
  /// `groups` must partition {0, ..., m-1}; each group has block.mode_count()
  /// modes, listed in the block's mode order.
  BlockDiagonalTransfer(TransferMatrix block, std::vector<std::vector<int>> groups);

  int mode_count() const { return mode_count_; }
  const TransferMatrix& block() const { return block_; }
  const std::vector<std::vector<int>>& groups() const { return groups_; }

  TransferMatrix to_dense() const;

  /// Receives one output pattern and its amplitude for each input state.
  using FunctionalSink =
      std::function<void(const FockBasisState& pattern, std::span<const Complex> amplitudes)>;

  /// Streams <pattern| B(U) |inputs[r]> for every pattern with a nonzero
  /// amplitude for at least one input. Each pattern is emitted once.
  void for_each_output(std::span<const FockVector> inputs, const FunctionalSink& sink,
                       double prune_threshold = kDefaultPruneThreshold) const;

  /// Materialized B(U)|psi>.
  FockVector apply(const FockVector& psi, double prune_threshold = kDefaultPruneThreshold) const;

 private:
  TransferMatrix block_;
  std::vector<std::vector<int>> groups_;
  std::vector<int> group_of_mode_;
  std::vector<int> slot_of_mode_;
  int mode_count_ = 0;
};

}  // namespace pairfuse
