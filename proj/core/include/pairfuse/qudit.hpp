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

// Qudit registers, the d-rail encoding into Fock space, and constructors for
// the named states used by the fusion and swapping code.

#include <complex>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "pairfuse/fock.hpp"

namespace pairfuse {

enum class Sign : int { Plus = 1, Minus = -1 };

inline int to_int(Sign s) { return static_cast<int>(s); }
inline char to_char(Sign s) { return s == Sign::Plus ? '+' : '-'; }
inline Sign flip(Sign s) { return s == Sign::Plus ? Sign::Minus : Sign::Plus; }
inline Sign operator*(Sign a, Sign b) { return to_int(a) * to_int(b) > 0 ? Sign::Plus : Sign::Minus; }

/// Ordered pair of distinct levels, e.g. x = (x_0, x_1).
struct PairSpec {
  int first = 0;
  int second = 1;

  /// Throws std::invalid_argument when first == second or a level is
  /// outside Z_d.
  void validate(int d) const;
  /// Sorted copy (first < second).
  PairSpec canonical() const;
  PairSpec swapped() const { return {second, first}; }
  std::string to_string() const;

  auto operator<=>(const PairSpec&) const = default;
  bool operator==(const PairSpec&) const = default;
};

/// Sparse state of n qudits of dimension d. Basis tuples are stored as
/// mixed-radix indices (first qudit most significant), so iteration order is
/// lexicographic in the tuple.
class QuditState {
 public:
  using Index = std::uint64_t;
  using TermMap = std::map<Index, Complex>;

  QuditState() = default;
  QuditState(int d, int qudit_count);

  static QuditState basis(int d, std::span<const int> digits, Complex amplitude = 1.0);

  int dimension() const { return d_; }
  int qudit_count() const { return n_; }
  const TermMap& terms() const { return terms_; }
  std::size_t size() const { return terms_.size(); }
  bool empty() const { return terms_.empty(); }

  Index index_of(std::span<const int> digits) const;
  std::vector<int> digits_of(Index index) const;
  int digit(Index index, int qudit) const;

  void add(std::span<const int> digits, Complex amplitude);
  void add_index(Index index, Complex amplitude);
  Complex amplitude(std::span<const int> digits) const;

  double norm_squared() const;
  bool is_normalized(double tolerance = 1e-10) const;
  QuditState normalized() const;
  QuditState scaled(Complex factor) const;
  QuditState pruned(double threshold = kDefaultPruneThreshold) const;

  /// <this|other>
  Complex inner(const QuditState& other) const;

  /// Qudit q of the result is qudit order[q] of this state.
  QuditState permuted(std::span<const int> order) const;

  QuditState& operator+=(const QuditState& other);

  std::string to_string() const;

 private:
  int d_ = 2;
  int n_ = 0;
  std::vector<Index> stride_;
  TermMap terms_;
};

QuditState tensor(const QuditState& a, const QuditState& b);
double max_abs_difference(const QuditState& a, const QuditState& b);

/// Smallest |a - e^{i theta} b| over global phases (max-norm on amplitudes),
/// with the aligning phase chosen from the overlap <b|a>.
double distance_up_to_phase(const QuditState& a, const QuditState& b);

// d-rail encoding ----------------------------------------------------------------

/// Qudit q in level i becomes one photon in mode q*d + i.
FockVector encode(const QuditState& psi);

/// Inverse of encode on the single-photon-per-block subspace. Throws
/// std::domain_error for any term outside it.
QuditState decode(const FockVector& phi, int d);

// Named states ----------------------------------------------------------------------

/// (|i>|j> +- |j>|i>)/sqrt(2)
QuditState pairwise_psi(int d, int i, int j, Sign sign);
/// (|i>|i> +- |j>|j>)/sqrt(2)
QuditState pairwise_phi(int d, int i, int j, Sign sign);
/// sum_i |i>^{(x) n} / sqrt(d)
QuditState ghz(int d, int n);
/// (|i>^{(x) n} +- |j>^{(x) n})/sqrt(2)
QuditState ghz_pair(int d, int i, int j, Sign sign, int n);
/// (|i>^{(x) h}|j>^{(x) h} +- |j>^{(x) h}|i>^{(x) h})/sqrt(2) on 2h qudits.
QuditState xi_state(int d, int i, int j, Sign sign, int half);
/// d^{-1} sum_{i,j} |i, i+j, j>
QuditState c_state(int d);
/// (d sqrt 2)^{-1} sum_{i,j} (|i, i+x_0, j+y_1, j> +- |i, i+x_1, j+y_0, j>)
QuditState psi_intermediate(int d, PairSpec x, PairSpec y, Sign sign);

// Analysis ------------------------------------------------------------------------

/// Singular values of the amplitude matrix for the cut after `left_qudits`.
Eigen::VectorXd schmidt_coefficients(const QuditState& psi, int left_qudits);
int schmidt_rank(const QuditState& psi, int left_qudits, double tolerance = 1e-9);
/// Reduced density matrix of one qudit.
Eigen::MatrixXcd reduced_density(const QuditState& psi, int qudit);

}  // namespace pairfuse
