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

#include "pairfuse/qudit.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace pairfuse {
namespace {

int mod(int value, int d) {
  const int r = value % d;
  return r < 0 ? r + d : r;
}

void check_dimension(int d) {
  if (d < 2) throw std::invalid_argument("qudit dimension must be >= 2, got " + std::to_string(d));
}

void check_level(int d, int level) {
  if (level < 0 || level >= d) {
    throw std::invalid_argument("level " + std::to_string(level) + " outside Z_" + std::to_string(d));
  }
}

void check_pair(int d, int i, int j) {
  check_dimension(d);
  check_level(d, i);
  check_level(d, j);
  if (i == j) throw std::invalid_argument("pairwise states need distinct levels");
}

}  // namespace

// PairSpec ------------------------------------------------------------------------

void PairSpec::validate(int d) const {
  check_pair(d, first, second);
}

PairSpec PairSpec::canonical() const {
  return first < second ? *this : swapped();
}

std::string PairSpec::to_string() const {
  return "(" + std::to_string(first) + "," + std::to_string(second) + ")";
}

// QuditState ----------------------------------------------------------------------

QuditState::QuditState(int d, int qudit_count) : d_(d), n_(qudit_count) {
  check_dimension(d);
  if (qudit_count < 0) throw std::invalid_argument("negative qudit count");
  stride_.assign(static_cast<std::size_t>(qudit_count), 1);
  Index running = 1;
  for (int q = qudit_count - 1; q >= 0; --q) {
    stride_[static_cast<std::size_t>(q)] = running;
    if (running > std::numeric_limits<Index>::max() / static_cast<Index>(d)) {
      throw EngineCapacityError("d^n does not fit a 64-bit index");
    }
    running *= static_cast<Index>(d);
  }
}

QuditState QuditState::basis(int d, std::span<const int> digits, Complex amplitude) {
  QuditState out(d, static_cast<int>(digits.size()));
  out.add(digits, amplitude);
  return out;
}

QuditState::Index QuditState::index_of(std::span<const int> digits) const {
  if (static_cast<int>(digits.size()) != n_) {
    throw std::invalid_argument("expected " + std::to_string(n_) + " digits, got " + std::to_string(digits.size()));
  }
  Index index = 0;
  for (std::size_t q = 0; q < digits.size(); ++q) {
    check_level(d_, digits[q]);
    index += static_cast<Index>(digits[q]) * stride_[q];
  }
  return index;
}

std::vector<int> QuditState::digits_of(Index index) const {
  std::vector<int> out(static_cast<std::size_t>(n_));
  for (std::size_t q = 0; q < out.size(); ++q) out[q] = static_cast<int>((index / stride_[q]) % static_cast<Index>(d_));
  return out;
}

int QuditState::digit(Index index, int qudit) const {
  return static_cast<int>((index / stride_[static_cast<std::size_t>(qudit)]) % static_cast<Index>(d_));
}

void QuditState::add(std::span<const int> digits, Complex amplitude) {
  terms_[index_of(digits)] += amplitude;
}

void QuditState::add_index(Index index, Complex amplitude) {
  terms_[index] += amplitude;
}

Complex QuditState::amplitude(std::span<const int> digits) const {
  auto it = terms_.find(index_of(digits));
  return it == terms_.end() ? Complex(0.0, 0.0) : it->second;
}

double QuditState::norm_squared() const {
  double total = 0.0;
  for (const auto& [index, amplitude] : terms_) total += std::norm(amplitude);
  return total;
}

bool QuditState::is_normalized(double tolerance) const {
  return std::abs(norm_squared() - 1.0) <= tolerance;
}

QuditState QuditState::normalized() const {
  const double norm = std::sqrt(norm_squared());
  if (norm == 0.0) throw std::domain_error("cannot normalize the zero state");
  return scaled(1.0 / norm);
}

QuditState QuditState::scaled(Complex factor) const {
  QuditState out = *this;
  for (auto& [index, amplitude] : out.terms_) amplitude *= factor;
  return out;
}

QuditState QuditState::pruned(double threshold) const {
  QuditState out = *this;
  std::erase_if(out.terms_, [&](const auto& term) { return std::abs(term.second) < threshold; });
  return out;
}

Complex QuditState::inner(const QuditState& other) const {
  if (other.d_ != d_ || other.n_ != n_) throw std::invalid_argument("shape mismatch in inner product");
  Complex total(0.0, 0.0);
  for (const auto& [index, amplitude] : terms_) {
    auto it = other.terms_.find(index);
    if (it != other.terms_.end()) total += std::conj(amplitude) * it->second;
  }
  return total;
}

QuditState QuditState::permuted(std::span<const int> order) const {
  if (static_cast<int>(order.size()) != n_) throw std::invalid_argument("permutation length mismatch");
  std::vector<int> seen(static_cast<std::size_t>(n_), 0);
  for (int q : order) {
    if (q < 0 || q >= n_ || seen[static_cast<std::size_t>(q)]++) throw std::invalid_argument("invalid qudit permutation");
  }
  QuditState out(d_, n_);
  std::vector<int> moved(static_cast<std::size_t>(n_));
  for (const auto& [index, amplitude] : terms_) {
    const auto digits = digits_of(index);
    for (std::size_t q = 0; q < moved.size(); ++q) moved[q] = digits[static_cast<std::size_t>(order[q])];
    out.add(moved, amplitude);
  }
  return out;
}

QuditState& QuditState::operator+=(const QuditState& other) {
  if (other.d_ != d_ || other.n_ != n_) throw std::invalid_argument("shape mismatch in sum");
  for (const auto& [index, amplitude] : other.terms_) terms_[index] += amplitude;
  return *this;
}

std::string QuditState::to_string() const {
  std::ostringstream out;
  out.precision(6);
  bool first = true;
  for (const auto& [index, amplitude] : terms_) {
    if (!first) out << " + ";
    first = false;
    out << '(' << amplitude.real();
    if (amplitude.imag() != 0.0) out << (amplitude.imag() < 0 ? "-" : "+") << std::abs(amplitude.imag()) << 'i';
    out << ")|";
    const auto digits = digits_of(index);
    for (std::size_t q = 0; q < digits.size(); ++q) {
      if (q) out << ',';
      out << digits[q];
    }
    out << '>';
  }
  return first ? "0" : out.str();
}

QuditState tensor(const QuditState& a, const QuditState& b) {
  if (a.dimension() != b.dimension()) throw std::invalid_argument("tensor of qudits with different dimensions");
  QuditState out(a.dimension(), a.qudit_count() + b.qudit_count());
  QuditState::Index shift = 1;
  for (int q = 0; q < b.qudit_count(); ++q) shift *= static_cast<QuditState::Index>(b.dimension());
  for (const auto& [ia, aa] : a.terms()) {
    for (const auto& [ib, ab] : b.terms()) out.add_index(ia * shift + ib, aa * ab);
  }
  return out;
}

double max_abs_difference(const QuditState& a, const QuditState& b) {
  if (a.dimension() != b.dimension() || a.qudit_count() != b.qudit_count()) {
    throw std::invalid_argument("shape mismatch in comparison");
  }
  double worst = 0.0;
  for (const auto& [index, amplitude] : a.terms()) {
    auto it = b.terms().find(index);
    worst = std::max(worst, std::abs(amplitude - (it == b.terms().end() ? Complex(0.0, 0.0) : it->second)));
  }
  for (const auto& [index, amplitude] : b.terms()) {
    if (!a.terms().contains(index)) worst = std::max(worst, std::abs(amplitude));
  }
  return worst;
}

double distance_up_to_phase(const QuditState& a, const QuditState& b) {
  const Complex overlap = b.inner(a);
  const Complex phase = std::abs(overlap) > 0.0 ? overlap / std::abs(overlap) : Complex(1.0, 0.0);
  return max_abs_difference(a, b.scaled(phase));
}

// Encoding ------------------------------------------------------------------------

FockVector encode(const QuditState& psi) {
  const int d = psi.dimension();
  const int n = psi.qudit_count();
  FockVector out(n * d);
  std::vector<int> occupation(static_cast<std::size_t>(n * d), 0);
  for (const auto& [index, amplitude] : psi.terms()) {
    std::fill(occupation.begin(), occupation.end(), 0);
    const auto digits = psi.digits_of(index);
    for (int q = 0; q < n; ++q) occupation[static_cast<std::size_t>(q * d + digits[static_cast<std::size_t>(q)])] = 1;
    out.add(FockBasisState(occupation), amplitude);
  }
  return out;
}

QuditState decode(const FockVector& phi, int d) {
  check_dimension(d);
  if (phi.mode_count() % d != 0) {
    throw std::invalid_argument("mode count " + std::to_string(phi.mode_count()) + " is not a multiple of d = " +
                                std::to_string(d));
  }
  const int n = phi.mode_count() / d;
  QuditState out(d, n);
  std::vector<int> digits(static_cast<std::size_t>(n));
  for (const auto& [state, amplitude] : phi.terms()) {
    for (int q = 0; q < n; ++q) {
      int photons = 0;
      for (int i = 0; i < d; ++i) {
        const int occ = state[q * d + i];
        photons += occ;
        if (occ == 1) digits[static_cast<std::size_t>(q)] = i;
      }
      if (photons != 1) {
        throw std::domain_error("term |" + state.to_string() + "> has " + std::to_string(photons) +
                                " photons in block " + std::to_string(q) + "; not a d-rail code state");
      }
    }
    out.add(digits, amplitude);
  }
  return out;
}

// Named states --------------------------------------------------------------------

QuditState pairwise_psi(int d, int i, int j, Sign sign) {
  check_pair(d, i, j);
  const double s = 1.0 / std::sqrt(2.0);
  QuditState out(d, 2);
  out.add(std::vector{i, j}, s);
  out.add(std::vector{j, i}, s * to_int(sign));
  return out;
}

QuditState pairwise_phi(int d, int i, int j, Sign sign) {
  check_pair(d, i, j);
  const double s = 1.0 / std::sqrt(2.0);
  QuditState out(d, 2);
  out.add(std::vector{i, i}, s);
  out.add(std::vector{j, j}, s * to_int(sign));
  return out;
}

QuditState ghz(int d, int n) {
  check_dimension(d);
  if (n < 1) throw std::invalid_argument("GHZ state needs at least one qudit");
  QuditState out(d, n);
  const double amp = 1.0 / std::sqrt(static_cast<double>(d));
  for (int i = 0; i < d; ++i) out.add(std::vector<int>(static_cast<std::size_t>(n), i), amp);
  return out;
}

QuditState ghz_pair(int d, int i, int j, Sign sign, int n) {
  check_pair(d, i, j);
  if (n < 1) throw std::invalid_argument("GHZ pair state needs at least one qudit");
  const double s = 1.0 / std::sqrt(2.0);
  QuditState out(d, n);
  out.add(std::vector<int>(static_cast<std::size_t>(n), i), s);
  out.add(std::vector<int>(static_cast<std::size_t>(n), j), s * to_int(sign));
  return out;
}

QuditState xi_state(int d, int i, int j, Sign sign, int half) {
  check_pair(d, i, j);
  if (half < 1) throw std::invalid_argument("Xi state needs half >= 1");
  const double s = 1.0 / std::sqrt(2.0);
  const auto h = static_cast<std::size_t>(half);
  std::vector<int> ij(2 * h, i);
  std::vector<int> ji(2 * h, j);
  std::fill(ij.begin() + static_cast<std::ptrdiff_t>(h), ij.end(), j);
  std::fill(ji.begin() + static_cast<std::ptrdiff_t>(h), ji.end(), i);
  QuditState out(d, 2 * half);
  out.add(ij, s);
  out.add(ji, s * to_int(sign));
  return out;
}

QuditState c_state(int d) {
  check_dimension(d);
  QuditState out(d, 3);
  const double amp = 1.0 / d;
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < d; ++j) out.add(std::vector{i, mod(i + j, d), j}, amp);
  }
  return out;
}

QuditState psi_intermediate(int d, PairSpec x, PairSpec y, Sign sign) {
  check_dimension(d);
  x.validate(d);
  y.validate(d);
  QuditState out(d, 4);
  const double amp = 1.0 / (d * std::sqrt(2.0));
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < d; ++j) {
      out.add(std::vector{i, mod(i + x.first, d), mod(j + y.second, d), j}, amp);
      out.add(std::vector{i, mod(i + x.second, d), mod(j + y.first, d), j}, amp * to_int(sign));
    }
  }
  return out;
}

// Analysis ------------------------------------------------------------------------

Eigen::VectorXd schmidt_coefficients(const QuditState& psi, int left_qudits) {
  if (left_qudits < 0 || left_qudits > psi.qudit_count()) throw std::invalid_argument("invalid bipartition");
  QuditState::Index right_dim = 1;
  for (int q = left_qudits; q < psi.qudit_count(); ++q) right_dim *= static_cast<QuditState::Index>(psi.dimension());
  QuditState::Index left_dim = 1;
  for (int q = 0; q < left_qudits; ++q) left_dim *= static_cast<QuditState::Index>(psi.dimension());
  if (left_dim * right_dim > (QuditState::Index{1} << 26)) {
    throw EngineCapacityError("bipartition matrix too large for a dense SVD");
  }
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(left_dim), static_cast<Eigen::Index>(right_dim));
  for (const auto& [index, amplitude] : psi.terms()) {
    m(static_cast<Eigen::Index>(index / right_dim), static_cast<Eigen::Index>(index % right_dim)) = amplitude;
  }
  Eigen::BDCSVD<Eigen::MatrixXcd> svd(m);
  return svd.singularValues();
}

int schmidt_rank(const QuditState& psi, int left_qudits, double tolerance) {
  const Eigen::VectorXd sv = schmidt_coefficients(psi, left_qudits);
  return static_cast<int>((sv.array() > tolerance).count());
}

Eigen::MatrixXcd reduced_density(const QuditState& psi, int qudit) {
  if (qudit < 0 || qudit >= psi.qudit_count()) throw std::out_of_range("qudit index out of range");
  const int d = psi.dimension();
  // Group amplitudes by the other qudits' digits.
  std::map<std::vector<int>, std::vector<Complex>> rows;
  for (const auto& [index, amplitude] : psi.terms()) {
    auto digits = psi.digits_of(index);
    const int level = digits[static_cast<std::size_t>(qudit)];
    digits.erase(digits.begin() + qudit);
    auto [it, inserted] = rows.try_emplace(std::move(digits), static_cast<std::size_t>(d), Complex(0.0, 0.0));
    it->second[static_cast<std::size_t>(level)] += amplitude;
  }
  Eigen::MatrixXcd rho = Eigen::MatrixXcd::Zero(d, d);
  for (const auto& [rest, column] : rows) {
    for (int a = 0; a < d; ++a) {
      for (int b = 0; b < d; ++b) rho(a, b) += column[static_cast<std::size_t>(a)] * std::conj(column[static_cast<std::size_t>(b)]);
    }
  }
  return rho;
}

}  // namespace pairfuse
