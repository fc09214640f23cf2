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

#include "pairfuse/fock.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <iomanip>
#include <numeric>
#include <optional>
#include <sstream>
#include <utility>

namespace pairfuse {
namespace {

const std::array<double, kMaxPhotons + 1>& sqrt_factorials() {
  static const std::array<double, kMaxPhotons + 1> table = [] {
    std::array<double, kMaxPhotons + 1> t{};
    double factorial = 1.0;
    for (std::size_t n = 0; n < t.size(); ++n) {
      if (n > 0) factorial *= static_cast<double>(n);
      t[n] = std::sqrt(factorial);
    }
    return t;
  }();
  return table;
}

const std::array<double, kMaxPhotons + 2>& sqrt_ints() {
  static const std::array<double, kMaxPhotons + 2> table = [] {
    std::array<double, kMaxPhotons + 2> t{};
    for (std::size_t i = 0; i < t.size(); ++i) t[i] = std::sqrt(static_cast<double>(i));
    return t;
  }();
  return table;
}

void check_photons(int n) {
  if (n > kMaxPhotons) {
    throw EngineCapacityError("photon number " + std::to_string(n) + " exceeds engine limit " +
                              std::to_string(kMaxPhotons));
  }
}

using Occupation = std::vector<int>;
using Expansion = std::vector<std::pair<Occupation, Complex>>;

// Expands prod_i (sum_j u_ji a_j^+)^{n_i} / sqrt(n_i!) |vac> one creation
// operator at a time, merging equal terms after every step.
class CreationExpander {
 public:
  explicit CreationExpander(const TransferMatrix& u) : columns_(static_cast<std::size_t>(u.mode_count())) {
    const int m = u.mode_count();
    for (int i = 0; i < m; ++i) {
      for (int j = 0; j < m; ++j) {
        const Complex value = u(j, i);
        if (value != Complex(0.0, 0.0)) columns_[static_cast<std::size_t>(i)].emplace_back(j, value);
      }
    }
  }

  const Expansion& expand(const Occupation& occupation) {
    auto it = cache_.find(occupation);
    if (it != cache_.end()) return it->second;

    const int total = std::accumulate(occupation.begin(), occupation.end(), 0);
    check_photons(total);
    double norm = 1.0;
    for (int n : occupation) norm *= sqrt_factorials()[static_cast<std::size_t>(n)];

    std::map<Occupation, Complex> current;
    current.emplace(Occupation(occupation.size(), 0), Complex(1.0 / norm, 0.0));
    for (std::size_t i = 0; i < occupation.size(); ++i) {
      for (int t = 0; t < occupation[i]; ++t) {
        std::map<Occupation, Complex> next;
        for (const auto& [state, amplitude] : current) {
          for (const auto& [j, u_ji] : columns_[i]) {
            Occupation grown = state;
            const int after = ++grown[static_cast<std::size_t>(j)];
            next[std::move(grown)] += amplitude * u_ji * sqrt_ints()[static_cast<std::size_t>(after)];
          }
        }
        current = std::move(next);
      }
    }
    Expansion out;
    out.reserve(current.size());
    for (auto& [state, amplitude] : current) out.emplace_back(state, amplitude);
    return cache_.emplace(occupation, std::move(out)).first->second;
  }

 private:
  std::vector<std::vector<std::pair<int, Complex>>> columns_;
  std::map<Occupation, Expansion> cache_;
};

std::vector<int> validated_modes(std::span<const int> modes, int mode_count) {
  std::vector<int> seen(static_cast<std::size_t>(mode_count), 0);
  for (int mode : modes) {
    if (mode < 0 || mode >= mode_count) {
      throw std::out_of_range("mode index " + std::to_string(mode) + " out of range for " +
                              std::to_string(mode_count) + " modes");
    }
    if (seen[static_cast<std::size_t>(mode)]++) {
      throw std::invalid_argument("duplicate mode index " + std::to_string(mode));
    }
  }
  return {modes.begin(), modes.end()};
}

}  // namespace

// FockBasisState ---------------------------------------------------------------

FockBasisState::FockBasisState(std::vector<int> occupations) : occupations_(std::move(occupations)) {
  for (int n : occupations_) {
    if (n < 0) throw std::invalid_argument("negative occupation number");
  }
}

FockBasisState FockBasisState::vacuum(int mode_count) {
  if (mode_count < 0) throw std::invalid_argument("negative mode count");
  return FockBasisState(std::vector<int>(static_cast<std::size_t>(mode_count), 0));
}

int FockBasisState::photon_count() const {
  return std::accumulate(occupations_.begin(), occupations_.end(), 0);
}

std::string FockBasisState::to_string() const {
  std::string out;
  for (std::size_t i = 0; i < occupations_.size(); ++i) {
    if (i) out += ',';
    out += std::to_string(occupations_[i]);
  }
  return out;
}

// FockVector -------------------------------------------------------------------

FockVector FockVector::basis(const FockBasisState& state, Complex amplitude) {
  FockVector out(state.mode_count());
  out.add(state, amplitude);
  return out;
}

FockVector FockVector::vacuum(int mode_count) {
  return basis(FockBasisState::vacuum(mode_count));
}

void FockVector::add(const FockBasisState& state, Complex amplitude) {
  if (state.mode_count() != mode_count_) {
    throw std::invalid_argument("basis state has " + std::to_string(state.mode_count()) +
                                " modes, vector has " + std::to_string(mode_count_));
  }
  terms_[state] += amplitude;
}

Complex FockVector::amplitude(const FockBasisState& state) const {
  auto it = terms_.find(state);
  return it == terms_.end() ? Complex(0.0, 0.0) : it->second;
}

double FockVector::norm_squared() const {
  double total = 0.0;
  for (const auto& [state, amplitude] : terms_) total += std::norm(amplitude);
  return total;
}

bool FockVector::is_normalized(double tolerance) const {
  return std::abs(norm_squared() - 1.0) <= tolerance;
}

FockVector FockVector::normalized() const {
  const double norm = std::sqrt(norm_squared());
  if (norm == 0.0) throw std::domain_error("cannot normalize the zero vector");
  return scaled(1.0 / norm);
}

FockVector FockVector::scaled(Complex factor) const {
  FockVector out(mode_count_);
  for (const auto& [state, amplitude] : terms_) out.terms_.emplace_hint(out.terms_.end(), state, amplitude * factor);
  return out;
}

FockVector FockVector::pruned(double threshold) const {
  FockVector out(mode_count_);
  for (const auto& [state, amplitude] : terms_) {
    if (std::abs(amplitude) >= threshold) out.terms_.emplace_hint(out.terms_.end(), state, amplitude);
  }
  return out;
}

Complex FockVector::inner(const FockVector& other) const {
  if (other.mode_count_ != mode_count_) throw std::invalid_argument("mode count mismatch in inner product");
  Complex total(0.0, 0.0);
  const auto& small = terms_.size() <= other.terms_.size() ? terms_ : other.terms_;
  const bool this_small = &small == &terms_;
  for (const auto& [state, amplitude] : small) {
    const Complex other_amp = this_small ? other.amplitude(state) : amplitude;
    const Complex this_amp = this_small ? amplitude : this->amplitude(state);
    total += std::conj(this_amp) * other_amp;
  }
  return total;
}

std::vector<int> FockVector::photon_numbers() const {
  std::vector<int> out;
  for (const auto& [state, amplitude] : terms_) out.push_back(state.photon_count());
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

FockVector& FockVector::operator+=(const FockVector& other) {
  if (other.mode_count_ != mode_count_) throw std::invalid_argument("mode count mismatch in sum");
  for (const auto& [state, amplitude] : other.terms_) terms_[state] += amplitude;
  return *this;
}

std::string FockVector::to_text() const {
  std::ostringstream out;
  out << std::setprecision(17);
  for (const auto& [state, amplitude] : terms_) {
    out << state.to_string() << " : " << amplitude.real() << ' ' << amplitude.imag() << '\n';
  }
  return out.str();
}

FockVector FockVector::from_text(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string line;
  std::optional<FockVector> out;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const auto colon = line.find(':');
    if (colon == std::string::npos) {
      throw std::invalid_argument("line " + std::to_string(line_no) + ": missing ':'");
    }
    std::vector<int> occupations;
    std::istringstream occ_in(line.substr(0, colon));
    std::string field;
    while (std::getline(occ_in, field, ',')) {
      const auto first = field.find_first_not_of(' ');
      const auto last = field.find_last_not_of(' ');
      if (first == std::string::npos) throw std::invalid_argument("line " + std::to_string(line_no) + ": empty occupation");
      int value = 0;
      const auto* begin = field.data() + first;
      const auto* end = field.data() + last + 1;
      auto [ptr, ec] = std::from_chars(begin, end, value);
      if (ec != std::errc() || ptr != end) {
        throw std::invalid_argument("line " + std::to_string(line_no) + ": bad occupation '" + field + "'");
      }
      occupations.push_back(value);
    }
    std::istringstream amp_in(line.substr(colon + 1));
    double re = 0.0;
    double im = 0.0;
    if (!(amp_in >> re >> im)) throw std::invalid_argument("line " + std::to_string(line_no) + ": bad amplitude");
    FockBasisState state(std::move(occupations));
    if (!out) out.emplace(state.mode_count());
    out->add(state, Complex(re, im));
  }
  return out ? *std::move(out) : FockVector(0);
}

double max_abs_difference(const FockVector& a, const FockVector& b) {
  double worst = 0.0;
  for (const auto& [state, amplitude] : a.terms()) worst = std::max(worst, std::abs(amplitude - b.amplitude(state)));
  for (const auto& [state, amplitude] : b.terms()) {
    if (!a.terms().contains(state)) worst = std::max(worst, std::abs(amplitude));
  }
  return worst;
}

// TransferMatrix ---------------------------------------------------------------

TransferMatrix::TransferMatrix(Eigen::MatrixXcd matrix) : matrix_(std::move(matrix)) {
  if (matrix_.rows() != matrix_.cols()) throw std::invalid_argument("transfer matrix must be square");
  const Eigen::MatrixXcd gram = matrix_.adjoint() * matrix_;
  const Eigen::MatrixXcd deviation = gram - Eigen::MatrixXcd::Identity(matrix_.rows(), matrix_.cols());
  const double worst = matrix_.size() == 0 ? 0.0 : deviation.cwiseAbs().maxCoeff();
  if (worst > kUnitarityTolerance) {
    std::ostringstream msg;
    msg << "transfer matrix is not unitary (max |U^dag U - I| = " << worst << ")";
    throw std::invalid_argument(msg.str());
  }
}

TransferMatrix TransferMatrix::identity(int mode_count) {
  return TransferMatrix(Eigen::MatrixXcd::Identity(mode_count, mode_count));
}

TransferMatrix TransferMatrix::hadamard() {
  Eigen::MatrixXcd h(2, 2);
  const double s = 1.0 / std::sqrt(2.0);
  h << s, s, s, -s;
  return TransferMatrix(std::move(h));
}

TransferMatrix TransferMatrix::pauli_x() {
  Eigen::MatrixXcd x(2, 2);
  x << 0, 1, 1, 0;
  return TransferMatrix(std::move(x));
}

TransferMatrix TransferMatrix::pauli_z() {
  Eigen::MatrixXcd z(2, 2);
  z << 1, 0, 0, -1;
  return TransferMatrix(std::move(z));
}

TransferMatrix TransferMatrix::permutation(std::span<const int> target) {
  const int m = static_cast<int>(target.size());
  validated_modes(target, m);
  Eigen::MatrixXcd p = Eigen::MatrixXcd::Zero(m, m);
  for (int i = 0; i < m; ++i) p(target[static_cast<std::size_t>(i)], i) = 1.0;
  return TransferMatrix(std::move(p));
}

TransferMatrix TransferMatrix::diagonal(std::span<const Complex> phases) {
  const int m = static_cast<int>(phases.size());
  Eigen::MatrixXcd diag = Eigen::MatrixXcd::Zero(m, m);
  for (int i = 0; i < m; ++i) diag(i, i) = phases[static_cast<std::size_t>(i)];
  return TransferMatrix(std::move(diag));
}

TransferMatrix TransferMatrix::operator*(const TransferMatrix& rhs) const {
  if (rhs.mode_count() != mode_count()) throw std::invalid_argument("transfer matrix size mismatch");
  return TransferMatrix(matrix_ * rhs.matrix_);
}

TransferMatrix direct_sum(const TransferMatrix& u, const TransferMatrix& v) {
  const int a = u.mode_count();
  const int b = v.mode_count();
  Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(a + b, a + b);
  out.topLeftCorner(a, a) = u.matrix();
  out.bottomRightCorner(b, b) = v.matrix();
  return TransferMatrix(std::move(out));
}

TransferMatrix kron(const TransferMatrix& u, const TransferMatrix& v) {
  const int a = u.mode_count();
  const int b = v.mode_count();
  Eigen::MatrixXcd out(a * b, a * b);
  for (int i = 0; i < a; ++i) {
    for (int j = 0; j < a; ++j) out.block(i * b, j * b, b, b) = u(i, j) * v.matrix();
  }
  return TransferMatrix(std::move(out));
}

TransferMatrix embed(const TransferMatrix& u, std::span<const int> modes, int mode_count) {
  if (static_cast<int>(modes.size()) != u.mode_count()) {
    throw std::invalid_argument("mode subset size does not match transfer matrix");
  }
  const auto checked = validated_modes(modes, mode_count);
  Eigen::MatrixXcd out = Eigen::MatrixXcd::Identity(mode_count, mode_count);
  for (std::size_t r = 0; r < checked.size(); ++r) {
    for (std::size_t c = 0; c < checked.size(); ++c) {
      out(checked[r], checked[c]) = u(static_cast<int>(r), static_cast<int>(c));
    }
  }
  return TransferMatrix(std::move(out));
}

// Evolution --------------------------------------------------------------------

FockVector apply_transfer(const TransferMatrix& u, const FockVector& psi, double prune_threshold) {
  if (u.mode_count() != psi.mode_count()) {
    throw std::invalid_argument("transfer matrix has " + std::to_string(u.mode_count()) +
                                " modes, state has " + std::to_string(psi.mode_count()));
  }
  std::vector<int> all(static_cast<std::size_t>(psi.mode_count()));
  std::iota(all.begin(), all.end(), 0);
  return apply_transfer_on_modes(u, all, psi, prune_threshold);
}

FockVector apply_transfer_on_modes(const TransferMatrix& u, std::span<const int> modes,
                                   const FockVector& psi, double prune_threshold) {
  if (static_cast<int>(modes.size()) != u.mode_count()) {
    throw std::invalid_argument("mode subset has " + std::to_string(modes.size()) +
                                " entries, transfer matrix has " + std::to_string(u.mode_count()) + " modes");
  }
  const auto subset = validated_modes(modes, psi.mode_count());
  CreationExpander expander(u);

  std::map<FockBasisState, Complex> accumulated;
  Occupation local(subset.size());
  for (const auto& [state, amplitude] : psi.terms()) {
    for (std::size_t q = 0; q < subset.size(); ++q) local[q] = state[subset[q]];
    const Expansion& expansion = expander.expand(local);
    std::vector<int> full(state.occupations().begin(), state.occupations().end());
    for (const auto& [out_local, coefficient] : expansion) {
      for (std::size_t q = 0; q < subset.size(); ++q) full[static_cast<std::size_t>(subset[q])] = out_local[q];
      accumulated[FockBasisState(full)] += amplitude * coefficient;
    }
  }
  FockVector out(psi.mode_count());
  for (const auto& [state, amplitude] : accumulated) {
    if (std::abs(amplitude) >= prune_threshold) out.add(state, amplitude);
  }
  return out;
}

FockVector tensor(const FockVector& a, const FockVector& b) {
  FockVector out(a.mode_count() + b.mode_count());
  std::vector<int> joined(static_cast<std::size_t>(out.mode_count()));
  for (const auto& [sa, aa] : a.terms()) {
    std::copy(sa.occupations().begin(), sa.occupations().end(), joined.begin());
    for (const auto& [sb, ab] : b.terms()) {
      std::copy(sb.occupations().begin(), sb.occupations().end(), joined.begin() + a.mode_count());
      out.add(FockBasisState(joined), aa * ab);
    }
  }
  return out;
}

std::map<FockBasisState, double> measure_all(const FockVector& psi) {
  if (!psi.is_normalized()) throw std::domain_error("measure_all requires a normalized state");
  std::map<FockBasisState, double> out;
  for (const auto& [state, amplitude] : psi.terms()) {
    const double p = std::norm(amplitude);
    if (p > 0.0) out.emplace_hint(out.end(), state, p);
  }
  return out;
}

PatternProjection project_pattern(const FockVector& psi, const FockBasisState& pattern,
                                  std::span<const int> on_modes) {
  if (pattern.mode_count() != static_cast<int>(on_modes.size())) {
    throw std::invalid_argument("pattern length does not match the measured mode subset");
  }
  const auto measured = validated_modes(on_modes, psi.mode_count());
  std::vector<char> is_measured(static_cast<std::size_t>(psi.mode_count()), 0);
  for (int mode : measured) is_measured[static_cast<std::size_t>(mode)] = 1;
  std::vector<int> rest;
  for (int mode = 0; mode < psi.mode_count(); ++mode) {
    if (!is_measured[static_cast<std::size_t>(mode)]) rest.push_back(mode);
  }

  FockVector residual(static_cast<int>(rest.size()));
  std::vector<int> rest_occ(rest.size());
  for (const auto& [state, amplitude] : psi.terms()) {
    bool match = true;
    for (std::size_t q = 0; q < measured.size() && match; ++q) match = state[measured[q]] == pattern[static_cast<int>(q)];
    if (!match) continue;
    for (std::size_t q = 0; q < rest.size(); ++q) rest_occ[q] = state[rest[q]];
    residual.add(FockBasisState(rest_occ), amplitude);
  }
  const double norm2 = psi.norm_squared();
  PatternProjection out;
  const double hit = residual.norm_squared();
  if (hit == 0.0 || norm2 == 0.0) {
    out.residual = FockVector(static_cast<int>(rest.size()));
    return out;
  }
  out.probability = hit / norm2;
  out.residual = residual.scaled(1.0 / std::sqrt(hit));
  return out;
}

// BlockDiagonalTransfer -------------------------------------------------------

BlockDiagonalTransfer::BlockDiagonalTransfer(TransferMatrix block, std::vector<std::vector<int>> groups)
    : block_(std::move(block)), groups_(std::move(groups)) {
  const auto width = static_cast<std::size_t>(block_.mode_count());
  mode_count_ = static_cast<int>(groups_.size() * width);
  group_of_mode_.assign(static_cast<std::size_t>(mode_count_), -1);
  slot_of_mode_.assign(static_cast<std::size_t>(mode_count_), -1);
  for (std::size_t g = 0; g < groups_.size(); ++g) {
    if (groups_[g].size() != width) throw std::invalid_argument("mode group size does not match block");
    for (std::size_t s = 0; s < width; ++s) {
      const int mode = groups_[g][s];
      if (mode < 0 || mode >= mode_count_) throw std::out_of_range("mode group index out of range");
      if (group_of_mode_[static_cast<std::size_t>(mode)] != -1) throw std::invalid_argument("mode groups overlap");
      group_of_mode_[static_cast<std::size_t>(mode)] = static_cast<int>(g);
      slot_of_mode_[static_cast<std::size_t>(mode)] = static_cast<int>(s);
    }
  }
}

TransferMatrix BlockDiagonalTransfer::to_dense() const {
  Eigen::MatrixXcd out = Eigen::MatrixXcd::Zero(mode_count_, mode_count_);
  for (const auto& group : groups_) {
    for (std::size_t r = 0; r < group.size(); ++r) {
      for (std::size_t c = 0; c < group.size(); ++c) {
        out(group[r], group[c]) = block_(static_cast<int>(r), static_cast<int>(c));
      }
    }
  }
  return TransferMatrix(std::move(out));
}

void BlockDiagonalTransfer::for_each_output(std::span<const FockVector> inputs, const FunctionalSink& sink,
                                            double prune_threshold) const {
  const std::size_t group_count = groups_.size();
  const std::size_t width = static_cast<std::size_t>(block_.mode_count());

  // One contribution = one basis term of one input, split into per-group
  // local occupations. Contributions are bucketed by their per-group photon
  // counts; distinct buckets never interfere.
  struct Contribution {
    std::size_t input;
    Complex amplitude;
    std::vector<Occupation> local;
  };
  std::map<std::vector<int>, std::vector<Contribution>> sectors;
  for (std::size_t r = 0; r < inputs.size(); ++r) {
    if (inputs[r].mode_count() != mode_count_) throw std::invalid_argument("input mode count mismatch");
    for (const auto& [state, amplitude] : inputs[r].terms()) {
      Contribution c{r, amplitude, std::vector<Occupation>(group_count, Occupation(width, 0))};
      std::vector<int> counts(group_count, 0);
      for (int mode = 0; mode < mode_count_; ++mode) {
        const int n = state[mode];
        if (n == 0) continue;
        const auto g = static_cast<std::size_t>(group_of_mode_[static_cast<std::size_t>(mode)]);
        c.local[g][static_cast<std::size_t>(slot_of_mode_[static_cast<std::size_t>(mode)])] = n;
        counts[g] += n;
      }
      sectors[counts].push_back(std::move(c));
    }
  }

  CreationExpander expander(block_);
  std::vector<Complex> functional(inputs.size());
  std::vector<int> full(static_cast<std::size_t>(mode_count_), 0);

  for (const auto& [counts, contributions] : sectors) {
    const std::size_t nc = contributions.size();
    // Per group: union of local output patterns, with each contribution's
    // amplitude on that pattern.
    std::vector<std::vector<std::pair<Occupation, std::vector<Complex>>>> factors(group_count);
    for (std::size_t g = 0; g < group_count; ++g) {
      std::map<Occupation, std::vector<Complex>> merged;
      for (std::size_t c = 0; c < nc; ++c) {
        for (const auto& [out_local, coefficient] : expander.expand(contributions[c].local[g])) {
          auto [it, inserted] = merged.try_emplace(out_local, nc, Complex(0.0, 0.0));
          it->second[c] += coefficient;
        }
      }
      factors[g].assign(merged.begin(), merged.end());
    }

    // Odometer over the product of per-group patterns.
    std::vector<std::size_t> index(group_count, 0);
    std::vector<Complex> partial(nc);
    bool done = false;
    while (!done) {
      std::fill(partial.begin(), partial.end(), Complex(0.0, 0.0));
      for (std::size_t c = 0; c < nc; ++c) {
        Complex value = contributions[c].amplitude;
        for (std::size_t g = 0; g < group_count && value != Complex(0.0, 0.0); ++g) {
          value *= factors[g][index[g]].second[c];
        }
        partial[c] = value;
      }
      std::fill(functional.begin(), functional.end(), Complex(0.0, 0.0));
      for (std::size_t c = 0; c < nc; ++c) functional[contributions[c].input] += partial[c];
      bool any = false;
      for (Complex& value : functional) {
        if (std::abs(value) < prune_threshold) {
          value = Complex(0.0, 0.0);
        } else {
          any = true;
        }
      }
      if (any) {
        for (std::size_t g = 0; g < group_count; ++g) {
          const Occupation& local = factors[g][index[g]].first;
          for (std::size_t s = 0; s < width; ++s) full[static_cast<std::size_t>(groups_[g][s])] = local[s];
        }
        sink(FockBasisState(full), functional);
      }

      std::size_t g = group_count;
      while (true) {
        if (g == 0) {
          done = true;
          break;
        }
        --g;
        if (++index[g] < factors[g].size()) break;
        index[g] = 0;
      }
    }
  }
}

FockVector BlockDiagonalTransfer::apply(const FockVector& psi, double prune_threshold) const {
  FockVector out(mode_count_);
  std::map<FockBasisState, Complex> collected;
  for_each_output(std::span<const FockVector>(&psi, 1),
                  [&](const FockBasisState& pattern, std::span<const Complex> amplitudes) {
                    collected.emplace(pattern, amplitudes[0]);
                  },
                  prune_threshold);
  for (const auto& [state, amplitude] : collected) out.add(state, amplitude);
  return out;
}

}  // namespace pairfuse
