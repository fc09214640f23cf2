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

#include "pairfuse/swapping.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <mutex>
#include <random>
#include <set>
#include <stdexcept>

namespace pairfuse {

namespace {

using Index = QuditState::Index;

int mod(int a, int d) { return ((a % d) + d) % d; }

// Terms of a state grouped by the joint value of some qudits; the remaining
// qudits keep their relative order.
struct LocalSplit {
  int d = 2;
  int rest_count = 0;
  std::vector<std::vector<std::pair<Index, Complex>>> buckets;
};

LocalSplit split_local(const QuditState& state, std::span<const int> qudits) {
  const int d = state.dimension();
  const int n = state.qudit_count();
  std::vector<int> position(static_cast<std::size_t>(n), -1);
  for (std::size_t t = 0; t < qudits.size(); ++t) {
    const int q = qudits[t];
    if (q < 0 || q >= n) throw std::out_of_range("qudit index " + std::to_string(q) + " out of range");
    if (position[static_cast<std::size_t>(q)] != -1) throw std::invalid_argument("repeated qudit index");
    position[static_cast<std::size_t>(q)] = static_cast<int>(t);
  }
  const int local_count = static_cast<int>(qudits.size());
  std::size_t bucket_count = 1;
  for (int t = 0; t < local_count; ++t) bucket_count *= static_cast<std::size_t>(d);

  LocalSplit out;
  out.d = d;
  out.rest_count = n - local_count;
  out.buckets.resize(bucket_count);
  std::vector<int> digits(static_cast<std::size_t>(n));
  std::vector<std::size_t> local_weight(static_cast<std::size_t>(local_count));
  for (int t = local_count - 1, w = 1; t >= 0; --t, w *= d) local_weight[static_cast<std::size_t>(t)] = static_cast<std::size_t>(w);

  for (const auto& [index, amplitude] : state.terms()) {
    Index rem = index;
    for (int q = n - 1; q >= 0; --q) {
      digits[static_cast<std::size_t>(q)] = static_cast<int>(rem % static_cast<Index>(d));
      rem /= static_cast<Index>(d);
    }
    std::size_t local = 0;
    Index rest = 0;
    for (int q = 0; q < n; ++q) {
      const int t = position[static_cast<std::size_t>(q)];
      if (t >= 0) {
        local += local_weight[static_cast<std::size_t>(t)] * static_cast<std::size_t>(digits[static_cast<std::size_t>(q)]);
      } else {
        rest = rest * static_cast<Index>(d) + static_cast<Index>(digits[static_cast<std::size_t>(q)]);
      }
    }
    out.buckets[local].emplace_back(rest, amplitude);
  }
  return out;
}

template <typename Vec>
QuditState contract(const LocalSplit& split, const Vec& bra) {
  QuditState out(split.d, split.rest_count);
  for (std::size_t local = 0; local < split.buckets.size(); ++local) {
    const Complex c = bra(static_cast<Eigen::Index>(local));
    if (c == Complex(0.0, 0.0)) continue;
    for (const auto& [rest, amplitude] : split.buckets[local]) out.add_index(rest, c * amplitude);
  }
  return out;
}

std::vector<std::string> without(const std::vector<std::string>& labels, std::span<const int> removed) {
  std::vector<std::string> out;
  for (std::size_t q = 0; q < labels.size(); ++q) {
    if (std::find(removed.begin(), removed.end(), static_cast<int>(q)) == removed.end()) out.push_back(labels[q]);
  }
  return out;
}

template <typename Branch>
std::vector<Branch> select(std::vector<Branch> branches, BranchMode mode) {
  if (!mode.sample || branches.empty()) return branches;
  std::mt19937_64 rng(mode.seed);
  const double u = static_cast<double>(rng() >> 11) * 0x1p-53;
  double total = 0.0;
  for (const auto& b : branches) total += b.probability;
  double running = 0.0;
  for (auto& b : branches) {
    running += b.probability / total;
    if (u < running) return {std::move(b)};
  }
  return {std::move(branches.back())};
}

constexpr double kDropProbability = 1e-14;

}  // namespace

Register Register::make(QuditState state, std::vector<std::string> labels) {
  if (labels.empty()) {
    for (int q = 0; q < state.qudit_count(); ++q) labels.push_back("q" + std::to_string(q));
  }
  if (static_cast<int>(labels.size()) != state.qudit_count()) {
    throw std::invalid_argument("register needs one label per qudit");
  }
  return Register{std::move(state), std::move(labels)};
}

Degeneracy degeneracy(PairSpec y, PairSpec z, int d) {
  y.validate(d);
  z.validate(d);
  const bool first = mod(y.first + z.first, d) == mod(y.second + z.second, d);
  const bool second = mod(y.first + z.second, d) == mod(y.second + z.first, d);
  if (first && second) return Degeneracy::Both;
  if (first) return Degeneracy::First;
  if (second) return Degeneracy::Second;
  return Degeneracy::None;
}

std::string to_string(Degeneracy value) {
  switch (value) {
    case Degeneracy::None:
      return "none";
    case Degeneracy::First:
      return "i";
    case Degeneracy::Second:
      return "ii";
    case Degeneracy::Both:
      return "both";
  }
  return "?";
}

MeasurementMyz MeasurementMyz::make(PairSpec y, PairSpec z, int d) {
  MeasurementMyz m;
  m.d = d;
  m.y = y;
  m.z = z;
  m.kind = degeneracy(y, z, d);
  const double h = 1.0 / std::sqrt(2.0);
  std::set<int> covered;
  const auto add_pair = [&](const std::string& name, int u, int v, bool collapsed) {
    if (collapsed) {
      Eigen::VectorXd bra = Eigen::VectorXd::Zero(d);
      bra(u) = 1.0;
      m.kraus.push_back({name, false, bra});
      covered.insert(u);
      return;
    }
    for (Sign s : {Sign::Plus, Sign::Minus}) {
      Eigen::VectorXd bra = Eigen::VectorXd::Zero(d);
      bra(u) = h;
      bra(v) = h * to_int(s);
      m.kraus.push_back({name + to_char(s), false, bra});
    }
    covered.insert(u);
    covered.insert(v);
  };
  const bool first = m.kind == Degeneracy::First || m.kind == Degeneracy::Both;
  const bool second = m.kind == Degeneracy::Second || m.kind == Degeneracy::Both;
  add_pair("A", mod(y.first + z.first, d), mod(y.second + z.second, d), first);
  add_pair("B", mod(y.first + z.second, d), mod(y.second + z.first, d), second);
  for (int v = 0; v < d; ++v) {
    if (covered.count(v) != 0) continue;
    Eigen::VectorXd bra = Eigen::VectorXd::Zero(d);
    bra(v) = 1.0;
    m.kraus.push_back({"fail(" + std::to_string(v) + ")", true, bra});
  }
  return m;
}

double MeasurementMyz::completeness_deviation() const {
  Eigen::MatrixXd sum = Eigen::MatrixXd::Zero(d, d);
  for (const auto& k : kraus) sum += k.bra * k.bra.transpose();
  return (sum - Eigen::MatrixXd::Identity(d, d)).cwiseAbs().maxCoeff();
}

std::vector<PfgBranch> apply_pfg(const Register& reg, int a, int b, int k, BranchMode mode) {
  if (a == b) throw std::invalid_argument("PFG needs two distinct qudits");
  const int d = reg.state.dimension();
  const std::vector<int> local{a, b};
  const LocalSplit split = split_local(reg.state, local);
  const double norm2 = reg.state.norm_squared();
  std::vector<PfgBranch> out;
  for (const auto& outcome : kraus_set(d, k)) {
    const Eigen::VectorXd bra = std::sqrt(outcome.weight) * label_vector(outcome.label, d);
    QuditState post = contract(split, bra);
    const double p = post.norm_squared() / norm2;
    if (p < kDropProbability) continue;
    out.push_back({outcome, p, Register{post.normalized(), without(reg.labels, local)}});
  }
  return select(std::move(out), mode);
}

std::vector<PfgBranch> apply_pfg_across(const Register& left, int a, const Register& right, int b, int k,
                                        BranchMode mode) {
  const int d = left.state.dimension();
  if (right.state.dimension() != d) throw std::invalid_argument("PFG inputs differ in dimension");
  const std::vector<int> la{a};
  const std::vector<int> rb{b};
  const LocalSplit ls = split_local(left.state, la);
  const LocalSplit rs = split_local(right.state, rb);
  const auto piece = [d](const LocalSplit& split, int level) {
    QuditState out(d, split.rest_count);
    for (const auto& [rest, amplitude] : split.buckets[static_cast<std::size_t>(level)]) out.add_index(rest, amplitude);
    return out;
  };
  std::vector<QuditState> lp;
  std::vector<QuditState> rp;
  for (int level = 0; level < d; ++level) {
    lp.push_back(piece(ls, level));
    rp.push_back(piece(rs, level));
  }
  std::vector<std::string> labels = without(left.labels, la);
  for (auto& label : without(right.labels, rb)) labels.push_back(std::move(label));

  const double norm2 = left.state.norm_squared() * right.state.norm_squared();
  std::vector<PfgBranch> out;
  for (const auto& outcome : kraus_set(d, k)) {
    const Eigen::VectorXd bra = std::sqrt(outcome.weight) * label_vector(outcome.label, d);
    QuditState post(d, ls.rest_count + rs.rest_count);
    for (int u = 0; u < d; ++u) {
      for (int v = 0; v < d; ++v) {
        const double c = bra(u * d + v);
        if (c == 0.0 || lp[static_cast<std::size_t>(u)].empty() || rp[static_cast<std::size_t>(v)].empty()) continue;
        post += tensor(lp[static_cast<std::size_t>(u)], rp[static_cast<std::size_t>(v)]).scaled(c);
      }
    }
    const double p = post.norm_squared() / norm2;
    if (p < kDropProbability) continue;
    out.push_back({outcome, p, Register{post.normalized(), labels}});
  }
  return select(std::move(out), mode);
}

std::vector<MyzBranch> apply_myz(const Register& reg, int qudit, const MeasurementMyz& m, BranchMode mode) {
  if (m.d != reg.state.dimension()) throw std::invalid_argument("M(y,z) dimension does not match the register");
  const std::vector<int> local{qudit};
  const LocalSplit split = split_local(reg.state, local);
  const double norm2 = reg.state.norm_squared();
  std::vector<MyzBranch> out;
  for (const auto& outcome : m.kraus) {
    QuditState post = contract(split, outcome.bra);
    const double p = post.norm_squared() / norm2;
    if (p < kDropProbability) continue;
    out.push_back({outcome, p, Register{post.normalized(), without(reg.labels, local)}});
  }
  return select(std::move(out), mode);
}

std::string PsiParams::to_string() const {
  return "x=" + x.to_string() + " z=" + z.to_string() + " s=" + to_char(sign);
}

namespace {

// Sorted (index, amplitude) list; the hot path of the swapping chain avoids
// node-based maps.
struct Flat {
  int d = 2;
  int n = 0;
  std::vector<std::pair<Index, Complex>> terms;

  double norm2() const {
    double s = 0.0;
    for (const auto& t : terms) s += std::norm(t.second);
    return s;
  }
};

Flat flat_of(const QuditState& state) {
  Flat out{state.dimension(), state.qudit_count(), {}};
  out.terms.assign(state.terms().begin(), state.terms().end());
  return out;
}

QuditState state_of(const Flat& flat) {
  QuditState out(flat.d, flat.n);
  const double norm = std::sqrt(flat.norm2());
  const double scale = norm > 0.0 ? 1.0 / norm : 1.0;
  for (const auto& [index, amplitude] : flat.terms) out.add_index(index, amplitude * scale);
  return out;
}

Index power(int d, int e) {
  Index out = 1;
  for (int i = 0; i < e; ++i) out *= static_cast<Index>(d);
  return out;
}

// Pieces of `flat` with qudit q fixed to each level; q is removed. Removing a
// fixed digit keeps lexicographic order, so pieces stay sorted.
std::vector<Flat> split_one(const Flat& flat, int q) {
  if (q < 0 || q >= flat.n) throw std::out_of_range("qudit index " + std::to_string(q) + " out of range");
  const Index low = power(flat.d, flat.n - 1 - q);
  const auto d = static_cast<Index>(flat.d);
  std::vector<Flat> out(static_cast<std::size_t>(flat.d), Flat{flat.d, flat.n - 1, {}});
  for (const auto& [index, amplitude] : flat.terms) {
    const Index high = index / (low * d);
    const auto level = static_cast<std::size_t>((index / low) % d);
    out[level].terms.emplace_back(high * low + index % low, amplitude);
  }
  return out;
}

void append_tensor(std::vector<std::pair<Index, Complex>>& out, const Flat& a, const Flat& b, double c) {
  const Index width = power(b.d, b.n);
  for (const auto& [ia, va] : a.terms)
    for (const auto& [ib, vb] : b.terms) out.emplace_back(ia * width + ib, c * va * vb);
}

void append_scaled(std::vector<std::pair<Index, Complex>>& out, const Flat& a, double c) {
  for (const auto& [i, v] : a.terms) out.emplace_back(i, c * v);
}

constexpr double kFloor2 = kDefaultPruneThreshold * kDefaultPruneThreshold * 1e-6;

// Sums duplicate indices. The terms arrive as `runs` sorted runs whose
// boundaries are listed in `bounds`.
void finish(std::vector<std::pair<Index, Complex>>& terms, std::span<const std::size_t> bounds) {
  const auto by_index = [](const auto& x, const auto& y) { return x.first < y.first; };
  for (std::size_t r = 1; r + 1 < bounds.size(); ++r) {
    std::inplace_merge(terms.begin(), terms.begin() + static_cast<std::ptrdiff_t>(bounds[r]),
                       terms.begin() + static_cast<std::ptrdiff_t>(bounds[r + 1]), by_index);
  }
  std::size_t w = 0;
  for (std::size_t r = 0; r < terms.size(); ++r) {
    if (w > 0 && terms[w - 1].first == terms[r].first) {
      terms[w - 1].second += terms[r].second;
    } else {
      terms[w++] = terms[r];
    }
  }
  terms.resize(w);
  std::erase_if(terms, [](const auto& t) { return std::norm(t.second) < kFloor2; });
}

std::vector<std::pair<int, double>> sparse(const Eigen::VectorXd& v) {
  std::vector<std::pair<int, double>> out;
  for (Eigen::Index i = 0; i < v.size(); ++i)
    if (v(i) != 0.0) out.emplace_back(static_cast<int>(i), v(i));
  return out;
}

// Cached difference-cell lookup for four-qudit indices; null when d^4 is
// too large to tabulate.
const std::vector<int>* difference_cells(int d) {
  static std::mutex guard;
  static std::map<int, std::vector<int>> cache;
  if (static_cast<Index>(d) * d * d * d > (Index{1} << 22)) return nullptr;
  std::lock_guard lock(guard);
  auto it = cache.find(d);
  if (it == cache.end()) {
    std::vector<int> table(static_cast<std::size_t>(d) * d * d * d);
    for (int q0 = 0; q0 < d; ++q0)
      for (int q1 = 0; q1 < d; ++q1)
        for (int q2 = 0; q2 < d; ++q2)
          for (int q3 = 0; q3 < d; ++q3)
            table[static_cast<std::size_t>(((q0 * d + q1) * d + q2) * d + q3)] = mod(q1 - q0, d) * d + mod(q2 - q3, d);
    it = cache.emplace(d, std::move(table)).first;
  }
  return &it->second;
}

std::optional<PsiParams> canonical_flat(const Flat& flat, double tolerance) {
  if (flat.n != 4 || flat.terms.empty()) return std::nullopt;
  const double norm2 = flat.norm2();
  if (norm2 == 0.0) return std::nullopt;
  const int d = flat.d;
  const double inv = 1.0 / std::sqrt(norm2);
  // Difference cell (q1 - q0) * d + (q2 - q3), all mod d, per term.
  thread_local std::vector<int> cells;
  thread_local std::vector<Complex> diff;
  thread_local std::vector<int> occupied;
  cells.clear();
  const std::vector<int>* table = difference_cells(d);
  for (const auto& [index, amplitude] : flat.terms) {
    if (table != nullptr) {
      cells.push_back((*table)[static_cast<std::size_t>(index)]);
      continue;
    }
    Index rem = index;
    std::array<int, 4> q{};
    for (int t = 3; t >= 0; --t) {
      q[static_cast<std::size_t>(t)] = static_cast<int>(rem % static_cast<Index>(d));
      rem /= static_cast<Index>(d);
    }
    cells.push_back(mod(q[1] - q[0], d) * d + mod(q[2] - q[3], d));
  }
  diff.assign(static_cast<std::size_t>(d * d), 0.0);
  for (std::size_t t = 0; t < cells.size(); ++t) diff[static_cast<std::size_t>(cells[t])] += flat.terms[t].second * inv;
  const double c = 1.0 / (d * std::sqrt(2.0));
  // A match needs both of its difference cells occupied, so candidates are
  // pairs of occupied cells (x0, z1), (x1, z0) with x0 < x1 and z0 != z1.
  occupied.clear();
  for (int cell = 0; cell < d * d; ++cell)
    if (std::norm(diff[static_cast<std::size_t>(cell)]) > 1e-24) occupied.push_back(cell);
  double best = -1.0;
  PsiParams found;
  Complex best_overlap = 0.0;
  for (int a : occupied) {
    for (int b : occupied) {
      const int x0 = a / d, z1 = a % d, x1 = b / d, z0 = b % d;
      if (x0 >= x1 || z0 == z1) continue;
      for (Sign s : {Sign::Plus, Sign::Minus}) {
        const Complex overlap = c * (diff[static_cast<std::size_t>(a)] +
                                     static_cast<double>(to_int(s)) * diff[static_cast<std::size_t>(b)]);
        if (std::norm(overlap) > best) {
          best = std::norm(overlap);
          best_overlap = overlap;
          found = PsiParams{{x0, x1}, {z0, z1}, s, 1.0};
        }
      }
    }
  }
  if (best <= 0.0) return std::nullopt;
  found.phase = best_overlap / std::sqrt(best);
  const double tol2 = tolerance * tolerance;

  // Compare term by term with phase * psi_intermediate; missing reference
  // terms show up as a deficit in the matched reference weight.
  double matched = 0.0;
  for (std::size_t t = 0; t < cells.size(); ++t) {
    const Complex amplitude = flat.terms[t].second;
    const int dx = cells[t] / d;
    const int dz = cells[t] % d;
    double expected = 0.0;
    if (dx == found.x.first && dz == found.z.second) expected += c;
    if (dx == found.x.second && dz == found.z.first) expected += c * to_int(found.sign);
    matched += expected * expected;
    if (std::norm(amplitude * inv - found.phase * expected) > tol2) return std::nullopt;
  }
  if (1.0 - matched > tolerance) return std::nullopt;
  return found;
}

// Kraus operator reduced to its nonzero coefficients.
struct SparseOp {
  std::string name;
  bool success = false;
  std::vector<std::pair<int, double>> coeffs;
  PairSpec pair{};
};

const std::vector<SparseOp>& pfg_ops(int d, int k) {
  static std::mutex guard;
  static std::map<std::pair<int, int>, std::vector<SparseOp>> cache;
  std::lock_guard lock(guard);
  auto it = cache.find({d, k});
  if (it == cache.end()) {
    std::vector<SparseOp> ops;
    for (const auto& outcome : kraus_set(d, k))
      ops.push_back({outcome.label.to_string(), outcome.label.is_success(),
                     sparse(std::sqrt(outcome.weight) * label_vector(outcome.label, d)),
                     {outcome.label.i, outcome.label.j}});
    it = cache.emplace(std::pair{d, k}, std::move(ops)).first;
  }
  return it->second;
}

const std::vector<SparseOp>& myz_ops(PairSpec y, PairSpec z, int d) {
  static std::mutex guard;
  static std::map<std::tuple<int, int, int, int, int>, std::vector<SparseOp>> cache;
  std::lock_guard lock(guard);
  const auto key = std::tuple{d, y.first, y.second, z.first, z.second};
  auto it = cache.find(key);
  if (it == cache.end()) {
    std::vector<SparseOp> ops;
    for (const auto& outcome : MeasurementMyz::make(y, z, d).kraus)
      ops.push_back({"M" + outcome.name, !outcome.failure, sparse(outcome.bra), {}});
    it = cache.emplace(key, std::move(ops)).first;
  }
  return it->second;
}

struct KernelBranch {
  // Outcome names, owned by the operator caches.
  std::array<const std::string*, 3> steps{};
  int depth = 0;
  double probability = 0.0;
  bool success = false;
  Flat state;
  std::optional<PsiParams> params;

  std::vector<std::string> path() const {
    std::vector<std::string> out;
    for (int i = 0; i < depth; ++i) out.push_back(*steps[static_cast<std::size_t>(i)]);
    return out;
  }
};

// PFG on qudit lq of `left` and qudit 0 of `right`, then optionally
// M(y_left, w) on qudit 2 and M(w, u_right) on the next qudit 2.
std::vector<KernelBranch> swap_kernel(const Flat& left, int lq, const Flat& right, int k,
                                      std::optional<PairSpec> y_left, std::optional<PairSpec> u_right) {
  const int d = left.d;
  if (right.d != d) throw std::invalid_argument("swap inputs differ in dimension");
  const std::vector<Flat> lp = split_one(left, lq);
  const std::vector<Flat> rp = split_one(right, 0);
  const double total = left.norm2() * right.norm2();
  std::vector<KernelBranch> out;
  std::vector<std::size_t> bounds;

  const auto measure = [&](const Flat& state, const std::vector<SparseOp>& ops, const auto& each) {
    const std::vector<Flat> pieces = split_one(state, 2);
    for (const auto& op : ops) {
      Flat post{d, state.n - 1, {}};
      bounds.assign(1, 0);
      for (const auto& [level, c] : op.coeffs) {
        append_scaled(post.terms, pieces[static_cast<std::size_t>(level)], c);
        bounds.push_back(post.terms.size());
      }
      finish(post.terms, bounds);
      const double p = post.norm2() / total;
      if (p < kDropProbability) continue;
      each(op, p, std::move(post));
    }
  };
  const auto emit = [&](std::array<const std::string*, 3> steps, int depth, double p, bool success, Flat state) {
    std::optional<PsiParams> params;
    if (success) params = canonical_flat(state, 1e-9);
    out.push_back({steps, depth, p, success, std::move(state), params});
  };

  for (const SparseOp& op : pfg_ops(d, k)) {
    Flat post{d, left.n + right.n - 2, {}};
    bounds.assign(1, 0);
    for (const auto& [local, c] : op.coeffs) {
      append_tensor(post.terms, lp[static_cast<std::size_t>(local / d)], rp[static_cast<std::size_t>(local % d)], c);
      bounds.push_back(post.terms.size());
    }
    finish(post.terms, bounds);
    const double p = post.norm2() / total;
    if (p < kDropProbability) continue;
    if (!op.success || !y_left) {
      emit({&op.name}, 1, p, op.success, std::move(post));
      continue;
    }
    const PairSpec w = op.pair;
    measure(post, myz_ops(*y_left, w, d), [&](const SparseOp& first, double p1, Flat state1) {
      if (!first.success || !u_right) {
        emit({&op.name, &first.name}, 2, p1, first.success, std::move(state1));
        return;
      }
      measure(state1, myz_ops(w, *u_right, d), [&](const SparseOp& second, double p2, Flat state2) {
        emit({&op.name, &first.name, &second.name}, 3, p2, second.success, std::move(state2));
      });
    });
  }
  return out;
}

std::vector<SwapBranch> to_swap_branches(std::vector<KernelBranch> branches, BranchMode mode) {
  std::vector<SwapBranch> out;
  for (auto& b : branches) out.push_back({b.path(), b.probability, b.success, state_of(b.state), b.params});
  return select(std::move(out), mode);
}

PsiParams require_psi(const QuditState& psi, const char* what) {
  const auto params = canonical_form(psi);
  if (!params) throw std::invalid_argument(std::string(what) + " is not a Psi_{x,y,s} state");
  return *params;
}

}  // namespace

std::optional<PsiParams> canonical_form(const QuditState& state, double tolerance) {
  return canonical_flat(flat_of(state), tolerance);
}

std::vector<SwapBranch> fuse_cc(int d, int k, BranchMode mode) {
  const Flat c = flat_of(c_state(d));
  return to_swap_branches(swap_kernel(c, 2, c, k, std::nullopt, std::nullopt), mode);
}

std::vector<SwapBranch> extend(const QuditState& psi, int k, BranchMode mode) {
  const PsiParams p = require_psi(psi, "extend input");
  return to_swap_branches(swap_kernel(flat_of(psi), 3, flat_of(c_state(psi.dimension())), k, p.z, std::nullopt), mode);
}

std::vector<SwapBranch> bes(const QuditState& left, const QuditState& right, int k, BranchMode mode) {
  const PsiParams lp = require_psi(left, "left BES input");
  const PsiParams rp = require_psi(right, "right BES input");
  if (left.dimension() != right.dimension()) throw std::invalid_argument("BES inputs differ in dimension");
  return to_swap_branches(swap_kernel(flat_of(left), 3, flat_of(right), k, lp.z, rp.x), mode);
}

Eigen::Matrix4cd extracted_qubit_pair(const QuditState& state, const PsiParams& params) {
  if (state.qudit_count() != 4) throw std::invalid_argument("qubit extraction needs a four-qudit state");
  const int d = state.dimension();
  const QuditState psi = state.normalized();
  // (i, j) -> amplitudes over |ab>
  std::map<std::pair<int, int>, Eigen::Vector4cd> blocks;
  for (const auto& [index, amplitude] : psi.terms()) {
    const int i = psi.digit(index, 0);
    const int j = psi.digit(index, 3);
    const int dx = mod(psi.digit(index, 1) - i, d);
    const int dz = mod(psi.digit(index, 2) - j, d);
    const int a = dx == params.x.first ? 0 : dx == params.x.second ? 1 : -1;
    const int b = dz == params.z.first ? 0 : dz == params.z.second ? 1 : -1;
    if (a < 0 || b < 0) continue;
    auto [it, inserted] = blocks.try_emplace({i, j}, Eigen::Vector4cd::Zero());
    it->second(a * 2 + b) += amplitude;
  }
  Eigen::Matrix4cd rho = Eigen::Matrix4cd::Zero();
  for (const auto& [key, v] : blocks) rho += v * v.adjoint();
  return rho;
}

double bell_fidelity(const QuditState& state, const PsiParams& params) {
  const Eigen::Matrix4cd rho = extracted_qubit_pair(state, params);
  Eigen::Vector4cd bell = Eigen::Vector4cd::Zero();
  bell(1) = 1.0 / std::sqrt(2.0);
  bell(2) = to_int(params.sign) / std::sqrt(2.0);
  return std::real(bell.dot(rho * bell));
}

ChainReport run_chain(int d, int k, int length, const std::function<void(const ChainEvent&)>& trace) {
  if (length < 1) throw std::invalid_argument("chain length must be >= 1");
  struct Class {
    PsiParams params;
    double probability = 0.0;
    Flat state;
  };
  using ClassMap = std::map<decltype(PsiParams{}.key()), Class>;

  ChainReport report;
  report.d = d;
  report.k = k;
  report.length = length;

  const auto add = [](ClassMap& classes, KernelBranch& branch, double weight) {
    auto& cls = classes[branch.params->key()];
    if (cls.probability == 0.0) {
      cls.params = *branch.params;
      cls.state = std::move(branch.state);
    }
    cls.probability += weight;
  };

  ClassMap fresh;
  const Flat c = flat_of(c_state(d));
  for (auto& branch : swap_kernel(c, 2, c, k, std::nullopt, std::nullopt)) {
    if (!branch.success) continue;
    if (!branch.params) throw std::logic_error("fuse_cc produced a success branch outside the Psi family");
    report.fuse_success += branch.probability;
    add(fresh, branch, branch.probability);
  }
  for (auto& [key, cls] : fresh) cls.probability /= report.fuse_success;

  ClassMap current = fresh;
  for (int stage = 1; stage <= length; ++stage) {
    ChainStage info;
    info.stage = stage;
    info.left_classes = current.size();
    info.right_classes = fresh.size();
    ClassMap next;
    for (const auto& [lkey, left] : current) {
      for (const auto& [rkey, right] : fresh) {
        const double weight = left.probability * right.probability;
        double pair_success = 0.0;
        double pair_total = 0.0;
        for (auto& branch : swap_kernel(left.state, 3, right.state, k, left.params.z, right.params.x)) {
          pair_total += branch.probability;
          if (trace) {
            trace(ChainEvent{stage, left.params.to_string(), right.params.to_string(), branch.path(),
                             weight * branch.probability, branch.success, branch.params});
          }
          if (!branch.success) continue;
          pair_success += branch.probability;
          ++info.success_branches;
          if (!branch.params) {
            ++info.non_canonical;
            continue;
          }
          add(next, branch, weight * branch.probability);
        }
        info.max_branch_probability_error = std::max(info.max_branch_probability_error, std::abs(pair_total - 1.0));
        info.min_pair_success = std::min(info.min_pair_success, pair_success);
        info.max_pair_success = std::max(info.max_pair_success, pair_success);
        info.success_probability += weight * pair_success;
      }
    }
    for (auto& [key, cls] : next) cls.probability /= info.success_probability;
    report.stages.push_back(info);
    current = std::move(next);
  }

  for (auto& [key, cls] : current) {
    ChainClass out{cls.params, cls.probability, state_of(cls.state), 0.0};
    out.bell_fidelity = bell_fidelity(out.state, out.params);
    report.min_bell_fidelity = std::min(report.min_bell_fidelity, out.bell_fidelity);
    report.final_classes.push_back(std::move(out));
  }
  return report;
}

std::vector<FockBranch> fuse_cc_fock(int d, int k) {
  const PfgCircuit circuit = build_circuit(d, k);
  const FockVector photons = tensor(encode(tensor(c_state(d), c_state(d))), circuit.ancilla);
  std::vector<int> modes;
  for (int mode = 2 * d; mode < 4 * d; ++mode) modes.push_back(mode);
  for (int mode = 6 * d; mode < photons.mode_count(); ++mode) modes.push_back(mode);
  const FockVector evolved = apply_transfer_on_modes(circuit.transfer, modes, photons);

  std::set<FockBasisState> patterns;
  std::vector<int> occupation(modes.size());
  for (const auto& [state, amplitude] : evolved.terms()) {
    for (std::size_t t = 0; t < modes.size(); ++t) occupation[t] = state[modes[t]];
    patterns.insert(FockBasisState(occupation));
  }
  std::vector<FockBranch> out;
  for (const auto& pattern : patterns) {
    const PatternProjection hit = project_pattern(evolved, pattern, modes);
    if (hit.probability < kDropProbability) continue;
    out.push_back({pattern, classify(pattern, d, k).label, hit.probability, decode(hit.residual, d)});
  }
  return out;
}

}  // namespace pairfuse
