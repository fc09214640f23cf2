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
#include <set>
#include <vector>

#include <gtest/gtest.h>

#include "pairfuse/swapping.hpp"

namespace pairfuse {
namespace {

double success_of(const std::vector<SwapBranch>& branches) {
  double p = 0.0;
  for (const auto& b : branches)
    if (b.success) p += b.probability;
  return p;
}

double total_of(const std::vector<SwapBranch>& branches) {
  double p = 0.0;
  for (const auto& b : branches) p += b.probability;
  return p;
}

// The state left by the PFG of an extension, before M(y, z): the success
// branch of apply_pfg on qudits (3, 4) of Psi_{x,y,s} (x) C with outcome
// psi_{z0,z1,sign}.
Register extension_midpoint(int d, PairSpec x, PairSpec y, Sign s, PairSpec z, Sign pfg_sign) {
  const Register reg = Register::make(tensor(psi_intermediate(d, x, y, s), c_state(d)));
  for (auto& b : apply_pfg(reg, 3, 4, 0)) {
    if (b.outcome.label == OutcomeLabel::psi(z.first, z.second, pfg_sign)) return b.post;
  }
  throw std::logic_error("outcome not found");
}

TEST(Swapping, DegeneracyExamples) {
  EXPECT_EQ(degeneracy({0, 1}, {1, 0}, 5), Degeneracy::First);
  EXPECT_EQ(degeneracy({0, 1}, {0, 1}, 5), Degeneracy::Second);
  EXPECT_EQ(degeneracy({0, 2}, {0, 2}, 4), Degeneracy::Both);
  EXPECT_EQ(degeneracy({0, 1}, {0, 2}, 5), Degeneracy::None);
  EXPECT_EQ(to_string(Degeneracy::Second), "ii");
  // Both needs even d.
  for (int d : {3, 5, 7})
    for (int a = 0; a < d; ++a)
      for (int b = 0; b < d; ++b)
        for (int c = 0; c < d; ++c)
          for (int e = 0; e < d; ++e)
            if (a != b && c != e) {
              EXPECT_NE(degeneracy({a, b}, {c, e}, d), Degeneracy::Both);
            }
}

TEST(Swapping, MeasurementShapes) {
  const MeasurementMyz none = MeasurementMyz::make({0, 1}, {0, 2}, 5);
  EXPECT_EQ(none.kind, Degeneracy::None);
  EXPECT_EQ(none.kraus.size(), 5u);  // A+-, B+-, and one fail projector
  const MeasurementMyz first = MeasurementMyz::make({0, 1}, {1, 0}, 5);
  std::set<std::string> names;
  for (const auto& k : first.kraus) names.insert(k.name);
  EXPECT_TRUE(names.count("A"));
  EXPECT_TRUE(names.count("B+"));
  EXPECT_TRUE(names.count("B-"));
  const MeasurementMyz both = MeasurementMyz::make({0, 2}, {0, 2}, 4);
  names.clear();
  for (const auto& k : both.kraus) names.insert(k.name);
  EXPECT_TRUE(names.count("A"));
  EXPECT_TRUE(names.count("B"));
}

TEST(Swapping, MeasurementCompleteness) {
  for (int d : {3, 4, 5, 6}) {
    for (int a = 0; a < d; ++a)
      for (int b = 0; b < d; ++b)
        for (int c = 0; c < d; ++c)
          for (int e = 0; e < d; ++e)
            if (a != b && c != e) {
              EXPECT_LE(MeasurementMyz::make({a, b}, {c, e}, d).completeness_deviation(), 1e-12);
            }
  }
}

TEST(Swapping, PfgOnTwoCStates) {
  for (int d : {3, 5}) {
    for (int k : {0, 1}) {
      const Register reg = Register::make(tensor(c_state(d), c_state(d)));
      double success = 0.0;
      double total = 0.0;
      for (const auto& b : apply_pfg(reg, 2, 3, k)) {
        total += b.probability;
        if (!b.outcome.label.is_success()) continue;
        success += b.probability;
        const auto params = canonical_form(b.post.state);
        ASSERT_TRUE(params.has_value()) << b.outcome.label.to_string();
        EXPECT_EQ(params->x, params->z.canonical());
      }
      EXPECT_NEAR(total, 1.0, 1e-10);
      EXPECT_NEAR(success, 1.0 - std::pow(d, -(k + 1)), 1e-12);
    }
  }
}

TEST(Swapping, PfgOnDiagonalInput) {
  const Register reg = Register::make(QuditState::basis(3, std::vector{2, 2}));
  const auto branches = apply_pfg(reg, 0, 1, 0);
  ASSERT_EQ(branches.size(), 1u);
  EXPECT_EQ(branches[0].outcome.label, OutcomeLabel::same(2));
  EXPECT_NEAR(branches[0].probability, 1.0, 1e-15);
  EXPECT_EQ(branches[0].post.qudit_count(), 0);
}

TEST(Swapping, PfgIndexErrors) {
  const Register reg = Register::make(c_state(3));
  EXPECT_THROW(apply_pfg(reg, 1, 1, 0), std::invalid_argument);
  EXPECT_THROW(apply_pfg(reg, 0, 3, 0), std::out_of_range);
  EXPECT_THROW(apply_myz(reg, 5, MeasurementMyz::make({0, 1}, {0, 1}, 3)), std::out_of_range);
}

TEST(Swapping, MidpointHasFourValuesOnMeasuredQudit) {
  const int d = 5;
  const PairSpec x{0, 1};
  const PairSpec y{0, 2};
  const PairSpec z{3, 4};
  ASSERT_EQ(degeneracy(y, z, d), Degeneracy::None);
  const Register mid = extension_midpoint(d, x, y, Sign::Plus, z, Sign::Plus);
  EXPECT_EQ(mid.qudit_count(), 5);
  std::set<int> values;
  for (const auto& [index, amp] : mid.state.terms()) values.insert(mid.state.digit(index, 2));
  EXPECT_EQ(values.size(), 4u);
}

TEST(Swapping, MyzOnMidpointLandsInFamily) {
  const int d = 5;
  const PairSpec x{0, 1};
  for (PairSpec y : {PairSpec{0, 2}, PairSpec{1, 4}}) {
    for (PairSpec z : {PairSpec{1, 3}, PairSpec{0, 1}, PairSpec{2, 3}}) {
      for (Sign ps : {Sign::Plus, Sign::Minus}) {
        const Register mid = extension_midpoint(d, x, y, Sign::Minus, z, ps);
        double total = 0.0;
        for (const auto& b : apply_myz(mid, 2, MeasurementMyz::make(y, z, d))) {
          total += b.probability;
          EXPECT_FALSE(b.outcome.failure) << "completion fired";
          const auto params = canonical_form(b.post.state);
          ASSERT_TRUE(params.has_value());
          EXPECT_EQ(params->x, x);
          EXPECT_EQ(params->z.canonical(), z.canonical());
        }
        EXPECT_NEAR(total, 1.0, 1e-10);
      }
    }
  }
}

TEST(Swapping, MyzDegenerateCollapse) {
  // y = (0,1), z = (1,0) at d = 5: A-type levels coincide.
  const int d = 5;
  const PairSpec y{0, 1};
  const PairSpec z{1, 0};
  ASSERT_EQ(degeneracy(y, z, d), Degeneracy::First);
  const Register mid = extension_midpoint(d, {0, 2}, y, Sign::Plus, z.canonical(), Sign::Plus);
  int collapsed = 0;
  for (const auto& b : apply_myz(mid, 2, MeasurementMyz::make(y, z, d))) {
    EXPECT_FALSE(b.outcome.failure);
    if (b.outcome.name == "A") ++collapsed;
    EXPECT_TRUE(canonical_form(b.post.state).has_value());
  }
  EXPECT_EQ(collapsed, 1);
}

TEST(Swapping, MyzCompletionFires) {
  const int d = 7;
  const MeasurementMyz m = MeasurementMyz::make({0, 1}, {0, 2}, d);
  // Covered levels: 0, 3 (A) and 2, 1 (B); level 4 is outside.
  const auto branches = apply_myz(Register::make(QuditState::basis(d, std::vector{4})), 0, m);
  ASSERT_EQ(branches.size(), 1u);
  EXPECT_TRUE(branches[0].outcome.failure);
  EXPECT_EQ(branches[0].outcome.name, "fail(4)");
  EXPECT_NEAR(branches[0].probability, 1.0, 1e-15);
}

TEST(Swapping, ExtendSuccessProbability) {
  const QuditState psi = psi_intermediate(5, {0, 1}, {0, 2}, Sign::Plus);
  const auto branches = extend(psi, 0);
  EXPECT_NEAR(total_of(branches), 1.0, 1e-10);
  EXPECT_NEAR(success_of(branches), 0.8, 1e-12);
  for (const auto& b : branches) {
    if (!b.success) continue;
    ASSERT_TRUE(b.params.has_value());
    EXPECT_EQ(b.params->x, (PairSpec{0, 1}));
  }
  EXPECT_THROW(extend(ghz(5, 4), 0), std::invalid_argument);
}

TEST(Swapping, ExtendSymmetricSignIsPreserved) {
  for (Sign s : {Sign::Plus, Sign::Minus}) {
    const QuditState psi = psi_intermediate(5, {0, 1}, {0, 1}, s);
    bool seen = false;
    for (const auto& b : extend(psi, 0)) {
      if (b.path.size() != 2 || b.path[0] != "Psi(0,1,+)" || b.path[1].back() != '+') continue;
      ASSERT_TRUE(b.params.has_value());
      EXPECT_EQ(b.params->z.canonical(), (PairSpec{0, 1}));
      EXPECT_EQ(b.params->sign, s) << b.path[1];
      seen = true;
    }
    EXPECT_TRUE(seen);
  }
}

TEST(Swapping, BesQutrit) {
  const QuditState left = psi_intermediate(3, {0, 1}, {1, 2}, Sign::Plus);
  const QuditState right = psi_intermediate(3, {0, 2}, {0, 2}, Sign::Minus);
  const auto branches = bes(left, right, 0);
  EXPECT_NEAR(total_of(branches), 1.0, 1e-10);
  EXPECT_NEAR(success_of(branches), 2.0 / 3.0, 1e-12);
  for (const auto& b : branches) {
    if (!b.success) continue;
    ASSERT_TRUE(b.params.has_value());
    EXPECT_EQ(b.params->x, (PairSpec{0, 1}));
    EXPECT_EQ(schmidt_rank(b.state, 2), 2);
    EXPECT_NEAR(bell_fidelity(b.state, *b.params), 1.0, 1e-9);
  }
  EXPECT_NEAR(success_of(bes(left, right, 1)), 8.0 / 9.0, 1e-12);
}

TEST(Swapping, BesMatchesRegisterComposition) {
  // PFG across the two registers, then M(y, w) and M(w, u) on qudit 2, using
  // the register-level operations.
  const int d = 3;
  const PairSpec y{1, 2};
  const PairSpec u{0, 2};
  const QuditState left = psi_intermediate(d, {0, 1}, y, Sign::Plus);
  const QuditState right = psi_intermediate(d, u, {1, 2}, Sign::Minus);
  std::map<std::vector<std::string>, std::pair<double, QuditState>> oracle;
  for (const auto& pb : apply_pfg_across(Register::make(left), 3, Register::make(right), 0, 1)) {
    const std::string name = pb.outcome.label.to_string();
    if (!pb.outcome.label.is_success()) {
      oracle[{name}] = {pb.probability, pb.post.state};
      continue;
    }
    const PairSpec w{pb.outcome.label.i, pb.outcome.label.j};
    for (const auto& m1 : apply_myz(pb.post, 2, MeasurementMyz::make(y, w, d))) {
      if (m1.outcome.failure) {
        oracle[{name, "M" + m1.outcome.name}] = {pb.probability * m1.probability, m1.post.state};
        continue;
      }
      for (const auto& m2 : apply_myz(m1.post, 2, MeasurementMyz::make(w, u, d))) {
        oracle[{name, "M" + m1.outcome.name, "M" + m2.outcome.name}] = {
            pb.probability * m1.probability * m2.probability, m2.post.state};
      }
    }
  }
  const auto branches = bes(left, right, 1);
  EXPECT_EQ(branches.size(), oracle.size());
  for (const auto& b : branches) {
    const auto it = oracle.find(b.path);
    ASSERT_NE(it, oracle.end());
    EXPECT_NEAR(b.probability, it->second.first, 1e-12);
    EXPECT_LT(max_abs_difference(b.state, it->second.second), 1e-12);
  }
}

TEST(Swapping, CanonicalFormRoundTrip) {
  const auto p = canonical_form(psi_intermediate(3, {0, 1}, {1, 2}, Sign::Minus));
  ASSERT_TRUE(p.has_value());
  EXPECT_EQ(p->x, (PairSpec{0, 1}));
  EXPECT_EQ(p->z, (PairSpec{1, 2}));
  EXPECT_EQ(p->sign, Sign::Minus);
  EXPECT_NEAR(std::abs(p->phase - 1.0), 0.0, 1e-12);

  EXPECT_FALSE(canonical_form(ghz(3, 4)).has_value());

  const Complex phase = std::polar(1.0, M_PI / 3);
  const auto q = canonical_form(psi_intermediate(5, {1, 3}, {4, 2}, Sign::Plus).scaled(phase));
  ASSERT_TRUE(q.has_value());
  EXPECT_NEAR(std::abs(q->phase - phase), 0.0, 1e-12);
  EXPECT_EQ(q->x, (PairSpec{1, 3}));
  EXPECT_EQ(q->z, (PairSpec{4, 2}));
}

TEST(Swapping, CanonicalFormSwappedX) {
  // x listed high-first is the same state with the z pair reversed.
  const QuditState a = psi_intermediate(5, {3, 1}, {0, 2}, Sign::Plus);
  const auto p = canonical_form(a);
  ASSERT_TRUE(p.has_value());
  EXPECT_EQ(p->x, (PairSpec{1, 3}));
  EXPECT_LT(distance_up_to_phase(a, psi_intermediate(5, p->x, p->z, p->sign)), 1e-12);
}

TEST(Swapping, CanonicalFormRejectsNearMiss) {
  QuditState s = psi_intermediate(3, {0, 1}, {0, 1}, Sign::Plus);
  s.add(std::vector{0, 2, 2, 2}, 1e-3);
  EXPECT_FALSE(canonical_form(s).has_value());
  EXPECT_FALSE(canonical_form(c_state(3)).has_value());
}

TEST(Swapping, FockLevelAgreesWithKraus) {
  const auto fock = fuse_cc_fock(3, 0);
  const auto abstract = fuse_cc(3, 0);
  std::map<std::string, const SwapBranch*> by_label;
  for (const auto& b : abstract) by_label[b.path.front()] = &b;
  double total = 0.0;
  for (const auto& f : fock) {
    total += f.probability;
    const auto it = by_label.find(f.label.to_string());
    ASSERT_NE(it, by_label.end());
    EXPECT_LT(distance_up_to_phase(f.state, it->second->state), 1e-9) << f.pattern.to_string();
  }
  EXPECT_NEAR(total, 1.0, 1e-9);
}

TEST(Swapping, SampledModeIsDeterministic) {
  const auto a = fuse_cc(5, 0, BranchMode::sampled(42));
  const auto b = fuse_cc(5, 0, BranchMode::sampled(42));
  ASSERT_EQ(a.size(), 1u);
  ASSERT_EQ(b.size(), 1u);
  EXPECT_EQ(a[0].path, b[0].path);
  std::set<std::vector<std::string>> seen;
  for (std::uint64_t seed = 0; seed < 40; ++seed) seen.insert(fuse_cc(5, 0, BranchMode::sampled(seed))[0].path);
  EXPECT_GT(seen.size(), 5u);
}

TEST(Swapping, ShortChain) {
  for (int k : {0, 1}) {
    const ChainReport r = run_chain(3, k, 3);
    const double pf = 1.0 - std::pow(3.0, -(k + 1));
    EXPECT_NEAR(r.fuse_success, pf, 1e-12);
    ASSERT_EQ(r.stages.size(), 3u);
    for (const auto& s : r.stages) {
      EXPECT_NEAR(s.success_probability, pf, 1e-12);
      EXPECT_NEAR(s.min_pair_success, pf, 1e-12);
      EXPECT_NEAR(s.max_pair_success, pf, 1e-12);
      EXPECT_EQ(s.non_canonical, 0u);
      EXPECT_LE(s.max_branch_probability_error, 1e-10);
    }
    double mass = 0.0;
    for (const auto& c : r.final_classes) {
      mass += c.probability;
      EXPECT_EQ(schmidt_rank(c.state, 2), 2);
      EXPECT_NEAR(c.bell_fidelity, 1.0, 1e-9);
    }
    EXPECT_NEAR(mass, 1.0, 1e-12);
  }
}

TEST(Swapping, ChainTraceCoversAllBranches) {
  double mass = 0.0;
  int events = 0;
  run_chain(3, 0, 1, [&](const ChainEvent& e) {
    mass += e.probability;
    ++events;
    EXPECT_FALSE(e.path.empty());
    EXPECT_EQ(e.success, e.params.has_value());
  });
  EXPECT_GT(events, 0);
  EXPECT_NEAR(mass, 1.0, 1e-10);
}

TEST(Swapping, ExtractedPairIsBellState) {
  for (Sign s : {Sign::Plus, Sign::Minus}) {
    const PsiParams p{{0, 2}, {1, 0}, s, 1.0};
    const QuditState psi = psi_intermediate(5, p.x, p.z, s);
    EXPECT_NEAR(bell_fidelity(psi, p), 1.0, 1e-12);
    const Eigen::Matrix4cd rho = extracted_qubit_pair(psi, p);
    EXPECT_NEAR(std::abs(rho.trace() - 1.0), 0.0, 1e-12);
    const PsiParams wrong{p.x, p.z, flip(s), 1.0};
    EXPECT_NEAR(bell_fidelity(psi, wrong), 0.0, 1e-12);
  }
}

}  // namespace
}  // namespace pairfuse
