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

#include <random>
#include <set>
#include <vector>

#include <gtest/gtest.h>

#include "pairfuse/stabilizer_lemma.hpp"
#include "pairfuse/qudit.hpp"

namespace pairfuse {
namespace {

FockBasisState fs(std::vector<int> occ) { return FockBasisState(std::move(occ)); }

// Eigenvalue of the basis pattern under the diagonal Z-type operator.
Sign oracle_parity(const FockBasisState& pattern, const StabilizerSpec& spec) {
  const FockVector out = apply_transfer(z_type_operator(spec), FockVector::basis(pattern));
  return out.amplitude(pattern).real() > 0 ? Sign::Plus : Sign::Minus;
}

FockBasisState random_pattern(int modes, int photons, std::mt19937_64& rng) {
  std::uniform_int_distribution<int> pick(0, modes - 1);
  std::vector<int> occ(static_cast<std::size_t>(modes), 0);
  for (int p = 0; p < photons; ++p) ++occ[static_cast<std::size_t>(pick(rng))];
  return fs(occ);
}

TEST(StabilizerLemma, ParityExamples) {
  const StabilizerSpec s0 = StabilizerSpec::make(0, 0, 2);
  EXPECT_EQ(parity_class(fs({1, 0, 0, 1}), s0), Sign::Minus);
  EXPECT_EQ(oracle_parity(fs({1, 0, 0, 1}), s0), Sign::Minus);
  EXPECT_EQ(parity_class(fs({0, 0, 0, 0}), s0), Sign::Plus);

  const StabilizerSpec s1 = StabilizerSpec::make(1, 1, 3);
  for (int a = 0; a <= 2; ++a) {
    std::vector<int> occ(12, 0);
    occ[6] = a;
    occ[11] = 2 - a;
    EXPECT_EQ(parity_class(fs(occ), s1), Sign::Plus);
    occ[11] = 3 - a;
    EXPECT_EQ(parity_class(fs(occ), s1), Sign::Minus);
  }
}

TEST(StabilizerLemma, ParityMatchesDiagonalOperator) {
  std::mt19937_64 rng(5);
  for (int k = 0; k <= 2; ++k) {
    for (int p = 0; p <= k; ++p) {
      for (int d = 2; d <= 3; ++d) {
        const StabilizerSpec spec = StabilizerSpec::make(k, p, d);
        for (int t = 0; t < 50; ++t) {
          const FockBasisState pattern = random_pattern(spec.mode_count(), 1 + t % 6, rng);
          EXPECT_EQ(parity_class(pattern, spec), oracle_parity(pattern, spec));
        }
      }
    }
  }
}

TEST(StabilizerLemma, ParityPartitionsPatterns) {
  // Every pattern of two photons on the k = 1, d = 2 layout falls in
  // exactly one class; the classes are swapped by moving one photon across.
  const StabilizerSpec spec = StabilizerSpec::make(1, 0, 2);
  std::set<FockBasisState> plus;
  std::set<FockBasisState> minus;
  const int m = spec.mode_count();
  for (int a = 0; a < m; ++a) {
    for (int b = a; b < m; ++b) {
      std::vector<int> occ(static_cast<std::size_t>(m), 0);
      ++occ[static_cast<std::size_t>(a)];
      ++occ[static_cast<std::size_t>(b)];
      (parity_class(fs(occ), spec) == Sign::Plus ? plus : minus).insert(fs(occ));
    }
  }
  EXPECT_EQ(plus.size() + minus.size(), static_cast<std::size_t>(m * (m + 1) / 2));
  for (const auto& p : plus) EXPECT_EQ(minus.count(p), 0u);
  EXPECT_FALSE(plus.empty());
  EXPECT_FALSE(minus.empty());
}

TEST(StabilizerLemma, ParityModeCountMismatch) {
  EXPECT_THROW(parity_class(fs({1, 0, 0}), StabilizerSpec::make(0, 0, 2)), std::invalid_argument);
}

TEST(StabilizerLemma, SpecValidation) {
  EXPECT_THROW(StabilizerSpec::make(2, 3, 2), std::invalid_argument);
  EXPECT_THROW(StabilizerSpec::make(-1, 0, 2), std::invalid_argument);
  EXPECT_THROW(StabilizerSpec::make(1, 0, 1), std::invalid_argument);
  EXPECT_EQ(StabilizerSpec::make(2, 1, 3).mode_count(), 24);
}

TEST(StabilizerLemma, ConjugationLaw) {
  // Z-type after H equals H after X-type, on random states.
  std::mt19937_64 rng(9);
  std::normal_distribution<double> g;
  for (int k = 0; k <= 2; ++k) {
    for (int p = 0; p <= k; ++p) {
      for (int d = 2; d <= 3; ++d) {
        const StabilizerSpec spec = StabilizerSpec::make(k, p, d);
        const TransferMatrix h = hadamard_layer(k, d);
        FockVector psi(spec.mode_count());
        for (int t = 0; t < 3; ++t) psi.add(random_pattern(spec.mode_count(), 2, rng), Complex(g(rng), g(rng)));
        psi = psi.normalized();
        const FockVector lhs = apply_transfer(z_type_operator(spec), apply_transfer(h, psi));
        const FockVector rhs = apply_transfer(h, apply_transfer(x_type_operator(spec), psi));
        EXPECT_LT(max_abs_difference(lhs, rhs), 1e-9) << spec.to_string();
        EXPECT_LT((z_type_operator(spec).matrix() * h.matrix() - h.matrix() * x_type_operator(spec).matrix())
                      .cwiseAbs()
                      .maxCoeff(),
                  1e-12);
      }
    }
  }
}

TEST(StabilizerLemma, BlockLayerMatchesDense) {
  for (int k = 0; k <= 2; ++k)
    for (int d = 2; d <= 3; ++d)
      EXPECT_LT((hadamard_layer_blocks(k, d).to_dense().matrix() - hadamard_layer(k, d).matrix()).cwiseAbs().maxCoeff(),
                1e-15);
}

TEST(StabilizerLemma, QubitPsiPairSeparates) {
  // psi_{01+} bunches within a block pair, psi_{01-} splits across blocks.
  const StabilizerSpec spec = StabilizerSpec::make(0, 0, 2);
  const LemmaReport r = verify_lemma(encode(pairwise_psi(2, 0, 1, Sign::Plus)),
                                     encode(pairwise_psi(2, 0, 1, Sign::Minus)), spec, 1e-9, true);
  EXPECT_TRUE(r.passed);
  EXPECT_LE(r.max_wrong_parity_amplitude, 1e-9);
  const std::vector<FockBasisState> plus{fs({0, 0, 1, 1}), fs({1, 1, 0, 0})};
  const std::vector<FockBasisState> minus{fs({0, 1, 1, 0}), fs({1, 0, 0, 1})};
  EXPECT_EQ(r.plus_patterns, plus);
  EXPECT_EQ(r.minus_patterns, minus);
}

TEST(StabilizerLemma, QutritWithAncilla) {
  const StabilizerSpec spec = StabilizerSpec::make(1, 0, 3);
  const FockVector plus = encode(tensor(pairwise_psi(3, 0, 2, Sign::Plus), ghz(3, 2)));
  const FockVector minus = encode(tensor(pairwise_psi(3, 0, 2, Sign::Minus), ghz(3, 2)));
  const LemmaReport r = verify_lemma(plus, minus, spec);
  EXPECT_TRUE(r.passed);
  EXPECT_GT(r.plus_support, 0u);
  EXPECT_GT(r.minus_support, 0u);
  EXPECT_LE(r.max_wrong_parity_amplitude, 1e-9);
}

TEST(StabilizerLemma, RejectsNonEigenstates) {
  const StabilizerSpec spec = StabilizerSpec::make(0, 0, 2);
  const FockVector plus = encode(pairwise_psi(2, 0, 1, Sign::Plus));
  EXPECT_THROW(verify_lemma(plus, plus, spec), std::invalid_argument);
  EXPECT_THROW(verify_lemma(encode(QuditState::basis(2, std::vector{0, 1})), encode(pairwise_psi(2, 0, 1, Sign::Minus)), spec),
               std::invalid_argument);
}

TEST(StabilizerLemma, AllCasesPass) {
  for (int k = 0; k <= 2; ++k) {
    for (int p = 0; p <= k; ++p) {
      for (int d = 2; d <= 3; ++d) {
        const StabilizerSpec spec = StabilizerSpec::make(k, p, d);
        const auto cases = lemma_cases(spec);
        EXPECT_EQ(cases.size(), static_cast<std::size_t>(d * (d - 1) / 2));
        for (const auto& c : cases) {
          const LemmaReport r = verify_lemma(c.plus, c.minus, spec);
          EXPECT_TRUE(r.passed) << spec.to_string() << " " << c.name;
          EXPECT_LE(r.max_wrong_parity_amplitude, 1e-9);
        }
      }
    }
  }
}

}  // namespace
}  // namespace pairfuse
