// Copyright 2026 The snaq Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <thread>

#include <Eigen/Dense>

#include "snaq/qalgebra.hpp"

namespace snaq {
namespace {

constexpr double kPi = std::numbers::pi;

SpinLabel S(int twice) { return SpinLabel(twice); }

TEST(QNumber, SineFormula) {
  // Level k: [n] = sin(pi n / (k+2)) / sin(pi / (k+2)).
  EXPECT_NEAR(q_number(2, Level(1)), 1.0, 1e-15);
  EXPECT_NEAR(q_number(2, Level(2)), std::sqrt(2.0), 1e-15);
  EXPECT_NEAR(q_number(3, Level(2)), 1.0, 1e-15);
  EXPECT_NEAR(q_number(2, Level(3)), (1.0 + std::sqrt(5.0)) / 2.0, 1e-15);
  EXPECT_EQ(q_number(0, Level(4)), 0.0);
  // [k+2] vanishes: labels beyond k/2 have zero quantum dimension.
  EXPECT_NEAR(q_number(6, Level(4)), 0.0, 1e-15);
}

TEST(QNumber, ClassicalLimit) {
  EXPECT_NEAR(q_number(5, Level(100000)), 5.0, 1e-6);
}

TEST(QFactorial, Values) {
  const Level l(3);
  EXPECT_EQ(q_factorial(0, l), 1.0);
  EXPECT_NEAR(q_factorial(3, l), q_number(1, l) * q_number(2, l) * q_number(3, l), 1e-15);
  EXPECT_THROW(q_factorial(-1, l), std::logic_error);
}

TEST(QuantumDimension, TopEigenvalueIdentity) {
  for (int k = 1; k <= 10; ++k) {
    const Level l(k);
    EXPECT_NEAR(quantum_dimension(kSpinHalf, l), 2.0 * std::cos(kPi / (k + 2)), 1e-14);
    EXPECT_NEAR(quantum_dimension(S(k), l), 1.0, 1e-14) << "simple current at k=" << k;
  }
}

TEST(Admissibility, FusionRules) {
  const Level l(2);
  EXPECT_TRUE(is_admissible(S(1), S(1), S(0), l));
  EXPECT_TRUE(is_admissible(S(1), S(1), S(2), l));
  EXPECT_FALSE(is_admissible(S(1), S(1), S(1), l));  // odd twice-sum
  EXPECT_FALSE(is_admissible(S(2), S(2), S(2), l));  // 2j sum 6 > 2k
  EXPECT_FALSE(is_admissible(S(0), S(0), S(2), l));  // triangle
  EXPECT_TRUE(is_triangle(S(2), S(2), S(2)));
  EXPECT_TRUE(is_admissible(S(2), S(2), S(2), Level(3)));
}

// {a b c; b a 0} = (-1)^(a+b+c) / sqrt(d_a d_b), classically and deformed.
TEST(Racah, ZeroColumnClosedForm) {
  for (int k : {1, 2, 3, 5, 8}) {
    const Level l(k);
    for (int a = 0; a <= k; ++a) {
      for (int b = 0; b <= k; ++b) {
        for (int c = 0; c <= k; ++c) {
          if (!is_admissible(S(a), S(b), S(c), l)) continue;
          const double sign = ((a + b + c) / 2) % 2 == 0 ? 1.0 : -1.0;
          const double want = sign / std::sqrt(quantum_dimension(S(a), l) * quantum_dimension(S(b), l));
          EXPECT_NEAR(racah_q6j(S(a), S(b), S(c), S(b), S(a), S(0), l), want, 1e-13)
              << "k=" << k << " a=" << a << " b=" << b << " c=" << c;
        }
      }
    }
  }
  for (int a = 0; a <= 6; ++a) {
    for (int b = 0; b <= 6; ++b) {
      for (int c = std::abs(a - b); c <= a + b; c += 2) {
        const double sign = ((a + b + c) / 2) % 2 == 0 ? 1.0 : -1.0;
        EXPECT_NEAR(classical_6j(S(a), S(b), S(c), S(b), S(a), S(0)),
                    sign / std::sqrt((a + 1.0) * (b + 1.0)), 1e-14);
      }
    }
  }
}

TEST(Racah, ClassicalTableValues) {
  // Standard tabulated SU(2) 6j symbols.
  EXPECT_NEAR(classical_6j(S(2), S(2), S(2), S(2), S(2), S(2)), 1.0 / 6.0, 1e-15);
  EXPECT_NEAR(classical_6j(S(4), S(4), S(4), S(4), S(4), S(4)), -3.0 / 70.0, 1e-15);
  EXPECT_NEAR(classical_6j(S(1), S(1), S(2), S(1), S(1), S(2)), 1.0 / 6.0, 1e-15);
  EXPECT_NEAR(classical_6j(S(1), S(1), S(0), S(1), S(1), S(0)), -0.5, 1e-15);
}

TEST(Racah, InadmissibleIsZero) {
  EXPECT_EQ(racah_q6j(S(1), S(1), S(1), S(1), S(1), S(1), Level(3)), 0.0);
  EXPECT_EQ(racah_q6j(S(2), S(2), S(2), S(2), S(2), S(2), Level(2)), 0.0);
}

TEST(FMatrix, Normalization) {
  // F^{1/2 1/2 0}_{1/2 1/2 0} = v_0 / (v_{1/2} v_{1/2}) = -1/d_{1/2}.
  for (int k = 1; k <= 6; ++k) {
    const Level l(k);
    EXPECT_NEAR(f_matrix(S(1), S(1), S(0), S(1), S(1), S(0), l),
                -1.0 / quantum_dimension(kSpinHalf, l), 1e-14);
  }
  // F^{000}_{abc} = delta_ab delta_bc on admissible labels.
  const Level l(3);
  EXPECT_NEAR(f_matrix(S(0), S(0), S(0), S(0), S(0), S(0), l), 1.0, 1e-15);
  EXPECT_NEAR(f_matrix(S(0), S(0), S(0), S(2), S(2), S(2), l), 1.0, 1e-15);
  EXPECT_NEAR(f_matrix(S(0), S(0), S(0), S(3), S(3), S(3), l), 1.0, 1e-15);
}

TEST(FMatrix, IsingBlock) {
  // k=2, all external legs 1/2: the 2x2 block on j5, j6 in {0, 1} is a
  // symmetric orthogonal matrix with entries of magnitude 1/sqrt(2).
  const Level l(2);
  Eigen::Matrix2d f;
  for (int a = 0; a < 2; ++a)
    for (int b = 0; b < 2; ++b) f(a, b) = f_matrix(S(1), S(1), S(2 * a), S(1), S(1), S(2 * b), l);
  EXPECT_NEAR((f.transpose() * f - Eigen::Matrix2d::Identity()).cwiseAbs().maxCoeff(), 0.0, 1e-15);
  EXPECT_NEAR(f.cwiseAbs().maxCoeff(), 1.0 / std::sqrt(2.0), 1e-15);
  EXPECT_NEAR(f.cwiseAbs().minCoeff(), 1.0 / std::sqrt(2.0), 1e-15);
  EXPECT_NEAR(f(0, 1), f(1, 0), 1e-15);
}

// Orthogonality recomputed directly from f_matrix, independent of the
// identity verifier.
TEST(FMatrix, OrthogonalityDirect) {
  for (int k = 1; k <= 4; ++k) {
    const Level l(k);
    double worst = 0.0;
    for (int a = 0; a <= k; ++a)
      for (int b = 0; b <= k; ++b)
        for (int c = 0; c <= k; ++c)
          for (int d = 0; d <= k; ++d)
            for (int e = 0; e <= k; ++e)
              for (int e2 = 0; e2 <= k; ++e2) {
                double s = 0.0;
                for (int f = 0; f <= k; ++f)
                  s += f_matrix(S(a), S(b), S(e), S(c), S(d), S(f), l) *
                       f_matrix(S(a), S(b), S(e2), S(c), S(d), S(f), l);
                const bool adm = is_admissible(S(a), S(b), S(e), l) && is_admissible(S(c), S(d), S(e), l);
                bool any = false;  // some admissible f for this row
                for (int f = 0; f <= k; ++f)
                  any = any || (is_admissible(S(a), S(d), S(f), l) && is_admissible(S(c), S(b), S(f), l));
                const double want = (e == e2 && adm && any) ? 1.0 : 0.0;
                worst = std::max(worst, std::abs(s - want));
              }
    EXPECT_LT(worst, 1e-12) << "k=" << k;
  }
}

TEST(FMatrix, TetrahedralSymmetry) {
  const Level l(4);
  for (int a = 0; a <= 4; ++a)
    for (int b = 0; b <= 4; ++b)
      for (int e = 0; e <= 4; ++e)
        for (int c = 0; c <= 4; ++c)
          for (int d = 0; d <= 4; ++d)
            for (int f = 0; f <= 4; ++f) {
              const double x = f_matrix(S(a), S(b), S(e), S(c), S(d), S(f), l);
              EXPECT_NEAR(x, f_matrix(S(b), S(a), S(e), S(d), S(c), S(f), l), 1e-13);
              EXPECT_NEAR(x, f_matrix(S(d), S(c), S(e), S(b), S(a), S(f), l), 1e-13);
            }
}

TEST(FMatrix, LabelOutOfRangeThrows) {
  EXPECT_THROW(f_matrix(S(3), S(1), S(2), S(1), S(1), S(0), Level(2)), std::out_of_range);
}

TEST(ClassicalLimit, DeviationShrinks) {
  double prev = 1e9;
  for (int k : {50, 100, 200, 400}) {
    const double d = classical_limit_deviation(Level(k), 2);
    EXPECT_LT(d, prev);
    prev = d;
  }
  EXPECT_LT(prev, 1e-3);
}

TEST(FTable, MatchesDirectFormula) {
  for (int k : {3, 12}) {  // dense cache and locked map
    FTable t{Level(k)};
    const Level l(k);
    const int top = std::min(k, 5);
    for (int a = 0; a <= top; ++a)
      for (int b = 0; b <= top; ++b)
        for (int e = 0; e <= top; ++e)
          for (int c = 0; c <= top; ++c)
            for (int d = 0; d <= top; ++d)
              for (int f = 0; f <= top; ++f)
                ASSERT_EQ(t.get(a, b, e, c, d, f), f_matrix(S(a), S(b), S(e), S(c), S(d), S(f), l));
  }
}

TEST(FTable, ConcurrentReadsAgree) {
  FTable t{Level(12)};
  std::vector<double> sums(4, 0.0);
  std::vector<std::thread> pool;
  for (int w = 0; w < 4; ++w) {
    pool.emplace_back([&, w] {
      double s = 0.0;
      for (int a = 0; a <= 6; ++a)
        for (int b = 0; b <= 6; ++b)
          for (int e = 0; e <= 6; ++e) s += t.get(a, b, e, b, a, 0);
      sums[w] = s;
    });
  }
  for (auto& th : pool) th.join();
  for (int w = 1; w < 4; ++w) EXPECT_EQ(sums[w], sums[0]);
}

TEST(FTable, EagerBuildFillsCache) {
  FTable t{Level(2)};
  t.build_eager();
  std::size_t triples = 0;
  for (int a = 0; a <= 2; ++a)
    for (int b = 0; b <= 2; ++b)
      for (int c = 0; c <= 2; ++c) triples += is_admissible(S(a), S(b), S(c), Level(2));
  EXPECT_EQ(triples, 10u);
  EXPECT_EQ(t.cached_entries(), triples * 27);
}

TEST(Identities, PassForSmallLevels) {
  for (int k = 1; k <= 4; ++k) {
    IdentityOptions o;
    o.threads = 2;
    const IdentityReport r = verify_identities(shared_ftable(Level(k)), o);
    EXPECT_TRUE(r.passed()) << "k=" << k;
    EXPECT_LT(r.at("pentagon").max_residual, 1e-12);
    EXPECT_LT(r.at("orthogonality").max_residual, 1e-12);
    EXPECT_LT(r.at("tetrahedral_symmetry").max_residual, 1e-13);
    EXPECT_LT(r.at("v_weighted_symmetry").max_residual, 1e-13);
    EXPECT_LT(r.at("normalization").max_residual, 1e-13);
    EXPECT_GT(r.at("pentagon").num_checked, 0u);
  }
}

TEST(Identities, DefaultToleranceByLevel) {
  EXPECT_EQ(default_identity_tolerance(Level(4)), 1e-10);
  EXPECT_EQ(default_identity_tolerance(Level(5)), 1e-8);
}

TEST(Identities, RejectsLevelAboveCap) {
  IdentityOptions o;
  o.max_level = 3;
  EXPECT_THROW(verify_identities(shared_ftable(Level(4)), o), std::invalid_argument);
}

TEST(Identities, CorruptedEntryFailsPentagon) {
  FTable t{Level(2)};
  t.inject_for_testing({1, 1, 2, 1, 1, 2}, 0.3);
  const IdentityReport r = verify_identities(t);
  EXPECT_FALSE(r.passed());
  EXPECT_GT(r.at("pentagon").max_residual, 1e-3);
}

TEST(Identities, SinkSeesEveryIdentity) {
  std::vector<std::string> names;
  verify_identities(shared_ftable(Level(1)), {}, [&](const IdentityResidual& r) { names.push_back(r.identity); });
  EXPECT_EQ(names.size(), 6u);
}

}  // namespace
}  // namespace snaq
