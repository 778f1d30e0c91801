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
#include <optional>
#include <random>

#include "snaq/spinnet.hpp"

namespace snaq {
namespace {

constexpr double kPi = std::numbers::pi;

// Fusion rule written out independently of the library.
bool fuses(int a, int b, int c, int k) {
  return c >= std::abs(a - b) && c <= a + b && (a + b + c) % 2 == 0 && a + b + c <= 2 * k;
}

// Counts labelings of `links` links whose vertex triples all fuse, with
// optional fixed labels (negative entries are free).
std::size_t brute_count(int links, const std::vector<std::array<int, 3>>& vertices, int k,
                        const std::vector<int>& fixed) {
  std::vector<int> lab(links, 0);
  std::vector<int> free;
  for (int i = 0; i < links; ++i) {
    if (fixed[i] >= 0) lab[i] = fixed[i];
    else free.push_back(i);
  }
  std::size_t count = 0;
  while (true) {
    bool ok = true;
    for (const auto& v : vertices) ok = ok && fuses(lab[v[0]], lab[v[1]], lab[v[2]], k);
    count += ok;
    std::size_t p = 0;
    while (p < free.size() && lab[free[p]] == k) lab[free[p++]] = 0;
    if (p == free.size()) break;
    ++lab[free[p]];
  }
  return count;
}

// Torus geometry from the site convention: links (h, v, a) per site,
// A(x,y) = (v(x,y), h(x,y), a(x,y)), B(x,y) = (v(x,y-1), h(x-1,y), a(x,y)).
std::vector<std::array<int, 3>> torus_vertices(int lx, int ly) {
  auto id = [&](int t, int x, int y) { return 3 * (((x % lx + lx) % lx) * ly + (y % ly + ly) % ly) + t; };
  std::vector<std::array<int, 3>> out;
  for (int x = 0; x < lx; ++x)
    for (int y = 0; y < ly; ++y) {
      out.push_back({id(1, x, y), id(0, x, y), id(2, x, y)});
      out.push_back({id(1, x, y - 1), id(0, x - 1, y), id(2, x, y)});
    }
  return out;
}

TEST(SpinNetwork, SinglePlaquetteDimensionIsKPlusOne) {
  for (int k = 1; k <= 12; ++k) {
    EXPECT_EQ(SNBasis(SpinNetwork::single_plaquette(), Level(k)).size(), static_cast<std::size_t>(k + 1));
  }
}

TEST(SpinNetwork, TorusDimensionMatchesBruteForce) {
  for (int k = 1; k <= 2; ++k) {
    const SNBasis b(SpinNetwork::torus(2, 2), Level(k));
    EXPECT_EQ(b.size(), brute_count(12, torus_vertices(2, 2), k, std::vector<int>(12, -1))) << "k=" << k;
  }
  EXPECT_EQ(SNBasis(SpinNetwork::torus(2, 2), Level(2)).size(), 528u);
}

TEST(SpinNetwork, HexagonDimensionMatchesBruteForce) {
  // Corner i joins inner i, inner i+1 and leg i.
  std::vector<std::array<int, 3>> corners;
  for (int i = 0; i < 6; ++i) corners.push_back({i, (i + 1) % 6, 6 + i});
  std::mt19937_64 rng(11);
  for (int k = 1; k <= 3; ++k) {
    for (int trial = 0; trial < 20; ++trial) {
      std::array<SpinLabel, 6> outer;
      std::vector<int> fixed(12, -1);
      int sum = 0;
      for (int i = 0; i < 6; ++i) {
        const int t = std::uniform_int_distribution<int>(0, k)(rng);
        outer[i] = SpinLabel(t);
        fixed[6 + i] = t;
        sum += t;
      }
      const std::size_t want = brute_count(12, corners, k, fixed);
      if (want == 0) {
        EXPECT_THROW(SNBasis(SpinNetwork::hexagon(outer), Level(k)), EmptyBasisError);
      } else {
        EXPECT_EQ(SNBasis(SpinNetwork::hexagon(outer), Level(k)).size(), want);
      }
      if (sum % 2) EXPECT_EQ(want, 0u);
    }
  }
}

TEST(SpinNetwork, EveryStateSatisfiesFusion) {
  const SpinNetwork net = SpinNetwork::torus(2, 2);
  const SNBasis b(net, Level(3));
  for (std::size_t i = 0; i < b.size(); ++i) {
    const auto s = b.state(i);
    for (const auto& v : net.vertices()) ASSERT_TRUE(fuses(s[v[0]], s[v[1]], s[v[2]], 3));
    ASSERT_EQ(b.index_of(s).value(), i);
  }
}

TEST(SpinNetwork, MalformedNetworkRejected) {
  std::vector<Link> links(3);
  EXPECT_THROW(SpinNetwork(Topology::Torus, links, {{0, 1, 2}, {0, 1, 2}, {0, 1, 2}}, {}),
               MalformedNetworkError);
  EXPECT_THROW(SpinNetwork::torus(1, 3), MalformedNetworkError);
}

TEST(SpinNetwork, DimensionCap) {
  EXPECT_THROW(SNBasis(SpinNetwork::torus(2, 2), Level(3), 100), DimensionCapError);
}

TEST(Electric, Casimir) {
  EXPECT_EQ(electric_energy(SpinLabel(0)), 0.0);
  EXPECT_EQ(electric_energy(SpinLabel(1)), 0.75);
  EXPECT_EQ(electric_energy(SpinLabel(4)), 6.0);
}

TEST(SinglePlaquette, ClosedFormMatrices) {
  const auto h1 = single_plaquette_hamiltonian(Level(1), 1.0, Convention::Rescaled).dense();
  Eigen::Matrix2d want;
  want << 0, -2, -2, 3;
  EXPECT_LT((h1 - want).cwiseAbs().maxCoeff(), 1e-15);

  const double g2 = 0.7, off = -2.0 / (g2 * g2);
  const auto h2 = single_plaquette_hamiltonian(Level(2), g2, Convention::Rescaled).dense();
  Eigen::Matrix3d w2;
  w2 << 0, off, 0, off, 3, off, 0, off, 8;
  EXPECT_LT((h2 - w2).cwiseAbs().maxCoeff(), 1e-14);

  const auto raw = single_plaquette_hamiltonian(Level(2), g2, Convention::Raw).dense();
  EXPECT_LT((raw * (2.0 / g2) - h2).cwiseAbs().maxCoeff(), 1e-13);
}

TEST(SinglePlaquette, SixFPathMatchesTridiagonal) {
  for (int k = 1; k <= 6; ++k) {
    const Level l(k);
    const SNBasis b(SpinNetwork::single_plaquette(), l);
    for (auto conv : {Convention::Raw, Convention::Rescaled}) {
      const auto generic = build_hamiltonian(b, 0.4, conv, shared_ftable(l)).dense();
      const auto direct = single_plaquette_hamiltonian(l, 0.4, conv).dense();
      EXPECT_LT((generic - direct).cwiseAbs().maxCoeff(), 1e-12) << "k=" << k;
    }
  }
}

TEST(SinglePlaquette, SpectrumTwoByTwo) {
  const Spectrum s = diagonalize(single_plaquette_hamiltonian(Level(1), 1.0, Convention::Rescaled), 2);
  EXPECT_NEAR(s.eigenvalues(0), -1.0, 1e-12);
  EXPECT_NEAR(s.eigenvalues(1), 4.0, 1e-12);
  // Ground state of [[0,-2],[-2,3]] is (2, 1)/sqrt(5) with the positive sign convention.
  EXPECT_NEAR(s.eigenvectors(0, 0), 2.0 / std::sqrt(5.0), 1e-12);
  EXPECT_NEAR(s.eigenvectors(1, 0), 1.0 / std::sqrt(5.0), 1e-12);
}

TEST(SinglePlaquette, StrongCouplingGroundStateIsVacuum) {
  const Spectrum s = diagonalize(single_plaquette_hamiltonian(Level(4), 1e6, Convention::Rescaled), 1);
  EXPECT_NEAR(s.eigenvalues(0), 0.0, 1e-9);
  EXPECT_NEAR(std::abs(s.eigenvectors(0, 0)), 1.0, 1e-12);
}

TEST(SinglePlaquette, LoopIsPathAdjacency) {
  // On the chain, U^(1/2) is the adjacency of the path 0 - 1/2 - ... - k/2.
  for (int k = 1; k <= 6; ++k) {
    const Level l(k);
    const SNBasis b(SpinNetwork::single_plaquette(), l);
    const Eigen::MatrixXd u = Eigen::MatrixXd(plaquette_operator(b, 0, kSpinHalf, shared_ftable(l)));
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(u);
    for (int m = 1; m <= k + 1; ++m) {
      const double want = 2.0 * std::cos(kPi * (k + 2 - m) / (k + 2));
      EXPECT_NEAR(es.eigenvalues()(m - 1), want, 1e-12);
    }
  }
}

TEST(PlaquetteOperator, FusionAlgebraOnTorus) {
  // U^(1/2) U^(1/2) = U^(0) + U^(1), and U^(0) is the identity.
  const Level l(2);
  const SNBasis b(SpinNetwork::torus(2, 2), l);
  const auto& t = shared_ftable(l);
  for (int p = 0; p < 4; ++p) {
    const Eigen::MatrixXd u0 = Eigen::MatrixXd(plaquette_operator(b, p, SpinLabel(0), t));
    const Eigen::MatrixXd uh = Eigen::MatrixXd(plaquette_operator(b, p, SpinLabel(1), t));
    const Eigen::MatrixXd u1 = Eigen::MatrixXd(plaquette_operator(b, p, SpinLabel(2), t));
    EXPECT_LT((u0 - Eigen::MatrixXd::Identity(b.size(), b.size())).cwiseAbs().maxCoeff(), 1e-13);
    EXPECT_LT((uh * uh - u0 - u1).cwiseAbs().maxCoeff(), 1e-12) << "plaquette " << p;
  }
}

TEST(PlaquetteOperator, LoopsCommute) {
  const Level l(2);
  const SNBasis b(SpinNetwork::torus(2, 2), l);
  const auto& t = shared_ftable(l);
  const Eigen::MatrixXd a = Eigen::MatrixXd(plaquette_operator(b, 0, kSpinHalf, t));
  const Eigen::MatrixXd c = Eigen::MatrixXd(plaquette_operator(b, 1, kSpinHalf, t));
  EXPECT_LT((a * c - c * a).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(PlaquetteOperator, HexagonSpectrumBoundedByQuantumDimension) {
  std::mt19937_64 rng(3);
  for (int k = 1; k <= 3; ++k) {
    const Level l(k);
    const double dh = quantum_dimension(kSpinHalf, l);
    for (int trial = 0; trial < 10; ++trial) {
      std::array<SpinLabel, 6> outer;
      for (auto& o : outer) o = SpinLabel(std::uniform_int_distribution<int>(0, k)(rng));
      try {
        const SNBasis b(SpinNetwork::hexagon(outer), l);
        const Eigen::MatrixXd u = Eigen::MatrixXd(plaquette_operator(b, 0, kSpinHalf, shared_ftable(l)));
        EXPECT_LT((u - u.transpose()).cwiseAbs().maxCoeff(), 1e-12);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(u);
        EXPECT_LE(es.eigenvalues().cwiseAbs().maxCoeff(), dh + 1e-12);
      } catch (const EmptyBasisError&) {
      }
    }
  }
}

TEST(PlaquetteElement, OrientationReversalInvariant) {
  // Reversing the traversal maps inner (j1..j6) to (j6..j1) and legs
  // (L12..L61) to (L56, L45, L34, L23, L12, L61). Pairs come from hexagon
  // bases (inner links 0..5, legs 6..11).
  std::mt19937_64 rng(5);
  const Level l(3);
  const auto& t = shared_ftable(l);
  int checked = 0, nonzero = 0;
  while (checked < 400) {
    std::array<SpinLabel, 6> legs;
    for (auto& o : legs) o = SpinLabel(std::uniform_int_distribution<int>(0, 3)(rng));
    std::optional<SNBasis> b;
    try {
      b.emplace(SpinNetwork::hexagon(legs), l);
    } catch (const EmptyBasisError&) {
      continue;
    }
    for (std::size_t i = 0; i < b->size(); ++i) {
      for (std::size_t j = 0; j < b->size(); ++j) {
        std::array<SpinLabel, 6> in, out;
        bool ok = true;
        for (int c = 0; c < 6; ++c) {
          in[c] = SpinLabel(b->state(i)[c]);
          out[c] = SpinLabel(b->state(j)[c]);
          ok = ok && fuses(in[c].twice(), out[c].twice(), 1, 3);
        }
        if (!ok) continue;
        std::array<SpinLabel, 6> rlegs{legs[4], legs[3], legs[2], legs[1], legs[0], legs[5]};
        std::array<SpinLabel, 6> rin{in[5], in[4], in[3], in[2], in[1], in[0]};
        std::array<SpinLabel, 6> rout{out[5], out[4], out[3], out[2], out[1], out[0]};
        const double x = plaquette_element(legs, in, out, kSpinHalf, t);
        EXPECT_NEAR(x, plaquette_element(rlegs, rin, rout, kSpinHalf, t), 1e-13);
        nonzero += std::abs(x) > 1e-12;
        ++checked;
      }
    }
  }
  EXPECT_GT(nonzero, 100);
}

TEST(Hamiltonian, SymmetricOnEveryTopology) {
  for (int k = 1; k <= 3; ++k) {
    const Level l(k);
    const auto& t = shared_ftable(l);
    for (const SpinNetwork& net :
         {SpinNetwork::single_plaquette(), SpinNetwork::torus(2, 2),
          SpinNetwork::hexagon({kSpinHalf, kSpinHalf, kSpin0, kSpin0, kSpin0, kSpin0})}) {
      const HamiltonianMatrix h = build_hamiltonian(SNBasis(net, l), 0.8, Convention::Rescaled, t);
      EXPECT_LT(h.symmetry_residual, 1e-12);
      const Eigen::MatrixXd d = h.dense();
      EXPECT_LT((d - d.transpose()).cwiseAbs().maxCoeff(), 1e-12);
    }
  }
}

TEST(Hamiltonian, RawIsRescaledTimesHalfG2) {
  const Level l(2);
  const SNBasis b(SpinNetwork::torus(2, 2), l);
  const auto raw = build_hamiltonian(b, 0.6, Convention::Raw, shared_ftable(l)).dense();
  const auto res = build_hamiltonian(b, 0.6, Convention::Rescaled, shared_ftable(l)).dense();
  EXPECT_LT((raw - 0.3 * res).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Diagonalize, CapAndSign) {
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(3, 3);
  m.diagonal() << 2, 1, 3;
  const Spectrum s = diagonalize(m, 3);
  EXPECT_DOUBLE_EQ(s.eigenvalues(0), 1.0);
  EXPECT_GT(s.eigenvectors(1, 0), 0.0);
  EXPECT_THROW(diagonalize(m, 2, 2), DimensionCapError);
}

TEST(Mathieu, TailCheckAndAgreement) {
  const Eigen::VectorXd v = mathieu_oracle(0.1, 0, 100);
  EXPECT_LT(v.tail(20).squaredNorm(), 1e-12);
  const Spectrum s = diagonalize(single_plaquette_hamiltonian(Level(200), 0.1, Convention::Rescaled), 1, 1000);
  EXPECT_LT((s.eigenvectors.col(0) - v).cwiseAbs().maxCoeff(), 1e-10);
  EXPECT_THROW(mathieu_oracle(0.1, 0, 3), TruncationError);
}

TEST(Mathieu, ExcitedStatesConvergeLater) {
  const double g2 = 0.1;
  auto threshold = [&](int n) {
    const Eigen::VectorXd ref = mathieu_oracle(g2, n, 50).array().square();
    for (int k = std::max(1, n); k <= 100; ++k) {
      const Spectrum s = diagonalize(single_plaquette_hamiltonian(Level(k), g2, Convention::Rescaled), n + 1);
      Eigen::VectorXd p = Eigen::VectorXd::Zero(ref.size());
      p.head(k + 1) = s.eigenvectors.col(n).array().square();
      if ((p - ref).cwiseAbs().maxCoeff() < 1e-6) return k;
    }
    return -1;
  };
  int prev = 0;
  for (int n = 0; n <= 3; ++n) {
    const int t = threshold(n);
    EXPECT_GT(t, prev) << "n=" << n;
    prev = t;
  }
}

TEST(Spectral, GroundEnergyConvergesInK) {
  // |E0(k) - E0(k+2)| shrinks until it reaches rounding noise.
  double prev = 1e300;
  for (int k = 10; k <= 40; ++k) {
    auto e0 = [&](int kk) {
      return diagonalize(single_plaquette_hamiltonian(Level(kk), 0.1, Convention::Rescaled), 1).eigenvalues(0);
    };
    const double d = std::abs(e0(k) - e0(k + 2));
    if (prev > 1e-9) EXPECT_LE(d, prev + 1e-12) << "k=" << k;
    prev = d;
  }
  EXPECT_LT(prev, 1e-9);
}

}  // namespace
}  // namespace snaq
