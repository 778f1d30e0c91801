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
#include <filesystem>
#include <fstream>
#include <numbers>
#include <random>

#include <unistd.h>

#include "snaq/variational.hpp"

namespace snaq {
namespace {

constexpr double kPi = std::numbers::pi;

double qdim(int t, int k) { return std::sin((t + 1) * kPi / (k + 2)) / std::sin(kPi / (k + 2)); }

bool fuses(int a, int b, int c, int k) {
  return c >= std::abs(a - b) && c <= a + b && (a + b + c) % 2 == 0 && a + b + c <= 2 * k;
}

// Electric kernel written from the fusion weights, independent of the library.
Eigen::MatrixXd kernel(int k) {
  Eigen::MatrixXd w = Eigen::MatrixXd::Zero(k + 1, k + 1);
  for (int a = 0; a <= k; ++a)
    for (int b = 0; b <= k; ++b)
      for (int c = 0; c <= k; ++c)
        if (fuses(a, b, c, k)) w(a, b) += 0.25 * c * (c + 2) * qdim(c, k) / (qdim(a, k) * qdim(b, k));
  return w;
}

double energy_oracle(const Eigen::VectorXd& psi, double g2) {
  const int k = static_cast<int>(psi.size()) - 1;
  const Eigen::VectorXd p = psi.array().square();
  double u = 0.0;
  for (int a = 0; a < k; ++a) u += 2.0 * psi(a) * psi(a + 1);
  return 2.0 * p.dot(kernel(k) * p) - 2.0 / (g2 * g2) * u;
}

Eigen::VectorXd random_sphere(int n, std::mt19937_64& rng) {
  std::normal_distribution<double> nd;
  Eigen::VectorXd v(n);
  for (auto& x : v) x = nd(rng);
  return v.normalized();
}

TEST(EnergyModel, KernelMatchesOracle) {
  for (int k = 1; k <= 8; ++k) {
    const auto m = build_energy_model(Level(k));
    EXPECT_LT((m.electric - kernel(k)).cwiseAbs().maxCoeff(), 1e-13) << "k=" << k;
    EXPECT_LT((m.adjacency - m.adjacency.transpose()).cwiseAbs().maxCoeff(), 0.0 + 1e-300);
  }
}

TEST(MeanEnergy, VacuumIsZero) {
  for (int k = 1; k <= 6; ++k) {
    const auto v = VariationalState::vacuum(Level(k));
    EXPECT_EQ(mean_energy(v, 0.7), 0.0);
    EXPECT_EQ(mean_plaquette(v), 0.0);
  }
}

TEST(MeanEnergy, UniformAtKOne) {
  const auto s = VariationalState::normalized(Level(1), Eigen::Vector2d(1.0, 1.0));
  for (double g2 : {0.5, 1.0, 2.0}) {
    EXPECT_NEAR(mean_energy(s, g2), 0.75 - 2.0 / (g2 * g2), 1e-14);
  }
  EXPECT_NEAR(mean_plaquette(s), 1.0, 1e-15);
}

TEST(MeanEnergy, RandomStatesMatchOracle) {
  std::mt19937_64 rng(3);
  for (int k = 1; k <= 10; ++k) {
    for (int i = 0; i < 5; ++i) {
      const Eigen::VectorXd psi = random_sphere(k + 1, rng);
      const VariationalState s(Level(k), psi);
      EXPECT_NEAR(mean_energy(s, 0.8), energy_oracle(psi, 0.8), 1e-12);
    }
  }
}

TEST(MeanEnergy, RejectsUnnormalized) {
  const VariationalState s(Level(2), Eigen::Vector3d(1.0, 1.0, 0.0));
  EXPECT_NEAR(s.normalization_error(), 1.0, 1e-15);
  EXPECT_THROW(mean_energy(s, 1.0), NormalizationError);
  EXPECT_THROW(VariationalState::normalized(Level(2), Eigen::Vector3d::Zero()), NormalizationError);
  EXPECT_THROW(VariationalState(Level(2), Eigen::Vector2d(1.0, 0.0)), std::invalid_argument);
}

TEST(MeanEnergy, GradientMatchesFiniteDifferences) {
  std::mt19937_64 rng(9);
  for (int k : {1, 3, 6}) {
    const auto m = build_energy_model(Level(k));
    const Eigen::VectorXd psi = random_sphere(k + 1, rng);
    const Eigen::VectorXd g = mean_energy_gradient(m, psi, 0.9);
    // The closed form is a quartic plus a quadratic; differentiate it off
    // the sphere with the oracle formula.
    auto f = [&](const Eigen::VectorXd& x) {
      const Eigen::VectorXd p = x.array().square();
      return 2.0 * p.dot(m.electric * p) - 2.0 / 0.81 * x.dot(m.adjacency * x);
    };
    for (int i = 0; i <= k; ++i) {
      Eigen::VectorXd e = Eigen::VectorXd::Zero(k + 1);
      e(i) = 1e-6;
      EXPECT_NEAR(g(i), (f(psi + e) - f(psi - e)) / 2e-6, 1e-6);
    }
  }
}

TEST(MaxPlaquette, TopEigenvalue) {
  for (int k = 1; k <= 12; ++k) {
    EXPECT_NEAR(max_mean_plaquette(Level(k)), 2.0 * std::cos(kPi / (k + 2)), 1e-13);
  }
}

TEST(Optimize, GoldenSectionAtKOne) {
  // On the circle psi = (cos t, sin t) the minimum is one-dimensional.
  const double g2 = 1.0;
  auto f = [&](double t) { return energy_oracle(Eigen::Vector2d(std::cos(t), std::sin(t)), g2); };
  double lo = 0.0, hi = kPi / 2;
  const double r = (std::sqrt(5.0) - 1.0) / 2.0;
  for (int i = 0; i < 200; ++i) {
    const double a = hi - r * (hi - lo), b = lo + r * (hi - lo);
    (f(a) < f(b) ? hi : lo) = (f(a) < f(b) ? b : a);
  }
  const double want = f(0.5 * (lo + hi));
  const auto res = optimize(Level(1), g2);
  EXPECT_TRUE(res.converged);
  EXPECT_NEAR(res.energy, want, 1e-12);
}

TEST(Optimize, StrongCouplingApproachesVacuum) {
  // E is invariant under psi_j -> psi_{k/2-j}; the vacuum representative is
  // the one reported.
  for (int k = 1; k <= 6; ++k) {
    const auto res = optimize(Level(k), 10.0);
    EXPECT_GT(res.psi(0) * res.psi(0), 0.99) << "k=" << k;
    Eigen::VectorXd rev = res.psi.reverse();
    EXPECT_NEAR(energy_oracle(rev, 10.0), res.energy, 1e-15);
  }
}

TEST(Optimize, WeakCouplingAtKOneIsUniform) {
  const auto res = optimize(Level(1), 0.05);
  EXPECT_NEAR(std::abs(res.psi(0)), 1.0 / std::sqrt(2.0), 1e-6);
  EXPECT_NEAR(std::abs(res.psi(1)), 1.0 / std::sqrt(2.0), 1e-6);
}

TEST(Optimize, SeedStableAndBelowReferences) {
  for (int k : {2, 5, 9}) {
    for (double g2 : {0.2, 0.6, 1.5}) {
      OptimizeOptions a, b;
      a.seed = 1;
      b.seed = 77;
      const auto ra = optimize(Level(k), g2, a);
      const auto rb = optimize(Level(k), g2, b);
      EXPECT_NEAR(ra.energy, rb.energy, 1e-10 * (1.0 + std::abs(ra.energy)));
      EXPECT_LE(ra.energy, 1e-12);
      Eigen::VectorXd u(k + 1);
      for (int t = 0; t <= k; ++t) u(t) = qdim(t, k);
      EXPECT_LE(ra.energy, energy_oracle(u.normalized(), g2) + 1e-12);
      EXPECT_LE(std::abs(ra.plaquette), max_mean_plaquette(Level(k)) + 1e-12);
    }
  }
}

// Brute force on a planar 2x2 patch (plaquettes 0, 1, 3, 4 of a 3x3 torus,
// the rest left at zero flux). Each physical link contributes the
// two-plaquette kernel if both neighbours are in the patch, the one-plaquette
// Casimir if only one is, and every patch plaquette contributes <U>.
TEST(BruteForce, PlanarPatchMatchesPerLinkClosedForm) {
  const SpinNetwork net = SpinNetwork::torus(3, 3);
  const std::vector<int> patch{0, 1, 3, 4};
  std::vector<int> touch(net.num_links(), 0);
  for (int p : patch)
    for (int l : net.plaquettes()[p].inner) ++touch[l];
  int interior = 0, boundary = 0;
  for (int l : net.physical_links()) {
    interior += touch[l] == 2;
    boundary += touch[l] == 1;
  }
  EXPECT_EQ(2 * interior + boundary, 16);  // 4 plaquettes x 4 physical links
  std::mt19937_64 rng(21);
  for (int k = 1; k <= 2; ++k) {
    const Level l(k);
    const auto& table = shared_ftable(l);
    for (int trial = 0; trial < (k == 1 ? 4 : 1); ++trial) {
      const Eigen::VectorXd psi = random_sphere(k + 1, rng);
      const Eigen::VectorXd p = psi.array().square();
      double casimir = 0.0;
      for (int t = 0; t <= k; ++t) casimir += p(t) * 0.25 * t * (t + 2);
      double u = 0.0;
      for (int t = 0; t < k; ++t) u += 2.0 * psi(t) * psi(t + 1);
      const auto bf = brute_force_expectation(VariationalState(l, psi), net, 0.7, table, patch,
                                              std::size_t{1} << 20);
      EXPECT_NEAR(bf.norm, 1.0, 1e-13) << "k=" << k;
      EXPECT_NEAR(bf.electric, interior * p.dot(kernel(k) * p) + boundary * casimir, 1e-12);
      EXPECT_NEAR(bf.magnetic, 4.0 * u, 1e-12);
    }
  }
}

TEST(BruteForce, VacuumAgreesOnTorus) {
  const auto& table = shared_ftable(Level(1));
  const auto bf = brute_force_expectation(VariationalState::vacuum(Level(1)),
                                          SpinNetwork::torus(2, 2), 0.5, table);
  EXPECT_NEAR(bf.norm, 1.0, 1e-15);
  EXPECT_NEAR(bf.energy_density, 0.0, 1e-15);
}

TEST(BruteForce, ClosedTorusNormHasWindingOverlap) {
  // At k = 1 the four Z2 plaquette flips multiply to the identity on the 2x2
  // torus, so <psi|psi> = 1 + 16 psi_0^4 psi_1^4 rather than 1. This is why
  // the closed form only holds in the infinite-volume limit.
  const auto& table = shared_ftable(Level(1));
  std::mt19937_64 rng(4);
  for (int i = 0; i < 4; ++i) {
    const Eigen::VectorXd psi = random_sphere(2, rng);
    const auto bf = brute_force_expectation(VariationalState(Level(1), psi),
                                            SpinNetwork::torus(2, 2), 0.5, table);
    EXPECT_NEAR(bf.norm, 1.0 + 16.0 * std::pow(psi(0) * psi(1), 4), 1e-12);
  }
}

// Independent transition oracle: the string-net point psi ~ d_j is
// stationary for every coupling; g_c^2 is where its finite-difference
// tangent Hessian first acquires a negative eigenvalue.
double hessian_threshold(int k) {
  Eigen::VectorXd u(k + 1);
  for (int t = 0; t <= k; ++t) u(t) = qdim(t, k);
  u.normalize();
  // Orthonormal complement of u from the QR of [u I].
  Eigen::MatrixXd m(k + 1, k + 2);
  m << u, Eigen::MatrixXd::Identity(k + 1, k + 1);
  const Eigen::MatrixXd q = m.householderQr().householderQ();
  const Eigen::MatrixXd tb = q.rightCols(k);
  auto min_eig = [&](double g2) {
    const double h = 1e-4;
    auto f = [&](const Eigen::VectorXd& t) { return energy_oracle((u + tb * t).normalized(), g2); };
    Eigen::MatrixXd hess(k, k);
    const double f0 = f(Eigen::VectorXd::Zero(k));
    for (int i = 0; i < k; ++i)
      for (int j = 0; j < k; ++j) {
        Eigen::VectorXd ei = Eigen::VectorXd::Zero(k), ej = Eigen::VectorXd::Zero(k);
        ei(i) = h;
        ej(j) = h;
        hess(i, j) = i == j ? (f(ei) - 2 * f0 + f(-ei)) / (h * h)
                            : (f(ei + ej) - f(ei - ej) - f(ej - ei) + f(-ei - ej)) / (4 * h * h);
      }
    return Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(hess).eigenvalues()(0) * g2 * g2;
  };
  double lo = 0.02, hi = 5.0;
  EXPECT_GT(min_eig(lo), 0.0);
  EXPECT_LT(min_eig(hi), 0.0);
  for (int i = 0; i < 60; ++i) {
    const double mid = std::sqrt(lo * hi);
    (min_eig(mid) > 0.0 ? lo : hi) = mid;
  }
  return std::sqrt(lo * hi);
}

TEST(PhaseScan, CriticalCouplingsMatchHessianOracle) {
  const auto grid = log_grid(0.02, 5.0, 80);
  std::vector<std::pair<int, double>> scan_pts, oracle_pts;
  for (int k = 1; k <= 16; ++k) {
    const auto res = phase_scan(Level(k), grid);
    ASSERT_TRUE(res.critical_g2.has_value()) << "k=" << k;
    EXPECT_NE(res.detection, "grid") << "k=" << k;
    const double oracle = hessian_threshold(k);
    EXPECT_NEAR(*res.critical_g2, oracle, 0.05 * oracle) << "k=" << k;
    scan_pts.emplace_back(k, *res.critical_g2);
    oracle_pts.emplace_back(k, oracle);
  }
  const auto fs = fit_critical_law(scan_pts);
  const auto fo = fit_critical_law(oracle_pts);
  EXPECT_NEAR(fs.g0, fo.g0, 0.02 * fo.g0);
  EXPECT_NEAR(fs.k0, fo.k0, 0.1);
}

TEST(PhaseScan, PlaquetteMonotoneAndDeterministic) {
  const auto grid = log_grid(0.05, 4.0, 40);
  const auto a = phase_scan(Level(4), grid);
  const auto b = phase_scan(Level(4), grid);
  ASSERT_EQ(a.points.size(), grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    EXPECT_EQ(a.points[i].energy, b.points[i].energy);
    if (i) EXPECT_LE(a.points[i].plaquette, a.points[i - 1].plaquette + 1e-12);
  }
}

TEST(LogGrid, EndpointsAndRatio) {
  const auto g = log_grid(0.02, 5.0, 80);
  ASSERT_EQ(g.size(), 80u);
  EXPECT_DOUBLE_EQ(g.front(), 0.02);
  EXPECT_DOUBLE_EQ(g.back(), 5.0);
  EXPECT_NEAR(g[1] / g[0], g[79] / g[78], 1e-12);
}

TEST(CriticalFit, RecoversSyntheticLaw) {
  std::vector<std::pair<int, double>> pts;
  for (int k = 1; k <= 16; ++k) {
    const double gc = 4.2 / (k + 2.5);
    pts.emplace_back(k, gc * gc);
  }
  const auto f = fit_critical_law(pts);
  EXPECT_NEAR(f.g0, 4.2, 1e-9);
  EXPECT_NEAR(f.k0, 2.5, 1e-9);
  EXPECT_LT(f.residual, 1e-12);
  // g0 = 4.43, k0 = 2.76 puts g_c = 0.3 near k = 12.
  const double k_at = 4.43 / 0.3 - 2.76;
  EXPECT_NEAR(k_at, 12.0, 0.05);
}

TEST(CriticalFit, TooFewPointsThrows) {
  std::vector<std::pair<int, double>> pts{{1, 1.0}, {2, 0.5}};
  EXPECT_THROW(fit_critical_law(pts), std::invalid_argument);
}

class McFile : public ::testing::Test {
 protected:
  std::filesystem::path path_ =
      std::filesystem::temp_directory_path() / ("snaq_mc_" + std::to_string(::getpid()) + ".csv");
  void write(const std::string& text) { std::ofstream(path_) << text; }
  void TearDown() override { std::filesystem::remove(path_); }
};

TEST_F(McFile, BetaHeaderConverts) {
  write("beta,plaquette,error\n4.0,0.5,0.01\n8,0.7,0.02\n");
  const auto rows = read_mc_reference(path_.string());
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_DOUBLE_EQ(rows[0].g2, 1.0);
  EXPECT_DOUBLE_EQ(rows[1].g2, 0.5);
  EXPECT_DOUBLE_EQ(rows[1].error, 0.02);
}

TEST_F(McFile, G2HeaderKeepsValues) {
  write("g2,plaquette,error\n0.25,0.5,0.01\n");
  const auto rows = read_mc_reference(path_.string());
  ASSERT_EQ(rows.size(), 1u);
  EXPECT_DOUBLE_EQ(rows[0].g2, 0.25);
}

TEST_F(McFile, MalformedRowThrows) {
  write("g2,plaquette,error\n0.25,abc,0.01\n");
  EXPECT_THROW(read_mc_reference(path_.string()), std::runtime_error);
  EXPECT_THROW(read_mc_reference("/nonexistent/snaq.csv"), std::runtime_error);
}

TEST(CompareMc, InterpolatesInsideRange) {
  std::vector<ScanPoint> scan(2);
  scan[0].g2 = 1.0;
  scan[0].plaquette = 1.0;
  scan[1].g2 = 2.0;
  scan[1].plaquette = 0.0;
  std::vector<McRow> ref{{1.5, 0.3, 0.01}, {3.0, 0.1, 0.01}, {0.5, 0.9, 0.01}};
  const auto out = compare_mc(scan, ref);
  ASSERT_EQ(out.size(), 1u);
  EXPECT_DOUBLE_EQ(out[0].g2, 1.5);
  EXPECT_NEAR(out[0].variational, 0.25, 1e-15);
  EXPECT_NEAR(out[0].difference, out[0].variational - 0.3, 1e-15);
}

}  // namespace
}  // namespace snaq
