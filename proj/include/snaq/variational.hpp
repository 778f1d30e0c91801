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

#ifndef SNAQ_VARIATIONAL_HPP
#define SNAQ_VARIATIONAL_HPP

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "snaq/qalgebra.hpp"
#include "snaq/spinnet.hpp"

namespace snaq {

class NormalizationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Real amplitudes psi_j, j = 0..k/2, on the unit sphere.
class VariationalState {
 public:
  VariationalState(Level level, Eigen::VectorXd amplitudes);

  static VariationalState vacuum(Level level);
  // Rescales to unit norm.
  static VariationalState normalized(Level level, Eigen::VectorXd amplitudes);

  Level level() const { return level_; }
  const Eigen::VectorXd& amplitudes() const { return psi_; }
  double normalization_error() const { return std::abs(psi_.squaredNorm() - 1.0); }

 private:
  Level level_;
  Eigen::VectorXd psi_;
};

// E(psi) = 2 p^T W p - (2/g^4) psi^T A psi with p = psi^2,
// W_ab = sum_c c(c+1) d_c/(d_a d_b) delta_abc and A_ab = delta_{ab 1/2}.
struct EnergyModel {
  int k = 0;
  Eigen::MatrixXd electric;   // W
  Eigen::MatrixXd adjacency;  // A
};

EnergyModel build_energy_model(Level level);

// Energy density per plaquette in the H' convention. Throws NormalizationError
// when |psi|^2 deviates from 1 by more than 1e-12.
double mean_energy(const VariationalState& state, double g2);
double mean_energy(const EnergyModel& model, const Eigen::VectorXd& psi, double g2);

// <U> = psi^T A psi.
double mean_plaquette(const VariationalState& state);

// Ambient gradient of the closed form (no normalization constraint).
Eigen::VectorXd mean_energy_gradient(const EnergyModel& model,
                                     const Eigen::VectorXd& psi, double g2);

// Largest value of <U> on the sphere: the top eigenvalue of A, 2cos(pi/(k+2)).
double max_mean_plaquette(Level level);

struct BruteForceExpectation {
  double norm = 0.0;      // <psi|psi> of the constructed state
  double electric = 0.0;  // <sum_l E_l^2> / <psi|psi>
  double magnetic = 0.0;  // <sum_p U_p> / <psi|psi> over the chosen plaquettes
  double energy_density = 0.0;  // (electric - (2/g^4) magnetic) / N_plaquettes
};

// Builds prod_{p in plaquettes} (sum_j psi_j U_p^(j)) |0> explicitly on the
// network's spin-network basis and evaluates H' directly. An empty plaquette
// list means every plaquette.
BruteForceExpectation brute_force_expectation(const VariationalState& state,
                                              const SpinNetwork& network, double g2,
                                              const FTable& table,
                                              std::span<const int> plaquettes = {},
                                              std::size_t max_states = 200000);

// <H'>/N on a closed network, the direct oracle for mean_energy.
double brute_force_energy(const VariationalState& state, const SpinNetwork& network,
                          double g2, const FTable& table);

struct OptimizeOptions {
  int restarts = 8;
  std::uint64_t seed = 0;
  int max_iterations = 50000;
  double gradient_tolerance = 1e-9;  // relative to 1 + 2/g^4
  std::vector<Eigen::VectorXd> warm_starts;
  int threads = 1;
};

struct OptimizeResult {
  Eigen::VectorXd psi;
  double energy = 0.0;
  double plaquette = 0.0;
  double gradient_norm = 0.0;
  int iterations = 0;
  bool converged = false;
};

// Projected gradient descent with backtracking from one start.
OptimizeResult local_minimize(const EnergyModel& model, double g2,
                              const Eigen::VectorXd& start,
                              const OptimizeOptions& options = {});

// Best local minimum over warm starts and seeded uniform restarts.
OptimizeResult optimize(Level level, double g2, const OptimizeOptions& options = {});

struct ScanPoint {
  double g2 = 0.0;
  double energy = 0.0;
  double plaquette = 0.0;
  Eigen::VectorXd psi;
  bool converged = false;
};

struct PhaseScanResult {
  int k = 0;
  std::vector<ScanPoint> points;
  std::optional<double> critical_g2;
  double max_derivative = 0.0;
  std::pair<double, double> bracket{0.0, 0.0};
  int bisection_steps = 0;
  bool refined = false;
  // "crossing" (two-branch energy crossing), "instability" (the small-coupling
  // branch loses stability), "grid" (midpoint of the steepest interval) or
  // "none".
  std::string detection = "none";
};

struct ScanOptions {
  OptimizeOptions optimize;
  double derivative_threshold = 1e-3;
  double bracket_rel_width = 1e-7;
  int max_bisection_steps = 80;
};

// Logarithmic grid from lo to hi inclusive.
std::vector<double> log_grid(double lo, double hi, int points);

PhaseScanResult phase_scan(Level level, std::span<const double> grid,
                           const ScanOptions& options = {});

struct CriticalLawFit {
  double g0 = 0.0;
  double k0 = 0.0;
  double residual = 0.0;  // RMS of 1/g_c residuals
  std::vector<double> residuals;
};

// Least squares on 1/g_c = (k + k0)/g0.
CriticalLawFit fit_critical_law(std::span<const std::pair<int, double>> points);

struct McRow {
  double g2 = 0.0;
  double plaquette = 0.0;
  double error = 0.0;
};

// Reference CSV with columns (beta_or_g2, plaquette, error). A header whose
// first column is named beta converts beta to g^2 = 4/beta.
std::vector<McRow> read_mc_reference(const std::string& path);

struct McComparison {
  double g2 = 0.0;
  double reference = 0.0;
  double error = 0.0;
  double variational = 0.0;  // <U>/2, the half-trace normalization
  double difference = 0.0;
};

// Interpolates scan plaquettes linearly in g^2 at each reference point inside
// the scanned range.
std::vector<McComparison> compare_mc(std::span<const ScanPoint> scan,
                                     std::span<const McRow> reference);

}  // namespace snaq

#endif  // SNAQ_VARIATIONAL_HPP
