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

#ifndef SNAQ_CIRCUIT_HPP
#define SNAQ_CIRCUIT_HPP

#include <Eigen/Dense>
#include <array>
#include <map>
#include <random>
#include <stdexcept>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "snaq/qalgebra.hpp"
#include "snaq/spinnet.hpp"

namespace snaq {

enum class GateKind {
  Phase,                   // single-qudit diagonal phase
  ControlledUnitary,       // one control
  MultiControlledUnitary,  // generic n-controlled block
  FMove,                   // multi-controlled block of a full F-move
  FPrime,                  // multi-controlled block of the three-control F' move
  G,                       // two-qudit basis change diagonalizing F''_J
  Omega,                   // two-qudit diagonal phase in the G basis
};

std::string_view to_string(GateKind kind);
GateKind gate_kind_from_string(std::string_view name);

struct Control {
  int qudit = 0;
  int value = 0;  // twice-spin on register qudits, plain level on ancillas
  bool operator==(const Control&) const = default;
};

struct Gate {
  GateKind kind = GateKind::Phase;
  std::vector<int> targets;  // payload acts on targets, first target most significant
  std::vector<Control> controls;
  int payload = -1;                 // index into Circuit::payloads
  GateKind origin = GateKind::Phase;  // logical role this gate came from
  int op = -1;                      // index into Circuit::ops
  int ancilla = -1;                 // lane ancilla used by the lowering pass
};

// One logical operation of the Trotter structure (an F-move with all of its
// control blocks, a G, an Omega, or an electric layer).
struct LogicalOp {
  GateKind kind = GateKind::Phase;
  int plaquette = -1;
  int round = 0;
  int step = 0;
  std::vector<int> qudits;  // targets and controls
};

struct CircuitMetadata {
  int k = 1;
  double g2 = 1.0;
  double tau = 0.0;
  std::string lattice;
  int steps = 0;
  int trotter_order = 2;
  bool lowered = false;
};

struct Circuit {
  std::vector<int> dims;  // register qudits first, then ancillas
  int num_register = 0;
  std::vector<Gate> gates;
  std::vector<Eigen::MatrixXcd> payloads;
  std::vector<LogicalOp> ops;
  CircuitMetadata meta;

  int num_qudits() const { return static_cast<int>(dims.size()); }
  int num_ancillas() const { return num_qudits() - num_register; }
  // Stores a payload, reusing an identical earlier one.
  int add_payload(const Eigen::MatrixXcd& m);
  // Index bounds, payload shapes and unitarity (within tol).
  void validate(double tol = 1e-12) const;

 private:
  std::unordered_map<std::string, int> payload_lookup_;
};

// W(j', j) = F^{c0 c1 j'}_{c2 c3 j}: the F-move on the target qudit, mapping
// old label j to new label j'. Admissible inputs map through the orthogonal F
// block; the remaining labels are paired in ascending order so W stays a
// permutation outside the physical sector.
Eigen::MatrixXd fmove_unitary(SpinLabel c0, SpinLabel c1, SpinLabel c2, SpinLabel c3,
                              const FTable& table);

// Hexagon-local qudits: inner j1..j6 are 0..5, legs L12..L61 are 6..11.
struct FMoveSpec {
  int target = 0;
  std::array<int, 4> controls{};  // qudits supplying c0..c3
  int lane = 0;                   // ancilla lane used when lowered
  bool prime() const;             // three distinct controls
};

// The five moves in gate order: j6 and j3 (parallel), j5, j2, then j4 as F'.
// Afterwards the plaquette acts only on j1, controlled by j~4.
std::vector<FMoveSpec> plaquette_fmove_sequence();

// Vertex triples of the hexagon graph after the first `moves` moves.
std::vector<std::array<int, 3>> hexagon_graph_after(int moves);

class AsymmetricBlockError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct SpectralBlock {
  int J = 0;                // twice-spin
  std::vector<int> labels;  // admissible j1 (twice-spin), ascending
  Eigen::MatrixXd fpp;      // F''_J on labels
  Eigen::VectorXd omega;    // ascending eigenvalues
  Eigen::MatrixXd g;        // columns are eigenvectors
};

struct SpectralTable {
  int k = 0;
  std::vector<SpectralBlock> blocks;  // indexed by J

  // Two-qudit orthogonal matrix on (j1, J), j1 most significant. Column
  // (labels[s], J) is eigenvector s of F''_J; identity outside the blocks.
  Eigen::MatrixXd g_matrix() const;
  // Diagonal of exp(i theta omega) on (slot j1, J), ones outside the blocks.
  Eigen::VectorXcd omega_phases(double theta) const;
};

// Diagonalizes every F''_J(j', j) = F^{J j j}_{1/2 j' j'}. Throws
// AsymmetricBlockError when a block is not symmetric within 1e-12.
SpectralTable g_gate(const FTable& table);

// Qudit map of one plaquette: local index (0..11) to circuit qudit.
using PlaquetteQudits = std::array<int, 12>;

// Appends exp(i theta U) for one plaquette: F-circuit, G^T, Omega(theta), G,
// inverse F-circuit. Multi-controlled blocks record the plaquette's lane
// ancillas (register size + 2 * plaquette + lane) for later lowering.
void append_plaquette_exponential(Circuit& circuit, const PlaquetteQudits& q, double theta,
                                  const SpectralTable& spectral, const FTable& table,
                                  int plaquette, int round, int step);

// Hexagon register (12 qudits) carrying exp(i tau (2/g^2) U).
Circuit trotter_plaquette_step(double tau, double g2, const FTable& table);

struct LatticeSpec {
  enum class Kind { Hexagon, Torus } kind = Kind::Hexagon;
  std::array<SpinLabel, 6> outer{};  // hexagon only
  int lx = 2, ly = 2;                // torus only

  static LatticeSpec hexagon(const std::array<SpinLabel, 6>& outer);
  static LatticeSpec torus(int lx, int ly);
  // "hexagon" or "LxL".
  static LatticeSpec parse(std::string_view text);
  std::string str() const;
  SpinNetwork network() const;
};

struct TrotterOptions {
  int steps = 1;
  bool electric = true;
  bool magnetic = true;
};

// U_E(tau/2) U_B(tau) U_E(tau/2) per step, for H = (g^2/2) sum E^2 -
// (1/(2 g^2)) sum (U + U^T). Two ancillas per plaquette are allocated.
Circuit trotter_step_second_order(double tau, double g2, const FTable& table,
                                  const LatticeSpec& lattice,
                                  const TrotterOptions& options = {});

// n controlled increments on the ancilla, the ancilla-controlled payload,
// n decrements: 2n+1 gates. n = 0 returns the payload gate itself.
std::vector<Gate> expand_multicontrolled(const Gate& gate, Circuit& circuit, int ancilla);

// Lowers every gate with >= 2 controls using its lane ancilla.
Circuit lower_multicontrolled(const Circuit& circuit);

// Two-qudit gates after lowering; unlowered n-controlled blocks count 2n+1.
std::size_t entangling_cost(const Gate& gate);

struct LayerInventory {
  int electric = 0;
  int omega = 0;
  int g = 0;
  int fprime = 0;
  int f = 0;
};

struct ComplexityReport {
  int k = 0;
  int steps = 0;
  std::size_t total_entangling = 0;       // every gate in the circuit
  std::size_t depth_unit_entangling = 0;  // one step, one plaquette per round
  double bound = 0.0;                     // 4 + 28(k+1)^3 + 108(k+1)^4
  bool within_bound = false;
  LayerInventory inventory;  // layers per step in the depth unit
  std::size_t max_f_blocks = 0;
  std::size_t max_fprime_blocks = 0;
  std::map<std::string, std::size_t> gates_by_kind;
};

double complexity_bound(int k);
ComplexityReport gate_count(const Circuit& circuit);

struct SimulationOptions {
  std::size_t max_amplitudes = std::size_t{1} << 22;
  std::map<int, int> classical;  // qudit -> fixed computational value
};

// Exact state-vector simulation over the non-classical qudits (ascending
// index, first most significant). Classical qudits may only be controls or
// targets of gates that leave them unchanged.
Eigen::VectorXcd dense_simulate(const Circuit& circuit, const Eigen::VectorXcd& initial,
                                const SimulationOptions& options = {});
// Column-wise version.
Eigen::MatrixXcd dense_simulate(const Circuit& circuit, const Eigen::MatrixXcd& initial,
                                const SimulationOptions& options);

// ---------------------------------------------------------------------------
// Hexagon verification helpers

// Random outer labels whose hexagon block has dimension >= min_dim.
std::array<SpinLabel, 6> random_admissible_outer(Level level, std::mt19937_64& rng,
                                                 int min_dim = 2);

struct BlockUnitary {
  Eigen::MatrixXcd matrix;  // on the spin-network basis of the hexagon
  double leakage = 0.0;     // largest probability outside basis or ancilla |0>
};

// Circuit on a hexagon register restricted to the block of fixed outer labels.
BlockUnitary hexagon_block_unitary(const Circuit& circuit, const SNBasis& basis);

// exp(i theta M) for real symmetric M.
Eigen::MatrixXcd expi_symmetric(const Eigen::MatrixXd& m, double theta);

struct HexagonCheck {
  int dimension = 0;
  double max_abs_error = 0.0;
  double operator_norm_error = 0.0;
  double leakage = 0.0;
};

// F Omega(tau) F^dag against exp(i tau (2/g^2) U).
HexagonCheck hexagon_exactness(const std::array<SpinLabel, 6>& outer, double tau, double g2,
                               const FTable& table, bool lowered = false);

// One symmetric Trotter step against exp(-i tau H), H raw.
HexagonCheck hexagon_trotter_error(const std::array<SpinLabel, 6>& outer, double tau,
                                   double g2, const FTable& table,
                                   const TrotterOptions& options = {});

// max |T U T^T - (deltas x F''_{j~4})| over the support of the five-move
// basis change T.
double plaquette_conjugation_residual(const std::array<SpinLabel, 6>& outer,
                                      const FTable& table);

}  // namespace snaq

#endif  // SNAQ_CIRCUIT_HPP
