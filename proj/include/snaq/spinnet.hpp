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

#ifndef SNAQ_SPINNET_HPP
#define SNAQ_SPINNET_HPP

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "snaq/qalgebra.hpp"
#include "snaq/spin.hpp"

namespace snaq {

class MalformedNetworkError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class EmptyBasisError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DimensionCapError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class TruncationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Topology { SinglePlaquetteChain, HexagonFixedOuter, Torus };

struct Link {
  bool physical = true;
  std::optional<SpinLabel> fixed;  // boundary value, if any
};

// A hexagonal plaquette after point splitting. inner[i] are j1..j6 in
// counter-clockwise order; legs[i] is the outer link at the corner between
// inner[i] and inner[(i+1) % 6], i.e. L12, L23, ..., L61.
struct Plaquette {
  std::array<int, 6> inner{};
  std::array<int, 6> legs{};
  int sublattice = 0;  // checkerboard color used by the Trotter schedule
};

class SpinNetwork {
 public:
  SpinNetwork(Topology topology, std::vector<Link> links,
              std::vector<std::array<int, 3>> vertices,
              std::vector<Plaquette> plaquettes);

  // One hexagon with all outer legs fixed to 0: the single-plaquette chain.
  static SpinNetwork single_plaquette();
  // Hexagon with outer labels L12, L23, L34, L45, L56, L61 fixed. Inner links
  // 0..5, legs 6..11; j3, j6, L12 and L45 are auxiliary.
  static SpinNetwork hexagon(const std::array<SpinLabel, 6>& outer);
  // Point-split periodic square lattice, Lx, Ly >= 2. Links (h, v, a) per site.
  static SpinNetwork torus(int lx, int ly);

  Topology topology() const { return topology_; }
  int num_links() const { return static_cast<int>(links_.size()); }
  const std::vector<Link>& links() const { return links_; }
  const std::vector<std::array<int, 3>>& vertices() const { return vertices_; }
  const std::vector<Plaquette>& plaquettes() const { return plaquettes_; }
  std::vector<int> physical_links() const;

 private:
  void validate() const;

  Topology topology_;
  std::vector<Link> links_;
  std::vector<std::array<int, 3>> vertices_;
  std::vector<Plaquette> plaquettes_;
};

// Gauge-invariant basis: all admissible labelings, lexicographic in link id.
class SNBasis {
 public:
  SNBasis(const SpinNetwork& network, Level level,
          std::size_t max_states = std::size_t{1} << 22);

  const SpinNetwork& network() const { return network_; }
  Level level() const { return level_; }
  std::size_t size() const { return labels_.size() / stride_; }

  // Twice-spin label of every link in state i.
  std::span<const std::uint8_t> state(std::size_t i) const {
    return {labels_.data() + i * stride_, stride_};
  }
  std::optional<std::size_t> index_of(std::span<const std::uint8_t> labels) const;

 private:
  SpinNetwork network_;
  Level level_;
  std::size_t stride_;
  std::vector<std::uint8_t> labels_;
  std::unordered_map<std::string, std::size_t> index_;
};

SNBasis enumerate_basis(const SpinNetwork& network, Level level);

// Casimir j(j+1).
double electric_energy(SpinLabel j);

// Six-F product <inner'|U^(J)|inner> for one hexagon with outer legs.
double plaquette_element(std::span<const SpinLabel, 6> outer,
                         std::span<const SpinLabel, 6> inner,
                         std::span<const SpinLabel, 6> inner_new, SpinLabel J,
                         const FTable& table);

// U^(J) for plaquette p as a sparse matrix on the basis.
Eigen::SparseMatrix<double> plaquette_operator(const SNBasis& basis, int plaquette,
                                               SpinLabel J, const FTable& table);

// Diagonal sum of E(j) over physical links.
Eigen::VectorXd electric_diagonal(const SNBasis& basis);

enum class Convention { Raw, Rescaled };

struct HamiltonianMatrix {
  Eigen::SparseMatrix<double> matrix;
  double g2 = 0.0;
  int k = 0;
  Convention convention = Convention::Rescaled;
  double symmetry_residual = 0.0;

  Eigen::Index dimension() const { return matrix.rows(); }
  Eigen::MatrixXd dense() const { return Eigen::MatrixXd(matrix); }
};

// H = (g^2/2) sum E^2 - (1/(2 g^2)) sum (U + U^T), or H' = (2/g^2) H.
HamiltonianMatrix build_hamiltonian(const SNBasis& basis, double g2,
                                    Convention convention, const FTable& table);

// Direct tridiagonal build of the single-plaquette chain on j = 0..k/2.
HamiltonianMatrix single_plaquette_hamiltonian(Level level, double g2,
                                               Convention convention);

struct Spectrum {
  Eigen::VectorXd eigenvalues;   // ascending
  Eigen::MatrixXd eigenvectors;  // columns, first nonzero component positive
};

constexpr Eigen::Index kDefaultDimensionCap = 4096;

Spectrum diagonalize(const Eigen::MatrixXd& symmetric, int n_states,
                     Eigen::Index cap = kDefaultDimensionCap);
Spectrum diagonalize(const HamiltonianMatrix& h, int n_states,
                     Eigen::Index cap = kDefaultDimensionCap);

// <psi_n|j> for the k -> infinity chain truncated at j <= j_cut (dimension
// 2 j_cut + 1), H' convention. Throws TruncationError when the top tenth of
// the labels carries more than 1e-12 probability.
Eigen::VectorXd mathieu_oracle(double g2, int n, int j_cut);

}  // namespace snaq

#endif  // SNAQ_SPINNET_HPP
