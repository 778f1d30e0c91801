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

#include "snaq/spinnet.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

namespace snaq {

namespace {

std::array<int, 3> sorted3(std::array<int, 3> v) {
  std::sort(v.begin(), v.end());
  return v;
}

}  // namespace

// ---------------------------------------------------------------------------
// SpinNetwork

SpinNetwork::SpinNetwork(Topology topology, std::vector<Link> links,
                         std::vector<std::array<int, 3>> vertices,
                         std::vector<Plaquette> plaquettes)
    : topology_(topology),
      links_(std::move(links)),
      vertices_(std::move(vertices)),
      plaquettes_(std::move(plaquettes)) {
  validate();
}

void SpinNetwork::validate() const {
  const int n = num_links();
  std::vector<int> degree(n, 0);
  for (const auto& v : vertices_) {
    for (int l : v) {
      if (l < 0 || l >= n) throw MalformedNetworkError("vertex references unknown link");
      ++degree[l];
    }
  }
  for (int l = 0; l < n; ++l) {
    const int want = links_[l].fixed ? 1 : 2;
    if (degree[l] != want) {
      throw MalformedNetworkError("link " + std::to_string(l) + " appears in " +
                                  std::to_string(degree[l]) + " vertices, expected " +
                                  std::to_string(want));
    }
  }
  std::vector<std::array<int, 3>> keys;
  for (const auto& v : vertices_) keys.push_back(sorted3(v));
  std::sort(keys.begin(), keys.end());
  for (const auto& p : plaquettes_) {
    for (int i = 0; i < 6; ++i) {
      const auto corner = sorted3({p.inner[i], p.inner[(i + 1) % 6], p.legs[i]});
      if (!std::binary_search(keys.begin(), keys.end(), corner)) {
        throw MalformedNetworkError("plaquette corner is not a vertex");
      }
    }
  }
}

std::vector<int> SpinNetwork::physical_links() const {
  std::vector<int> out;
  for (int l = 0; l < num_links(); ++l) {
    if (links_[l].physical) out.push_back(l);
  }
  return out;
}

SpinNetwork SpinNetwork::hexagon(const std::array<SpinLabel, 6>& outer) {
  std::vector<Link> links(12);
  // Point-split auxiliary links: j3, j6 inside, L12 and L45 outside.
  for (int l : {2, 5, 6, 9}) links[l].physical = false;
  Plaquette p;
  std::vector<std::array<int, 3>> vertices;
  for (int i = 0; i < 6; ++i) {
    links[6 + i].fixed = outer[i];
    p.inner[i] = i;
    p.legs[i] = 6 + i;
    vertices.push_back({i, (i + 1) % 6, 6 + i});
  }
  return SpinNetwork(Topology::HexagonFixedOuter, std::move(links),
                     std::move(vertices), {p});
}

SpinNetwork SpinNetwork::single_plaquette() {
  SpinNetwork net = hexagon({kSpin0, kSpin0, kSpin0, kSpin0, kSpin0, kSpin0});
  net.topology_ = Topology::SinglePlaquetteChain;
  return net;
}

SpinNetwork SpinNetwork::torus(int lx, int ly) {
  if (lx < 2 || ly < 2) throw MalformedNetworkError("torus needs Lx, Ly >= 2");
  // Site (x, y) owns horizontal h, vertical v and auxiliary a links. Vertex
  // A(x,y) joins v(x,y), h(x,y), a(x,y); vertex B(x,y) joins v(x,y-1),
  // h(x-1,y), a(x,y).
  auto id = [lx, ly](int type, int x, int y) {
    x = ((x % lx) + lx) % lx;
    y = ((y % ly) + ly) % ly;
    return 3 * (x * ly + y) + type;
  };
  enum { H = 0, V = 1, A = 2 };
  std::vector<Link> links(3 * lx * ly);
  std::vector<std::array<int, 3>> vertices;
  std::vector<Plaquette> plaquettes;
  for (int x = 0; x < lx; ++x) {
    for (int y = 0; y < ly; ++y) {
      links[id(A, x, y)].physical = false;
      vertices.push_back({id(V, x, y), id(H, x, y), id(A, x, y)});
      vertices.push_back({id(V, x, y - 1), id(H, x - 1, y), id(A, x, y)});
      Plaquette p;
      p.inner = {id(V, x, y),     id(H, x, y),     id(A, x + 1, y),
                 id(V, x + 1, y), id(H, x, y + 1), id(A, x, y + 1)};
      p.legs = {id(A, x, y),         id(V, x + 1, y - 1), id(H, x + 1, y),
                id(A, x + 1, y + 1), id(V, x, y + 1),     id(H, x - 1, y + 1)};
      p.sublattice = (x + y) % 2;
      plaquettes.push_back(p);
    }
  }
  return SpinNetwork(Topology::Torus, std::move(links), std::move(vertices),
                     std::move(plaquettes));
}

// ---------------------------------------------------------------------------
// SNBasis

SNBasis::SNBasis(const SpinNetwork& network, Level level, std::size_t max_states)
    : network_(network), level_(level), stride_(network.num_links()) {
  const int n = network.num_links();
  const int k = level.k();
  for (const auto& link : network.links()) {
    if (link.fixed && !level.contains(*link.fixed)) {
      throw std::out_of_range("boundary label out of range for level");
    }
  }
  // A vertex is checked when its highest link id gets assigned.
  std::vector<std::vector<std::array<int, 3>>> closing(n);
  for (const auto& v : network.vertices()) {
    closing[*std::max_element(v.begin(), v.end())].push_back(v);
  }
  std::vector<std::uint8_t> cur(n, 0);
  std::function<void(int)> rec = [&](int l) {
    if (l == n) {
      if (size() >= max_states) {
        throw DimensionCapError("basis exceeds " + std::to_string(max_states) + " states");
      }
      labels_.insert(labels_.end(), cur.begin(), cur.end());
      return;
    }
    const auto& link = network.links()[l];
    const int lo = link.fixed ? link.fixed->twice() : 0;
    const int hi = link.fixed ? link.fixed->twice() : k;
    for (int t = lo; t <= hi; ++t) {
      cur[l] = static_cast<std::uint8_t>(t);
      bool ok = true;
      for (const auto& v : closing[l]) {
        if (!is_admissible(SpinLabel(cur[v[0]]), SpinLabel(cur[v[1]]),
                           SpinLabel(cur[v[2]]), level)) {
          ok = false;
          break;
        }
      }
      if (ok) rec(l + 1);
    }
  };
  rec(0);
  if (labels_.empty()) {
    throw EmptyBasisError("no admissible labeling satisfies the boundary conditions");
  }
  for (std::size_t i = 0; i < size(); ++i) {
    auto s = state(i);
    index_.emplace(std::string(s.begin(), s.end()), i);
  }
}

std::optional<std::size_t> SNBasis::index_of(std::span<const std::uint8_t> labels) const {
  auto it = index_.find(std::string(labels.begin(), labels.end()));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

SNBasis enumerate_basis(const SpinNetwork& network, Level level) {
  return SNBasis(network, level);
}

// ---------------------------------------------------------------------------
// Operators

double electric_energy(SpinLabel j) { return j.value() * (j.value() + 1.0); }

double plaquette_element(std::span<const SpinLabel, 6> outer,
                         std::span<const SpinLabel, 6> inner,
                         std::span<const SpinLabel, 6> inner_new, SpinLabel J,
                         const FTable& table) {
  const Level level = table.level();
  level.require(J);
  double v = 1.0;
  for (int i = 0; i < 6; ++i) {
    const int b = (i + 1) % 6;
    for (SpinLabel x : {outer[i], inner[i], inner_new[i]}) level.require(x);
    v *= table(outer[i], inner[i], inner[b], J, inner_new[b], inner_new[i]);
    if (v == 0.0) return 0.0;
  }
  return v;
}

Eigen::SparseMatrix<double> plaquette_operator(const SNBasis& basis, int plaquette,
                                               SpinLabel J, const FTable& table) {
  const SpinNetwork& net = basis.network();
  const Plaquette& p = net.plaquettes().at(plaquette);
  const int k = basis.level().k();
  const int tJ = J.twice();
  basis.level().require(J);
  std::vector<Eigen::Triplet<double>> trip;
  std::vector<std::uint8_t> next;
  for (std::size_t col = 0; col < basis.size(); ++col) {
    const auto s = basis.state(col);
    std::array<int, 6> j{}, leg{}, jn{};
    for (int i = 0; i < 6; ++i) {
      j[i] = s[p.inner[i]];
      leg[i] = s[p.legs[i]];
    }
    // Depth-first over new inner labels, multiplying corner factors as soon
    // as both of a corner's new labels are known.
    std::function<void(int, double)> rec = [&](int i, double acc) {
      if (i == 6) {
        const double last = table.get(leg[5], j[5], j[0], tJ, jn[0], jn[5]);
        if (last == 0.0) return;
        next.assign(s.begin(), s.end());
        for (int m = 0; m < 6; ++m) next[p.inner[m]] = static_cast<std::uint8_t>(jn[m]);
        const auto row = basis.index_of(next);
        if (!row) throw std::logic_error("plaquette operator left the basis");
        trip.emplace_back(static_cast<int>(*row), static_cast<int>(col), acc * last);
        return;
      }
      const auto& link = net.links()[p.inner[i]];
      for (int t = std::abs(j[i] - tJ); t <= std::min(j[i] + tJ, k); t += 2) {
        if (link.fixed && link.fixed->twice() != t) continue;
        if (!table.admissible(tJ, j[i], t)) continue;
        jn[i] = t;
        double f = acc;
        if (i > 0) {
          f *= table.get(leg[i - 1], j[i - 1], j[i], tJ, jn[i], jn[i - 1]);
          if (f == 0.0) continue;
        }
        rec(i + 1, f);
      }
    };
    rec(0, 1.0);
  }
  Eigen::SparseMatrix<double> m(basis.size(), basis.size());
  m.setFromTriplets(trip.begin(), trip.end());
  return m;
}

Eigen::VectorXd electric_diagonal(const SNBasis& basis) {
  const auto phys = basis.network().physical_links();
  Eigen::VectorXd d(basis.size());
  for (std::size_t i = 0; i < basis.size(); ++i) {
    const auto s = basis.state(i);
    double e = 0.0;
    for (int l : phys) e += electric_energy(SpinLabel(s[l]));
    d(i) = e;
  }
  return d;
}

namespace {

void require_coupling(double g2) {
  if (!(g2 > 0.0) || !std::isfinite(g2)) {
    throw std::invalid_argument("coupling g^2 must be positive and finite");
  }
}

double symmetry_residual(const Eigen::SparseMatrix<double>& m) {
  Eigen::SparseMatrix<double> t = m.transpose();
  Eigen::SparseMatrix<double> d = m - t;
  double r = 0.0;
  for (int c = 0; c < d.outerSize(); ++c)
    for (Eigen::SparseMatrix<double>::InnerIterator it(d, c); it; ++it)
      r = std::max(r, std::abs(it.value()));
  return r;
}

}  // namespace

HamiltonianMatrix build_hamiltonian(const SNBasis& basis, double g2,
                                    Convention convention, const FTable& table) {
  require_coupling(g2);
  if (!(table.level() == basis.level())) {
    throw std::invalid_argument("FTable level does not match the basis");
  }
  // Rescaled H' = sum E^2 - (1/g^4) sum (U + U^T); raw H = (g^2/2) H'.
  const Eigen::Index n = static_cast<Eigen::Index>(basis.size());
  Eigen::SparseMatrix<double> u(n, n);
  for (int p = 0; p < static_cast<int>(basis.network().plaquettes().size()); ++p) {
    u += plaquette_operator(basis, p, kSpinHalf, table);
  }
  Eigen::SparseMatrix<double> ut = u.transpose();
  Eigen::SparseMatrix<double> h = (-1.0 / (g2 * g2)) * (u + ut);
  const Eigen::VectorXd e = electric_diagonal(basis);
  Eigen::SparseMatrix<double> diag(n, n);
  std::vector<Eigen::Triplet<double>> trip;
  for (Eigen::Index i = 0; i < n; ++i) trip.emplace_back(i, i, e(i));
  diag.setFromTriplets(trip.begin(), trip.end());
  h += diag;
  if (convention == Convention::Raw) h *= g2 / 2.0;
  h.prune(0.0);
  HamiltonianMatrix out;
  out.matrix = std::move(h);
  out.g2 = g2;
  out.k = basis.level().k();
  out.convention = convention;
  out.symmetry_residual = symmetry_residual(out.matrix);
  return out;
}

HamiltonianMatrix single_plaquette_hamiltonian(Level level, double g2,
                                               Convention convention) {
  require_coupling(g2);
  const int n = level.k() + 1;
  const double scale = convention == Convention::Raw ? g2 / 2.0 : 1.0;
  std::vector<Eigen::Triplet<double>> trip;
  for (int t = 0; t < n; ++t) {
    trip.emplace_back(t, t, scale * 4.0 * electric_energy(SpinLabel(t)));
    if (t + 1 < n) {
      trip.emplace_back(t, t + 1, scale * -2.0 / (g2 * g2));
      trip.emplace_back(t + 1, t, scale * -2.0 / (g2 * g2));
    }
  }
  HamiltonianMatrix out;
  out.matrix.resize(n, n);
  out.matrix.setFromTriplets(trip.begin(), trip.end());
  out.g2 = g2;
  out.k = level.k();
  out.convention = convention;
  out.symmetry_residual = symmetry_residual(out.matrix);
  return out;
}

Spectrum diagonalize(const Eigen::MatrixXd& symmetric, int n_states, Eigen::Index cap) {
  const Eigen::Index n = symmetric.rows();
  if (n > cap) {
    throw DimensionCapError("dimension " + std::to_string(n) + " exceeds cap " +
                            std::to_string(cap));
  }
  if (n_states < 1 || n_states > n) {
    throw std::invalid_argument("n_states must lie in [1, dimension]");
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(symmetric);
  if (es.info() != Eigen::Success) throw std::runtime_error("eigensolver failed");
  Spectrum out;
  out.eigenvalues = es.eigenvalues().head(n_states);
  out.eigenvectors = es.eigenvectors().leftCols(n_states);
  for (int c = 0; c < n_states; ++c) {
    auto v = out.eigenvectors.col(c);
    for (Eigen::Index i = 0; i < n; ++i) {
      if (std::abs(v(i)) > 1e-14) {
        if (v(i) < 0) v = -v;
        break;
      }
    }
  }
  return out;
}

Spectrum diagonalize(const HamiltonianMatrix& h, int n_states, Eigen::Index cap) {
  if (h.dimension() > cap) {
    throw DimensionCapError("dimension " + std::to_string(h.dimension()) +
                            " exceeds cap " + std::to_string(cap));
  }
  return diagonalize(h.dense(), n_states, cap);
}

Eigen::VectorXd mathieu_oracle(double g2, int n, int j_cut) {
  require_coupling(g2);
  if (j_cut < 1) throw std::invalid_argument("j_cut must be >= 1");
  const Level level(2 * j_cut);
  const Eigen::Index dim = level.num_labels();
  if (n < 0 || n >= dim) throw std::invalid_argument("state index out of range");
  const HamiltonianMatrix h = single_plaquette_hamiltonian(level, g2, Convention::Rescaled);
  const Spectrum s = diagonalize(h.dense(), n + 1, dim);
  Eigen::VectorXd v = s.eigenvectors.col(n);
  const Eigen::Index tail = std::max<Eigen::Index>(1, dim / 10);
  const double mass = v.tail(tail).squaredNorm();
  if (mass > 1e-12) {
    throw TruncationError("tail probability " + std::to_string(mass) +
                          " exceeds 1e-12; increase j_cut");
  }
  return v;
}

}  // namespace snaq
