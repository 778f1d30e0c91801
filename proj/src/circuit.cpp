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

#include "snaq/circuit.hpp"

#include <Eigen/SVD>
#include <algorithm>
#include <charconv>
#include <cmath>
#include <complex>
#include <cstring>
#include <functional>
#include <set>

namespace snaq {

using cd = std::complex<double>;

namespace {

constexpr int kAncillaDim = 5;  // four controls + 1

const std::array<std::pair<GateKind, std::string_view>, 7> kKindNames{{
    {GateKind::Phase, "phase"},
    {GateKind::ControlledUnitary, "controlled_unitary"},
    {GateKind::MultiControlledUnitary, "multi_controlled_unitary"},
    {GateKind::FMove, "f_move"},
    {GateKind::FPrime, "f_prime"},
    {GateKind::G, "g"},
    {GateKind::Omega, "omega"},
}};

std::array<int, 3> sorted3(std::array<int, 3> v) {
  std::sort(v.begin(), v.end());
  return v;
}

}  // namespace

std::string_view to_string(GateKind kind) {
  for (const auto& [k, name] : kKindNames) {
    if (k == kind) return name;
  }
  throw std::logic_error("unknown gate kind");
}

GateKind gate_kind_from_string(std::string_view name) {
  for (const auto& [k, n] : kKindNames) {
    if (n == name) return k;
  }
  throw std::invalid_argument("unknown gate kind '" + std::string(name) + "'");
}

// ---------------------------------------------------------------------------
// Circuit container

int Circuit::add_payload(const Eigen::MatrixXcd& m) {
  std::string key(sizeof(Eigen::Index) * 2 + sizeof(cd) * m.size(), '\0');
  const Eigen::Index shape[2] = {m.rows(), m.cols()};
  std::memcpy(key.data(), shape, sizeof(shape));
  std::memcpy(key.data() + sizeof(shape), m.data(), sizeof(cd) * m.size());
  auto [it, inserted] = payload_lookup_.try_emplace(key, static_cast<int>(payloads.size()));
  if (inserted) payloads.push_back(m);
  return it->second;
}

void Circuit::validate(double tol) const {
  const int n = num_qudits();
  std::vector<char> checked(payloads.size(), 0);
  for (std::size_t gi = 0; gi < gates.size(); ++gi) {
    const Gate& g = gates[gi];
    const std::string where = "gate " + std::to_string(gi) + ": ";
    std::set<int> used;
    Eigen::Index dim = 1;
    for (int t : g.targets) {
      if (t < 0 || t >= n) throw std::out_of_range(where + "target out of range");
      if (!used.insert(t).second) throw std::invalid_argument(where + "repeated qudit");
      dim *= dims[t];
    }
    for (const auto& c : g.controls) {
      if (c.qudit < 0 || c.qudit >= n) throw std::out_of_range(where + "control out of range");
      if (!used.insert(c.qudit).second) throw std::invalid_argument(where + "repeated qudit");
      if (c.value < 0 || c.value >= dims[c.qudit])
        throw std::out_of_range(where + "control value out of range");
    }
    if (g.payload < 0 || g.payload >= static_cast<int>(payloads.size()))
      throw std::out_of_range(where + "missing payload");
    const auto& p = payloads[g.payload];
    if (p.rows() != dim || p.cols() != dim)
      throw std::invalid_argument(where + "payload shape does not match targets");
    if (!checked[g.payload]) {
      const double err =
          (p.adjoint() * p - Eigen::MatrixXcd::Identity(dim, dim)).cwiseAbs().maxCoeff();
      if (err > tol) throw std::invalid_argument(where + "payload is not unitary");
      checked[g.payload] = 1;
    }
  }
}

// ---------------------------------------------------------------------------
// F-moves and the plaquette sequence

Eigen::MatrixXd fmove_unitary(SpinLabel c0, SpinLabel c1, SpinLabel c2, SpinLabel c3,
                              const FTable& table) {
  const Level level = table.level();
  for (SpinLabel c : {c0, c1, c2, c3}) level.require(c);
  const int n = level.num_labels();
  const int a = c0.twice(), b = c1.twice(), c = c2.twice(), d = c3.twice();
  std::vector<int> in, out, in_rest, out_rest;
  for (int j = 0; j < n; ++j) {
    (table.admissible(a, d, j) && table.admissible(c, b, j) ? in : in_rest).push_back(j);
    (table.admissible(a, b, j) && table.admissible(c, d, j) ? out : out_rest).push_back(j);
  }
  if (in.size() != out.size()) {
    throw std::logic_error("F-move block is not square");
  }
  Eigen::MatrixXd w = Eigen::MatrixXd::Zero(n, n);
  for (int jn : out)
    for (int j : in) w(jn, j) = table.get(a, b, jn, c, d, j);
  for (std::size_t i = 0; i < in_rest.size(); ++i) w(out_rest[i], in_rest[i]) = 1.0;
  return w;
}

bool FMoveSpec::prime() const {
  return std::set<int>(controls.begin(), controls.end()).size() == 3;
}

std::vector<FMoveSpec> plaquette_fmove_sequence() {
  return {
      {5, {10, 11, 0, 4}, 0},  // j6: F^{L56 L61 .}_{j1 j5 .}
      {2, {7, 8, 3, 1}, 1},    // j3: F^{L23 L34 .}_{j4 j2 .}
      {4, {9, 5, 0, 3}, 0},    // j5: F^{L45 j~6 .}_{j1 j4 .}
      {1, {6, 2, 3, 0}, 1},    // j2: F^{L12 j~3 .}_{j4 j1 .}
      {3, {1, 4, 0, 0}, 0},    // j4: F^{j~2 j~5 .}_{j1 j1 .}
  };
}

std::vector<std::array<int, 3>> hexagon_graph_after(int moves) {
  std::multiset<std::array<int, 3>> graph;
  for (int i = 0; i < 6; ++i) graph.insert(sorted3({i, (i + 1) % 6, 6 + i}));
  const auto seq = plaquette_fmove_sequence();
  if (moves < 0 || moves > static_cast<int>(seq.size()))
    throw std::out_of_range("move count out of range");
  for (int m = 0; m < moves; ++m) {
    const auto& s = seq[m];
    const auto [c0, c1, c2, c3] = s.controls;
    for (auto old : {sorted3({c0, c3, s.target}), sorted3({c2, c1, s.target})}) {
      auto it = graph.find(old);
      if (it == graph.end()) throw std::logic_error("F-move acts on a missing vertex");
      graph.erase(it);
    }
    graph.insert(sorted3({c0, c1, s.target}));
    graph.insert(sorted3({c2, c3, s.target}));
  }
  return {graph.begin(), graph.end()};
}

// ---------------------------------------------------------------------------
// G gate

SpectralTable g_gate(const FTable& table) {
  const int n = table.level().num_labels();
  SpectralTable st;
  st.k = table.level().k();
  for (int J = 0; J < n; ++J) {
    SpectralBlock b;
    b.J = J;
    for (int j = 0; j < n; ++j) {
      if (table.admissible(J, j, j)) b.labels.push_back(j);
    }
    const int m = static_cast<int>(b.labels.size());
    b.fpp.resize(m, m);
    for (int r = 0; r < m; ++r)
      for (int c = 0; c < m; ++c)
        b.fpp(r, c) = table.get(J, b.labels[c], b.labels[c], 1, b.labels[r], b.labels[r]);
    const double asym = m ? (b.fpp - b.fpp.transpose()).cwiseAbs().maxCoeff() : 0.0;
    if (asym > 1e-12) {
      throw AsymmetricBlockError("F''_J is not symmetric for 2J=" + std::to_string(J) +
                                 " at k=" + std::to_string(st.k));
    }
    if (m > 0) {
      const Spectrum s = diagonalize(b.fpp, m, m);
      b.omega = s.eigenvalues;
      b.g = s.eigenvectors;
    }
    st.blocks.push_back(std::move(b));
  }
  return st;
}

Eigen::MatrixXd SpectralTable::g_matrix() const {
  const int n = k + 1;
  Eigen::MatrixXd g = Eigen::MatrixXd::Identity(n * n, n * n);
  for (const auto& b : blocks) {
    const int m = static_cast<int>(b.labels.size());
    for (int r = 0; r < m; ++r)
      for (int s = 0; s < m; ++s)
        g(b.labels[r] * n + b.J, b.labels[s] * n + b.J) = b.g(r, s);
  }
  return g;
}

Eigen::VectorXcd SpectralTable::omega_phases(double theta) const {
  const int n = k + 1;
  Eigen::VectorXcd d = Eigen::VectorXcd::Ones(n * n);
  for (const auto& b : blocks) {
    for (std::size_t s = 0; s < b.labels.size(); ++s) {
      d(b.labels[s] * n + b.J) = std::exp(cd(0.0, theta * b.omega(s)));
    }
  }
  return d;
}

// ---------------------------------------------------------------------------
// Compilation

namespace {

int new_op(Circuit& c, GateKind kind, int plaquette, int round, int step,
           std::vector<int> qudits) {
  std::sort(qudits.begin(), qudits.end());
  qudits.erase(std::unique(qudits.begin(), qudits.end()), qudits.end());
  c.ops.push_back({kind, plaquette, round, step, std::move(qudits)});
  return static_cast<int>(c.ops.size()) - 1;
}

void append_move(Circuit& circuit, const PlaquetteQudits& q, const FMoveSpec& spec,
                 bool inverse, const FTable& table, int plaquette, int round, int step) {
  const int n = table.level().num_labels();
  const GateKind kind = spec.prime() ? GateKind::FPrime : GateKind::FMove;
  std::vector<int> distinct;  // local ids of the control qudits
  for (int c : spec.controls) {
    if (std::find(distinct.begin(), distinct.end(), c) == distinct.end()) distinct.push_back(c);
  }
  std::vector<int> qudits{q[spec.target]};
  for (int c : distinct) qudits.push_back(q[c]);
  const int op = new_op(circuit, kind, plaquette, round, step, qudits);
  const int ancilla = circuit.num_register + 2 * plaquette + spec.lane;
  std::vector<int> val(distinct.size(), 0);
  auto value_of = [&](int local) {
    return val[std::find(distinct.begin(), distinct.end(), local) - distinct.begin()];
  };
  const Eigen::MatrixXd eye = Eigen::MatrixXd::Identity(n, n);
  while (true) {
    Eigen::MatrixXd w =
        fmove_unitary(SpinLabel(value_of(spec.controls[0])), SpinLabel(value_of(spec.controls[1])),
                      SpinLabel(value_of(spec.controls[2])), SpinLabel(value_of(spec.controls[3])),
                      table);
    if (inverse) w.transposeInPlace();
    if (w != eye) {
      Gate g;
      g.kind = kind;
      g.origin = kind;
      g.targets = {q[spec.target]};
      for (std::size_t i = 0; i < distinct.size(); ++i)
        g.controls.push_back({q[distinct[i]], val[i]});
      g.payload = circuit.add_payload(w.cast<cd>());
      g.op = op;
      g.ancilla = ancilla;
      circuit.gates.push_back(std::move(g));
    }
    std::size_t i = 0;
    while (i < val.size() && ++val[i] == n) val[i++] = 0;
    if (i == val.size()) break;
  }
}

void append_two_qudit(Circuit& circuit, const PlaquetteQudits& q, GateKind kind,
                      const Eigen::MatrixXcd& payload, int plaquette, int round, int step) {
  Gate g;
  g.kind = kind;
  g.origin = kind;
  g.targets = {q[0], q[3]};
  g.payload = circuit.add_payload(payload);
  g.op = new_op(circuit, kind, plaquette, round, step, g.targets);
  circuit.gates.push_back(std::move(g));
}

void append_electric(Circuit& circuit, const std::vector<int>& physical, double tau,
                     double g2, int n, int step) {
  Eigen::MatrixXcd d = Eigen::MatrixXcd::Zero(n, n);
  for (int t = 0; t < n; ++t) {
    d(t, t) = std::exp(cd(0.0, -tau * (g2 / 2.0) * electric_energy(SpinLabel(t))));
  }
  const int payload = circuit.add_payload(d);
  const int op = new_op(circuit, GateKind::Phase, -1, 0, step, physical);
  for (int l : physical) {
    Gate g;
    g.kind = GateKind::Phase;
    g.origin = GateKind::Phase;
    g.targets = {l};
    g.payload = payload;
    g.op = op;
    circuit.gates.push_back(std::move(g));
  }
}

Circuit empty_circuit(int register_qudits, int plaquettes, int k) {
  Circuit c;
  c.num_register = register_qudits;
  c.dims.assign(register_qudits, k + 1);
  c.dims.insert(c.dims.end(), 2 * plaquettes, kAncillaDim);
  c.meta.k = k;
  return c;
}

PlaquetteQudits hexagon_qudits() {
  PlaquetteQudits q{};
  for (int i = 0; i < 12; ++i) q[i] = i;
  return q;
}

}  // namespace

void append_plaquette_exponential(Circuit& circuit, const PlaquetteQudits& q, double theta,
                                  const SpectralTable& spectral, const FTable& table,
                                  int plaquette, int round, int step) {
  const auto seq = plaquette_fmove_sequence();
  for (const auto& m : seq) append_move(circuit, q, m, false, table, plaquette, round, step);
  const Eigen::MatrixXd g = spectral.g_matrix();
  append_two_qudit(circuit, q, GateKind::G, g.transpose().cast<cd>(), plaquette, round, step);
  append_two_qudit(circuit, q, GateKind::Omega, spectral.omega_phases(theta).asDiagonal(),
                   plaquette, round, step);
  append_two_qudit(circuit, q, GateKind::G, g.cast<cd>(), plaquette, round, step);
  for (auto it = seq.rbegin(); it != seq.rend(); ++it)
    append_move(circuit, q, *it, true, table, plaquette, round, step);
}

Circuit trotter_plaquette_step(double tau, double g2, const FTable& table) {
  if (!(g2 > 0.0)) throw std::invalid_argument("coupling g^2 must be positive");
  const int k = table.level().k();
  Circuit c = empty_circuit(12, 1, k);
  append_plaquette_exponential(c, hexagon_qudits(), 2.0 * tau / g2, g_gate(table), table, 0,
                               0, 0);
  c.meta = {k, g2, tau, "hexagon", 1, 0, false};
  return c;
}

LatticeSpec LatticeSpec::hexagon(const std::array<SpinLabel, 6>& outer) {
  LatticeSpec s;
  s.kind = Kind::Hexagon;
  s.outer = outer;
  return s;
}

LatticeSpec LatticeSpec::torus(int lx, int ly) {
  LatticeSpec s;
  s.kind = Kind::Torus;
  s.lx = lx;
  s.ly = ly;
  return s;
}

LatticeSpec LatticeSpec::parse(std::string_view text) {
  if (text == "hexagon") return hexagon({});
  const auto x = text.find('x');
  int lx = 0, ly = 0;
  if (x != std::string_view::npos) {
    auto r1 = std::from_chars(text.data(), text.data() + x, lx);
    auto r2 = std::from_chars(text.data() + x + 1, text.data() + text.size(), ly);
    if (r1.ec == std::errc() && r1.ptr == text.data() + x && r2.ec == std::errc() &&
        r2.ptr == text.data() + text.size() && lx >= 2 && ly >= 2) {
      return torus(lx, ly);
    }
  }
  throw std::invalid_argument("unsupported lattice '" + std::string(text) +
                              "' (expected 'hexagon' or LxL with L >= 2)");
}

std::string LatticeSpec::str() const {
  return kind == Kind::Hexagon ? "hexagon" : std::to_string(lx) + "x" + std::to_string(ly);
}

SpinNetwork LatticeSpec::network() const {
  return kind == Kind::Hexagon ? SpinNetwork::hexagon(outer) : SpinNetwork::torus(lx, ly);
}

Circuit trotter_step_second_order(double tau, double g2, const FTable& table,
                                  const LatticeSpec& lattice, const TrotterOptions& options) {
  if (!(g2 > 0.0)) throw std::invalid_argument("coupling g^2 must be positive");
  if (options.steps < 1) throw std::invalid_argument("steps must be >= 1");
  const int k = table.level().k();
  const SpinNetwork net = lattice.network();
  const int np = static_cast<int>(net.plaquettes().size());
  Circuit c = empty_circuit(net.num_links(), np, k);
  const auto physical = net.physical_links();
  const SpectralTable spectral = g_gate(table);
  for (int step = 0; step < options.steps; ++step) {
    if (options.electric) append_electric(c, physical, tau / 2.0, g2, k + 1, step);
    if (options.magnetic) {
      for (int round = 0; round < 2; ++round) {
        for (int p = 0; p < np; ++p) {
          const Plaquette& pl = net.plaquettes()[p];
          if (pl.sublattice != round) continue;
          PlaquetteQudits q{};
          for (int i = 0; i < 6; ++i) {
            q[i] = pl.inner[i];
            q[6 + i] = pl.legs[i];
          }
          append_plaquette_exponential(c, q, tau / g2, spectral, table, p, round, step);
        }
      }
    }
    if (options.electric) append_electric(c, physical, tau / 2.0, g2, k + 1, step);
  }
  c.meta = {k, g2, tau, lattice.str(), options.steps, 2, false};
  return c;
}

// ---------------------------------------------------------------------------
// Lowering and counting

std::vector<Gate> expand_multicontrolled(const Gate& gate, Circuit& circuit, int ancilla) {
  const int n = static_cast<int>(gate.controls.size());
  if (n == 0) return {gate};
  if (ancilla < 0 || ancilla >= circuit.num_qudits())
    throw std::out_of_range("ancilla qudit out of range");
  const int d = circuit.dims[ancilla];
  if (d < n + 1) {
    throw std::invalid_argument("ancilla dimension " + std::to_string(d) + " < " +
                                std::to_string(n + 1) + " required for " + std::to_string(n) +
                                " controls");
  }
  Eigen::MatrixXcd inc = Eigen::MatrixXcd::Zero(d, d);
  for (int a = 0; a < d; ++a) inc((a + 1) % d, a) = 1.0;
  const int up = circuit.add_payload(inc);
  const int down = circuit.add_payload(inc.adjoint());
  auto shift = [&](const Control& c, int payload) {
    Gate g;
    g.kind = GateKind::ControlledUnitary;
    g.origin = gate.origin;
    g.op = gate.op;
    g.targets = {ancilla};
    g.controls = {c};
    g.payload = payload;
    return g;
  };
  std::vector<Gate> out;
  for (const auto& c : gate.controls) out.push_back(shift(c, up));
  Gate core = gate;
  core.kind = GateKind::ControlledUnitary;
  core.controls = {{ancilla, n}};
  core.ancilla = -1;
  out.push_back(core);
  for (auto it = gate.controls.rbegin(); it != gate.controls.rend(); ++it)
    out.push_back(shift(*it, down));
  return out;
}

Circuit lower_multicontrolled(const Circuit& circuit) {
  Circuit out = circuit;
  out.gates.clear();
  for (const Gate& g : circuit.gates) {
    if (g.controls.size() < 2) {
      out.gates.push_back(g);
      continue;
    }
    for (auto& e : expand_multicontrolled(g, out, g.ancilla)) out.gates.push_back(std::move(e));
  }
  out.meta.lowered = true;
  return out;
}

std::size_t entangling_cost(const Gate& gate) {
  const std::size_t n = gate.controls.size();
  if (n >= 2) return 2 * n + 1;
  return n + gate.targets.size() >= 2 ? 1 : 0;
}

double complexity_bound(int k) {
  const double m = k + 1.0;
  return 4.0 + 28.0 * m * m * m + 108.0 * m * m * m * m;
}

ComplexityReport gate_count(const Circuit& circuit) {
  ComplexityReport r;
  r.k = circuit.meta.k;
  r.steps = circuit.meta.steps;
  r.bound = complexity_bound(r.k);
  const std::size_t nops = circuit.ops.size();
  std::vector<std::size_t> cost(nops, 0), blocks(nops, 0);
  for (const Gate& g : circuit.gates) {
    r.total_entangling += entangling_cost(g);
    ++r.gates_by_kind[std::string(to_string(g.kind))];
    if (g.op < 0) continue;
    cost[g.op] += entangling_cost(g);
    const bool on_register = std::all_of(g.targets.begin(), g.targets.end(),
                                         [&](int t) { return t < circuit.num_register; });
    if (on_register) ++blocks[g.op];
  }
  for (std::size_t o = 0; o < nops; ++o) {
    if (circuit.ops[o].kind == GateKind::FMove) r.max_f_blocks = std::max(r.max_f_blocks, blocks[o]);
    if (circuit.ops[o].kind == GateKind::FPrime)
      r.max_fprime_blocks = std::max(r.max_fprime_blocks, blocks[o]);
  }

  // Depth unit: step 0, the costliest plaquette of each round, with ops on
  // disjoint qudits sharing a layer (cost = max over the layer).
  std::map<std::pair<int, int>, std::vector<int>> by_plaquette;  // (round, plaquette)
  for (std::size_t o = 0; o < nops; ++o) {
    const auto& op = circuit.ops[o];
    if (op.step != 0) continue;
    if (op.kind == GateKind::Phase && op.plaquette < 0) {
      ++r.inventory.electric;
      r.depth_unit_entangling += cost[o];
      continue;
    }
    by_plaquette[{op.round, op.plaquette}].push_back(static_cast<int>(o));
  }
  std::map<int, std::pair<std::size_t, LayerInventory>> best_per_round;
  for (const auto& [key, ops] : by_plaquette) {
    std::vector<int> layer_of(ops.size(), 0);
    std::map<int, int> last_layer;  // qudit -> last occupied layer
    int layers = 0;
    for (std::size_t i = 0; i < ops.size(); ++i) {
      int l = 0;
      for (int q : circuit.ops[ops[i]].qudits) {
        auto it = last_layer.find(q);
        if (it != last_layer.end()) l = std::max(l, it->second + 1);
      }
      layer_of[i] = l;
      for (int q : circuit.ops[ops[i]].qudits) last_layer[q] = l;
      layers = std::max(layers, l + 1);
    }
    std::vector<std::size_t> layer_cost(layers, 0);
    std::vector<GateKind> layer_kind(layers, GateKind::Phase);
    for (std::size_t i = 0; i < ops.size(); ++i) {
      layer_cost[layer_of[i]] = std::max(layer_cost[layer_of[i]], cost[ops[i]]);
      layer_kind[layer_of[i]] = circuit.ops[ops[i]].kind;
    }
    std::size_t total = 0;
    LayerInventory inv;
    for (int l = 0; l < layers; ++l) {
      total += layer_cost[l];
      switch (layer_kind[l]) {
        case GateKind::FMove: ++inv.f; break;
        case GateKind::FPrime: ++inv.fprime; break;
        case GateKind::G: ++inv.g; break;
        case GateKind::Omega: ++inv.omega; break;
        default: break;
      }
    }
    auto& best = best_per_round[key.first];
    if (total >= best.first) best = {total, inv};
  }
  for (const auto& [round, best] : best_per_round) {
    r.depth_unit_entangling += best.first;
    r.inventory.f += best.second.f;
    r.inventory.fprime += best.second.fprime;
    r.inventory.g += best.second.g;
    r.inventory.omega += best.second.omega;
  }
  r.within_bound = static_cast<double>(r.depth_unit_entangling) <= r.bound;
  return r;
}

// ---------------------------------------------------------------------------
// Dense simulation

Eigen::MatrixXcd dense_simulate(const Circuit& circuit, const Eigen::MatrixXcd& initial,
                                const SimulationOptions& options) {
  const int nq = circuit.num_qudits();
  for (const auto& [q, v] : options.classical) {
    if (q < 0 || q >= nq || v < 0 || v >= circuit.dims[q])
      throw std::out_of_range("classical qudit assignment out of range");
  }
  std::vector<long long> stride(nq, 0);
  long long total = 1;
  for (int q = nq - 1; q >= 0; --q) {
    if (options.classical.count(q)) continue;
    stride[q] = total;
    total *= circuit.dims[q];
    if (static_cast<std::size_t>(total) > options.max_amplitudes) {
      throw DimensionCapError("simulation needs more than " +
                              std::to_string(options.max_amplitudes) + " amplitudes");
    }
  }
  if (initial.rows() != total) {
    throw std::invalid_argument("initial state has " + std::to_string(initial.rows()) +
                                " amplitudes, expected " + std::to_string(total));
  }
  Eigen::MatrixXcd psi = initial;
  std::vector<char> is_classical(nq, 0);
  for (const auto& [q, v] : options.classical) is_classical[q] = 1;

  for (const Gate& g : circuit.gates) {
    // Controls.
    bool active = true;
    std::vector<Control> qctrl;
    for (const auto& c : g.controls) {
      if (is_classical[c.qudit]) {
        if (options.classical.at(c.qudit) != c.value) active = false;
      } else {
        qctrl.push_back(c);
      }
    }
    if (!active) continue;
    // Restrict the payload to the fixed values of classical targets.
    const auto& p = circuit.payloads.at(g.payload);
    const int nt = static_cast<int>(g.targets.size());
    std::vector<int> tdim(nt);
    for (int i = 0; i < nt; ++i) tdim[i] = circuit.dims[g.targets[i]];
    std::vector<int> keep;  // full payload indices consistent with classical targets
    std::vector<long long> offset;  // state offsets of those indices
    for (Eigen::Index idx = 0; idx < p.rows(); ++idx) {
      Eigen::Index rem = idx;
      bool ok = true;
      long long off = 0;
      for (int i = nt - 1; i >= 0; --i) {
        const int digit = static_cast<int>(rem % tdim[i]);
        rem /= tdim[i];
        const int q = g.targets[i];
        if (is_classical[q]) {
          ok = ok && digit == options.classical.at(q);
        } else {
          off += digit * stride[q];
        }
      }
      if (ok) {
        keep.push_back(static_cast<int>(idx));
        offset.push_back(off);
      }
    }
    const int dq = static_cast<int>(keep.size());
    Eigen::MatrixXcd r(dq, dq);
    for (int a = 0; a < dq; ++a)
      for (int b = 0; b < dq; ++b) r(a, b) = p(keep[a], keep[b]);
    if (dq < p.rows()) {
      double leak = 0.0;
      for (int b : keep) leak += p.col(b).squaredNorm();
      leak = dq - leak;
      if (std::abs(leak) > 1e-12) throw std::logic_error("gate changes a classical qudit");
    }
    // Iterate over the qudits the gate does not touch.
    std::vector<int> free;
    long long base0 = 0;
    for (int q = 0; q < nq; ++q) {
      if (is_classical[q]) continue;
      if (std::find(g.targets.begin(), g.targets.end(), q) != g.targets.end()) continue;
      auto it = std::find_if(qctrl.begin(), qctrl.end(), [q](const Control& c) { return c.qudit == q; });
      if (it != qctrl.end()) {
        base0 += it->value * stride[q];
        continue;
      }
      free.push_back(q);
    }
    std::vector<int> digit(free.size(), 0);
    Eigen::MatrixXcd tmp(dq, psi.cols());
    while (true) {
      long long base = base0;
      for (std::size_t i = 0; i < free.size(); ++i) base += digit[i] * stride[free[i]];
      for (int a = 0; a < dq; ++a) tmp.row(a) = psi.row(base + offset[a]);
      tmp = (r * tmp).eval();
      for (int a = 0; a < dq; ++a) psi.row(base + offset[a]) = tmp.row(a);
      std::size_t i = 0;
      while (i < free.size() && ++digit[i] == circuit.dims[free[i]]) digit[i++] = 0;
      if (i == free.size()) break;
    }
  }
  return psi;
}

Eigen::VectorXcd dense_simulate(const Circuit& circuit, const Eigen::VectorXcd& initial,
                                const SimulationOptions& options) {
  Eigen::MatrixXcd m = initial;
  return dense_simulate(circuit, m, options).col(0);
}

// ---------------------------------------------------------------------------
// Hexagon verification

std::array<SpinLabel, 6> random_admissible_outer(Level level, std::mt19937_64& rng,
                                                 int min_dim) {
  std::uniform_int_distribution<int> label(0, level.k());
  for (int attempt = 0; attempt < 100000; ++attempt) {
    std::array<SpinLabel, 6> outer;
    for (auto& o : outer) o = SpinLabel(label(rng));
    try {
      const SNBasis b(SpinNetwork::hexagon(outer), level);
      if (static_cast<int>(b.size()) >= min_dim) return outer;
    } catch (const EmptyBasisError&) {
    }
  }
  throw std::runtime_error("no admissible outer labels with the requested dimension");
}

namespace {

// State index of a hexagon register configuration with legs classical.
struct HexagonLayout {
  std::vector<long long> stride;
  long long total = 1;
  SimulationOptions sim;
};

HexagonLayout hexagon_layout(const Circuit& circuit, const SNBasis& basis) {
  HexagonLayout h;
  const auto s0 = basis.state(0);
  for (int i = 0; i < 6; ++i) h.sim.classical[6 + i] = s0[6 + i];
  // Ancillas no gate touches stay in |0> and need no amplitude space.
  std::vector<char> touched(circuit.num_qudits(), 0);
  for (const Gate& g : circuit.gates) {
    for (int t : g.targets) touched[t] = 1;
    for (const auto& c : g.controls) touched[c.qudit] = 1;
  }
  for (int q = circuit.num_register; q < circuit.num_qudits(); ++q) {
    if (!touched[q]) h.sim.classical[q] = 0;
  }
  h.stride.assign(circuit.num_qudits(), 0);
  for (int q = circuit.num_qudits() - 1; q >= 0; --q) {
    if (h.sim.classical.count(q)) continue;
    h.stride[q] = h.total;
    h.total *= circuit.dims[q];
  }
  return h;
}

long long inner_index(const HexagonLayout& h, std::span<const std::uint8_t> s) {
  long long idx = 0;
  for (int i = 0; i < 6; ++i) idx += s[i] * h.stride[i];
  return idx;
}

void require_hexagon(const Circuit& circuit, const SNBasis& basis) {
  if (circuit.num_register != 12 || basis.network().num_links() != 12)
    throw std::invalid_argument("hexagon helpers need a 12-qudit hexagon register");
}

}  // namespace

BlockUnitary hexagon_block_unitary(const Circuit& circuit, const SNBasis& basis) {
  require_hexagon(circuit, basis);
  const HexagonLayout h = hexagon_layout(circuit, basis);
  const Eigen::Index dim = static_cast<Eigen::Index>(basis.size());
  Eigen::MatrixXcd in = Eigen::MatrixXcd::Zero(h.total, dim);
  for (Eigen::Index c = 0; c < dim; ++c) in(inner_index(h, basis.state(c)), c) = 1.0;
  const Eigen::MatrixXcd out = dense_simulate(circuit, in, h.sim);
  BlockUnitary b;
  b.matrix.resize(dim, dim);
  for (Eigen::Index r = 0; r < dim; ++r) b.matrix.row(r) = out.row(inner_index(h, basis.state(r)));
  for (Eigen::Index c = 0; c < dim; ++c)
    b.leakage = std::max(b.leakage, std::abs(1.0 - b.matrix.col(c).squaredNorm()));
  return b;
}

Eigen::MatrixXcd expi_symmetric(const Eigen::MatrixXd& m, double theta) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m);
  const Eigen::MatrixXcd v = es.eigenvectors().cast<cd>();
  Eigen::VectorXcd ph(m.rows());
  for (Eigen::Index i = 0; i < m.rows(); ++i) ph(i) = std::exp(cd(0.0, theta * es.eigenvalues()(i)));
  return v * ph.asDiagonal() * v.transpose();
}

namespace {

HexagonCheck compare(const BlockUnitary& got, const Eigen::MatrixXcd& want) {
  HexagonCheck c;
  c.dimension = static_cast<int>(want.rows());
  const Eigen::MatrixXcd d = got.matrix - want;
  c.max_abs_error = d.cwiseAbs().maxCoeff();
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(d);
  c.operator_norm_error = svd.singularValues()(0);
  c.leakage = got.leakage;
  return c;
}

}  // namespace

HexagonCheck hexagon_exactness(const std::array<SpinLabel, 6>& outer, double tau, double g2,
                               const FTable& table, bool lowered) {
  const SNBasis basis(SpinNetwork::hexagon(outer), table.level());
  const Eigen::MatrixXd u = Eigen::MatrixXd(plaquette_operator(basis, 0, kSpinHalf, table));
  Circuit c = trotter_plaquette_step(tau, g2, table);
  if (lowered) c = lower_multicontrolled(c);
  return compare(hexagon_block_unitary(c, basis), expi_symmetric(u, 2.0 * tau / g2));
}

HexagonCheck hexagon_trotter_error(const std::array<SpinLabel, 6>& outer, double tau,
                                   double g2, const FTable& table,
                                   const TrotterOptions& options) {
  const SNBasis basis(SpinNetwork::hexagon(outer), table.level());
  const Eigen::Index dim = static_cast<Eigen::Index>(basis.size());
  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(dim, dim);
  if (options.electric) h.diagonal() += (g2 / 2.0) * electric_diagonal(basis);
  if (options.magnetic) {
    const Eigen::MatrixXd u = Eigen::MatrixXd(plaquette_operator(basis, 0, kSpinHalf, table));
    h -= (1.0 / (2.0 * g2)) * (u + u.transpose());
  }
  const Circuit c =
      trotter_step_second_order(tau, g2, table, LatticeSpec::hexagon(outer), options);
  return compare(hexagon_block_unitary(c, basis), expi_symmetric(h, -tau * options.steps));
}

double plaquette_conjugation_residual(const std::array<SpinLabel, 6>& outer,
                                      const FTable& table) {
  const int n = table.level().num_labels();
  const SNBasis basis(SpinNetwork::hexagon(outer), table.level());
  const Eigen::MatrixXd u = Eigen::MatrixXd(plaquette_operator(basis, 0, kSpinHalf, table));
  Circuit c = empty_circuit(12, 1, table.level().k());
  for (const auto& m : plaquette_fmove_sequence())
    append_move(c, hexagon_qudits(), m, false, table, 0, 0, 0);
  const HexagonLayout h = hexagon_layout(c, basis);
  const Eigen::Index dim = static_cast<Eigen::Index>(basis.size());
  Eigen::MatrixXcd in = Eigen::MatrixXcd::Zero(h.total, dim);
  for (Eigen::Index col = 0; col < dim; ++col) in(inner_index(h, basis.state(col)), col) = 1.0;
  const Eigen::MatrixXcd t = dense_simulate(c, in, h.sim);
  std::vector<long long> support;
  for (long long r = 0; r < h.total; ++r) {
    if (t.row(r).cwiseAbs().maxCoeff() > 1e-14) support.push_back(r);
  }
  const Eigen::Index s = static_cast<Eigen::Index>(support.size());
  Eigen::MatrixXd ts(s, dim);
  for (Eigen::Index i = 0; i < s; ++i) ts.row(i) = t.row(support[i]).real();
  const Eigen::MatrixXd r = ts * u * ts.transpose();
  auto digits = [&](long long idx) {
    std::array<int, 6> d{};
    for (int i = 5; i >= 0; --i) {
      d[i] = static_cast<int>(idx % n);
      idx /= n;
    }
    return d;
  };
  double worst = 0.0;
  for (Eigen::Index a = 0; a < s; ++a) {
    const auto da = digits(support[a]);
    for (Eigen::Index b = 0; b < s; ++b) {
      const auto db = digits(support[b]);
      double expect = 0.0;
      if (std::equal(da.begin() + 1, da.end(), db.begin() + 1)) {
        const int J = db[3];
        expect = table.get(J, db[0], db[0], 1, da[0], da[0]);
      }
      worst = std::max(worst, std::abs(r(a, b) - expect));
    }
  }
  return worst;
}

}  // namespace snaq
