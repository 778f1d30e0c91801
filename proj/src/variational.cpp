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

#include "snaq/variational.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <random>
#include <sstream>
#include <thread>

namespace snaq {

// ---------------------------------------------------------------------------
// State and closed-form energy

VariationalState::VariationalState(Level level, Eigen::VectorXd amplitudes)
    : level_(level), psi_(std::move(amplitudes)) {
  if (psi_.size() != level.num_labels()) {
    throw std::invalid_argument("amplitude vector must have k+1 entries");
  }
  if (!psi_.allFinite()) throw std::invalid_argument("non-finite amplitude");
}

VariationalState VariationalState::vacuum(Level level) {
  Eigen::VectorXd psi = Eigen::VectorXd::Zero(level.num_labels());
  psi(0) = 1.0;
  return VariationalState(level, psi);
}

VariationalState VariationalState::normalized(Level level, Eigen::VectorXd amplitudes) {
  const double n = amplitudes.norm();
  if (!(n > 0.0)) throw NormalizationError("zero amplitude vector");
  return VariationalState(level, amplitudes / n);
}

EnergyModel build_energy_model(Level level) {
  const int n = level.num_labels();
  EnergyModel m;
  m.k = level.k();
  m.electric = Eigen::MatrixXd::Zero(n, n);
  m.adjacency = Eigen::MatrixXd::Zero(n, n);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) {
      const double dadb = quantum_dimension(SpinLabel(a), level) *
                          quantum_dimension(SpinLabel(b), level);
      for (int c = 0; c < n; ++c) {
        if (!is_admissible(SpinLabel(a), SpinLabel(b), SpinLabel(c), level)) continue;
        m.electric(a, b) += electric_energy(SpinLabel(c)) *
                            quantum_dimension(SpinLabel(c), level) / dadb;
      }
      if (is_admissible(SpinLabel(a), SpinLabel(b), kSpinHalf, level)) m.adjacency(a, b) = 1.0;
    }
  return m;
}

namespace {

void require_normalized(const VariationalState& s) {
  if (s.normalization_error() > 1e-12) {
    throw NormalizationError("state is not normalized (| |psi|^2 - 1 | = " +
                             std::to_string(s.normalization_error()) + ")");
  }
}

void require_coupling(double g2) {
  if (!(g2 > 0.0) || !std::isfinite(g2)) {
    throw std::invalid_argument("coupling g^2 must be positive and finite");
  }
}

// Per-level cache of the energy model for the convenience overloads.
const EnergyModel& cached_model(Level level) {
  static thread_local std::vector<std::unique_ptr<EnergyModel>> cache;
  const std::size_t k = level.k();
  if (cache.size() <= k) cache.resize(k + 1);
  if (!cache[k]) cache[k] = std::make_unique<EnergyModel>(build_energy_model(level));
  return *cache[k];
}

}  // namespace

double mean_energy(const EnergyModel& model, const Eigen::VectorXd& psi, double g2) {
  const Eigen::VectorXd p = psi.array().square();
  return 2.0 * p.dot(model.electric * p) -
         (2.0 / (g2 * g2)) * psi.dot(model.adjacency * psi);
}

double mean_energy(const VariationalState& state, double g2) {
  require_coupling(g2);
  require_normalized(state);
  return mean_energy(cached_model(state.level()), state.amplitudes(), g2);
}

double mean_plaquette(const VariationalState& state) {
  require_normalized(state);
  const auto& psi = state.amplitudes();
  return psi.dot(cached_model(state.level()).adjacency * psi);
}

Eigen::VectorXd mean_energy_gradient(const EnergyModel& model,
                                     const Eigen::VectorXd& psi, double g2) {
  const Eigen::VectorXd p = psi.array().square();
  const Eigen::VectorXd wp = model.electric * p;
  return 8.0 * psi.cwiseProduct(wp) - (4.0 / (g2 * g2)) * (model.adjacency * psi);
}

double max_mean_plaquette(Level level) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(cached_model(level).adjacency,
                                                    Eigen::EigenvaluesOnly);
  return es.eigenvalues().maxCoeff();
}

// ---------------------------------------------------------------------------
// Brute force on an explicit spin-network basis

BruteForceExpectation brute_force_expectation(const VariationalState& state,
                                              const SpinNetwork& network, double g2,
                                              const FTable& table,
                                              std::span<const int> plaquettes,
                                              std::size_t max_states) {
  require_coupling(g2);
  require_normalized(state);
  const Level level = state.level();
  if (!(table.level() == level)) throw std::invalid_argument("FTable level mismatch");
  const SNBasis basis(network, level, max_states);
  std::vector<int> plist(plaquettes.begin(), plaquettes.end());
  if (plist.empty()) {
    for (int p = 0; p < static_cast<int>(network.plaquettes().size()); ++p) plist.push_back(p);
  }
  std::vector<std::uint8_t> zeros(network.num_links(), 0);
  const auto vac = basis.index_of(zeros);
  if (!vac) throw std::invalid_argument("network has no zero-flux vacuum");

  Eigen::VectorXd st = Eigen::VectorXd::Zero(basis.size());
  st(*vac) = 1.0;
  const auto& psi = state.amplitudes();
  for (int p : plist) {
    Eigen::VectorXd next = Eigen::VectorXd::Zero(basis.size());
    for (int t = 0; t < level.num_labels(); ++t) {
      if (psi(t) == 0.0) continue;
      next += psi(t) * (plaquette_operator(basis, p, SpinLabel(t), table) * st);
    }
    st = std::move(next);
  }
  BruteForceExpectation out;
  out.norm = st.squaredNorm();
  out.electric = st.dot(electric_diagonal(basis).cwiseProduct(st)) / out.norm;
  double mag = 0.0;
  for (int p : plist) mag += st.dot(plaquette_operator(basis, p, kSpinHalf, table) * st);
  out.magnetic = mag / out.norm;
  out.energy_density =
      (out.electric - (2.0 / (g2 * g2)) * out.magnetic) / static_cast<double>(plist.size());
  return out;
}

double brute_force_energy(const VariationalState& state, const SpinNetwork& network,
                          double g2, const FTable& table) {
  return brute_force_expectation(state, network, g2, table).energy_density;
}

// ---------------------------------------------------------------------------
// Optimization

namespace {

// Riemannian Hessian of the energy at v on the tangent space, padded with
// v v^T so it is invertible on the normal direction.
Eigen::MatrixXd padded_hessian(const EnergyModel& model, const Eigen::VectorXd& v, double g2) {
  const Eigen::Index n = v.size();
  const double c = 2.0 / (g2 * g2);
  const Eigen::VectorXd p = v.array().square();
  Eigen::MatrixXd h = 16.0 * v.asDiagonal() * model.electric * v.asDiagonal();
  h.diagonal() += 8.0 * model.electric * p;
  h -= 2.0 * c * model.adjacency;
  const double lambda = mean_energy_gradient(model, v, g2).dot(v);
  const Eigen::MatrixXd proj = Eigen::MatrixXd::Identity(n, n) - v * v.transpose();
  Eigen::MatrixXd r = proj * h * proj - lambda * proj + v * v.transpose();
  return 0.5 * (r + r.transpose());
}

}  // namespace

OptimizeResult local_minimize(const EnergyModel& model, double g2,
                              const Eigen::VectorXd& start,
                              const OptimizeOptions& options) {
  require_coupling(g2);
  const double scale = 1.0 + 2.0 / (g2 * g2);
  const double tol = options.gradient_tolerance * scale;
  Eigen::VectorXd x = start.normalized();
  auto tangent = [&](const Eigen::VectorXd& v) {
    Eigen::VectorXd g = mean_energy_gradient(model, v, g2);
    return Eigen::VectorXd(g - g.dot(v) * v);
  };
  auto hessian = [&](const Eigen::VectorXd& v) { return padded_hessian(model, v, g2); };
  double e = mean_energy(model, x, g2);
  Eigen::VectorXd g = tangent(x);
  double alpha = 1.0 / scale;
  OptimizeResult out;
  int it = 0;
  int stalled = 0;  // consecutive steps whose decrease is below rounding
  for (; it < options.max_iterations; ++it) {
    if (g.norm() <= tol) break;
    // Newton direction where the Hessian is positive definite, otherwise the
    // Barzilai-Borwein gradient step; Armijo backtracking either way.
    Eigen::VectorXd dir = -g;
    double a = alpha;
    Eigen::LLT<Eigen::MatrixXd> llt(hessian(x));
    if (llt.info() == Eigen::Success) {
      Eigen::VectorXd d = llt.solve(-g);
      d -= d.dot(x) * x;
      if (d.dot(g) < 0.0) {
        dir = d;
        a = 1.0;
      }
    }
    const double slope = dir.dot(g);
    Eigen::VectorXd xn;
    double en = e;
    bool moved = false;
    for (int bt = 0; bt < 60; ++bt) {
      xn = (x + a * dir).normalized();
      en = mean_energy(model, xn, g2);
      if (en <= e + 1e-4 * a * slope) {
        moved = true;
        break;
      }
      a *= 0.5;
    }
    if (!moved) break;  // no descent at machine precision
    stalled = e - en <= 4.0 * std::numeric_limits<double>::epsilon() * (1.0 + std::abs(e))
                  ? stalled + 1
                  : 0;
    if (stalled > 50) break;
    const Eigen::VectorXd gn = tangent(xn);
    const Eigen::VectorXd s = xn - x;
    const Eigen::VectorXd y = gn - g;
    const double sy = s.dot(y);
    alpha = sy > 0 ? s.squaredNorm() / sy : 2.0 * alpha;
    alpha = std::clamp(alpha, 1e-12 / scale, 1e6 / scale);
    x = xn;
    e = en;
    g = gn;
  }
  out.psi = x;
  out.energy = e;
  out.plaquette = x.dot(model.adjacency * x);
  out.gradient_norm = g.norm();
  out.iterations = it;
  out.converged = out.gradient_norm <= tol;
  return out;
}

namespace {

bool better(const OptimizeResult& a, const OptimizeResult& b) {
  return a.energy < b.energy - 1e-14 * (1.0 + std::abs(b.energy));
}

std::vector<Eigen::VectorXd> cold_starts(int n, int count, std::uint64_t seed) {
  std::vector<Eigen::VectorXd> out;
  for (int r = 0; r < count; ++r) {
    std::mt19937_64 rng(seed * 0x9E3779B97F4A7C15ULL + static_cast<std::uint64_t>(r));
    std::normal_distribution<double> normal;
    Eigen::VectorXd v(n);
    for (int i = 0; i < n; ++i) v(i) = normal(rng);
    out.push_back(v);
  }
  return out;
}

// Runs local_minimize from every start; the best result wins, earliest start on
// ties, independent of thread count.
OptimizeResult best_of(const EnergyModel& model, double g2,
                       const std::vector<Eigen::VectorXd>& starts,
                       const OptimizeOptions& options) {
  std::vector<OptimizeResult> results(starts.size());
  const int threads =
      std::max(1, std::min<int>(options.threads, static_cast<int>(starts.size())));
  if (threads == 1) {
    for (std::size_t i = 0; i < starts.size(); ++i)
      results[i] = local_minimize(model, g2, starts[i], options);
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t) {
      pool.emplace_back([&, t] {
        for (std::size_t i = t; i < starts.size(); i += threads)
          results[i] = local_minimize(model, g2, starts[i], options);
      });
    }
    for (auto& th : pool) th.join();
  }
  std::size_t best = 0;
  for (std::size_t i = 1; i < results.size(); ++i) {
    if (better(results[i], results[best])) best = i;
  }
  // Fusing every loop with the simple current j = k/2 reverses psi and leaves
  // W and A unchanged, so the energy is invariant. Report the representative
  // closer to the vacuum.
  OptimizeResult out = std::move(results[best]);
  const Eigen::Index top = out.psi.size() - 1;
  if (out.psi(top) * out.psi(top) > out.psi(0) * out.psi(0)) out.psi.reverseInPlace();
  // Global sign: largest-magnitude amplitude positive.
  Eigen::Index imax = 0;
  out.psi.cwiseAbs().maxCoeff(&imax);
  if (out.psi(imax) < 0.0) out.psi = -out.psi;
  return out;
}

}  // namespace

OptimizeResult optimize(Level level, double g2, const OptimizeOptions& options) {
  require_coupling(g2);
  if (options.restarts < 1) throw std::invalid_argument("restarts must be >= 1");
  const EnergyModel& model = cached_model(level);
  std::vector<Eigen::VectorXd> starts = options.warm_starts;
  for (auto& v : cold_starts(level.num_labels(), options.restarts, options.seed))
    starts.push_back(std::move(v));
  return best_of(model, g2, starts, options);
}

std::vector<double> log_grid(double lo, double hi, int points) {
  if (!(lo > 0.0) || !(hi > lo) || points < 2) {
    throw std::invalid_argument("log_grid needs 0 < lo < hi and >= 2 points");
  }
  std::vector<double> g(points);
  for (int i = 0; i < points; ++i) {
    g[i] = std::exp(std::log(lo) + (std::log(hi) - std::log(lo)) * i / (points - 1));
  }
  g.front() = lo;
  g.back() = hi;
  return g;
}

namespace {

// The branches merge instead of crossing (a continuous transition): bisect on
// the point where the small-coupling branch stops being a local minimum.
PhaseScanResult& refine_by_instability(const EnergyModel& model, std::span<const double> grid,
                                       const std::vector<OptimizeResult>& opt,
                                       std::size_t istar, std::size_t ilo, std::size_t ihi,
                                       const ScanOptions& options, PhaseScanResult& res) {
  double lo = grid[ilo], hi = grid[ihi];
  Eigen::VectorXd lower = opt[ilo].psi;
  const double ref = opt[ilo].plaquette;
  // Continues the branch to g2; returns true when it is unstable there.
  auto unstable = [&](double g2, OptimizeResult* r) {
    *r = local_minimize(model, g2, lower, options.optimize);
    if (std::abs(r->plaquette - ref) > 1e-6 * (1.0 + std::abs(ref))) return true;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(padded_hessian(model, r->psi, g2),
                                                      Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff() < -1e-9 * (1.0 + 2.0 / (g2 * g2));
  };
  OptimizeResult r;
  if (unstable(lo, &r) || !unstable(hi, &r)) {
    res.critical_g2 = 0.5 * (grid[istar] + grid[istar + 1]);
    res.detection = "grid";
    return res;
  }
  while (hi - lo > options.bracket_rel_width * hi &&
         res.bisection_steps < options.max_bisection_steps) {
    const double mid = 0.5 * (lo + hi);
    if (unstable(mid, &r)) {
      hi = mid;
    } else {
      lo = mid;
      lower = r.psi;
    }
    ++res.bisection_steps;
  }
  res.bracket = {lo, hi};
  res.critical_g2 = 0.5 * (lo + hi);
  res.refined = true;
  res.detection = "instability";
  return res;
}

}  // namespace

PhaseScanResult phase_scan(Level level, std::span<const double> grid,
                           const ScanOptions& options) {
  if (grid.size() < 2) throw std::invalid_argument("phase_scan needs >= 2 grid points");
  for (std::size_t i = 0; i < grid.size(); ++i) {
    require_coupling(grid[i]);
    if (i > 0 && !(grid[i] > grid[i - 1])) {
      throw std::invalid_argument("phase_scan grid must be strictly ascending");
    }
  }
  const EnergyModel& model = cached_model(level);
  const int n = level.num_labels();
  PhaseScanResult res;
  res.k = level.k();
  res.points.resize(grid.size());

  // Forward sweep: warm start from the previous optimum and the vacuum, plus
  // seeded cold restarts.
  Eigen::VectorXd vac = Eigen::VectorXd::Zero(n);
  vac(0) = 1.0;
  std::vector<OptimizeResult> opt(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    std::vector<Eigen::VectorXd> starts{vac};
    if (i > 0) starts.push_back(opt[i - 1].psi);
    for (auto& v : cold_starts(n, options.optimize.restarts,
                               options.optimize.seed + 7919ULL * (i + 1)))
      starts.push_back(std::move(v));
    opt[i] = best_of(model, grid[i], starts, options.optimize);
  }
  // Backward sweep keeps the branch continued from larger couplings.
  for (std::size_t i = grid.size() - 1; i-- > 0;) {
    const OptimizeResult r = local_minimize(model, grid[i], opt[i + 1].psi, options.optimize);
    if (better(r, opt[i])) opt[i] = r;
  }
  for (std::size_t i = 0; i < grid.size(); ++i) {
    res.points[i] = {grid[i], opt[i].energy, opt[i].plaquette, opt[i].psi, opt[i].converged};
  }

  // Largest discrete derivative of <U>.
  std::size_t istar = 0;
  for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
    const double d = std::abs(opt[i + 1].plaquette - opt[i].plaquette) / (grid[i + 1] - grid[i]);
    if (d > res.max_derivative) {
      res.max_derivative = d;
      istar = i;
    }
  }
  if (res.max_derivative < options.derivative_threshold) return res;

  // Two-branch bisection. The confined branch at g beats the continuation of
  // the deconfined branch exactly above the transition.
  std::size_t ilo = istar > 0 ? istar - 1 : 0;
  std::size_t ihi = std::min(istar + 2, grid.size() - 1);
  double lo = grid[ilo], hi = grid[ihi];
  Eigen::VectorXd lower = opt[ilo].psi, upper = opt[ihi].psi;
  auto confined_wins = [&](double g2, OptimizeResult* a, OptimizeResult* b) {
    *a = local_minimize(model, g2, lower, options.optimize);
    *b = local_minimize(model, g2, upper, options.optimize);
    return b->energy < a->energy - 1e-11 * (1.0 + std::abs(a->energy));
  };
  OptimizeResult a, b;
  const bool lo_ok = !confined_wins(lo, &a, &b);
  const bool hi_ok = confined_wins(hi, &a, &b);
  res.bracket = {grid[istar], grid[istar + 1]};
  if (!(lo_ok && hi_ok)) return refine_by_instability(model, grid, opt, istar, ilo, ihi, options, res);
  while (hi - lo > options.bracket_rel_width * hi &&
         res.bisection_steps < options.max_bisection_steps) {
    const double mid = 0.5 * (lo + hi);
    if (confined_wins(mid, &a, &b)) {
      hi = mid;
      upper = b.psi;
    } else {
      lo = mid;
      lower = a.psi;
    }
    ++res.bisection_steps;
  }
  res.bracket = {lo, hi};
  res.critical_g2 = 0.5 * (lo + hi);
  res.refined = true;
  res.detection = "crossing";
  return res;
}

CriticalLawFit fit_critical_law(std::span<const std::pair<int, double>> points) {
  if (points.size() < 3) throw std::invalid_argument("fit_critical_law needs >= 3 points");
  const Eigen::Index m = static_cast<Eigen::Index>(points.size());
  Eigen::MatrixXd a(m, 2);
  Eigen::VectorXd y(m);
  for (Eigen::Index i = 0; i < m; ++i) {
    if (!(points[i].second > 0.0)) throw std::invalid_argument("g_c^2 must be positive");
    a(i, 0) = points[i].first;
    a(i, 1) = 1.0;
    y(i) = 1.0 / std::sqrt(points[i].second);
  }
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(a);
  if (qr.rank() < 2) throw std::runtime_error("singular critical-law fit");
  const Eigen::Vector2d c = qr.solve(y);
  if (!(c(0) > 0.0)) throw std::runtime_error("critical-law fit has non-positive slope");
  CriticalLawFit fit;
  fit.g0 = 1.0 / c(0);
  fit.k0 = c(1) / c(0);
  const Eigen::VectorXd r = y - a * c;
  fit.residuals.assign(r.data(), r.data() + r.size());
  fit.residual = std::sqrt(r.squaredNorm() / m);
  return fit;
}

// ---------------------------------------------------------------------------
// Monte-Carlo reference ingestion

namespace {

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) {
    const auto b = cell.find_first_not_of(" \t\r");
    const auto e = cell.find_last_not_of(" \t\r");
    out.push_back(b == std::string::npos ? "" : cell.substr(b, e - b + 1));
  }
  return out;
}

bool parse_double(const std::string& s, double* out) {
  const char* end = s.data() + s.size();
  auto [p, ec] = std::from_chars(s.data(), end, *out);
  return ec == std::errc() && p == end;
}

}  // namespace

std::vector<McRow> read_mc_reference(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open reference file " + path);
  std::vector<McRow> rows;
  bool beta = false, first = true;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos || line[0] == '#') continue;
    const auto cells = split_csv(line);
    double x = 0.0;
    if (first && (cells.empty() || !parse_double(cells[0], &x))) {
      std::string h = cells.empty() ? "" : cells[0];
      std::transform(h.begin(), h.end(), h.begin(), [](unsigned char c) { return std::tolower(c); });
      beta = h.find("beta") != std::string::npos;
      first = false;
      continue;
    }
    first = false;
    McRow r;
    if (cells.size() < 2 || !parse_double(cells[0], &x) || !parse_double(cells[1], &r.plaquette) ||
        (cells.size() > 2 && !cells[2].empty() && !parse_double(cells[2], &r.error))) {
      throw std::runtime_error(path + ":" + std::to_string(lineno) + ": malformed row");
    }
    if (!(x > 0.0)) throw std::runtime_error(path + ":" + std::to_string(lineno) + ": non-positive coupling");
    r.g2 = beta ? 4.0 / x : x;
    rows.push_back(r);
  }
  return rows;
}

std::vector<McComparison> compare_mc(std::span<const ScanPoint> scan,
                                     std::span<const McRow> reference) {
  std::vector<McComparison> out;
  if (scan.size() < 2) return out;
  for (const auto& ref : reference) {
    if (ref.g2 < scan.front().g2 || ref.g2 > scan.back().g2) continue;
    std::size_t i = 0;
    while (i + 2 < scan.size() && scan[i + 1].g2 < ref.g2) ++i;
    const double t = (ref.g2 - scan[i].g2) / (scan[i + 1].g2 - scan[i].g2);
    const double u = (1.0 - t) * scan[i].plaquette + t * scan[i + 1].plaquette;
    McComparison c;
    c.g2 = ref.g2;
    c.reference = ref.plaquette;
    c.error = ref.error;
    c.variational = 0.5 * u;
    c.difference = c.variational - c.reference;
    out.push_back(c);
  }
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.g2 < b.g2; });
  return out;
}

}  // namespace snaq
