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

// snaq: command-line front end for the q-deformed Kogut-Susskind toolkit.
//
// Exit codes: 0 success, 1 validation failure or runtime error, 2 usage
// error (bad flags, invalid arguments, unwritable output).

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "snaq/acceptance.hpp"
#include "snaq/circuit.hpp"
#include "snaq/circuit_json.hpp"
#include "snaq/format.hpp"
#include "snaq/qalgebra.hpp"
#include "snaq/spinnet.hpp"
#include "snaq/variational.hpp"

namespace {

using nlohmann::json;
namespace fs = std::filesystem;

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Signals a completed run whose result failed validation.
class ValidationFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class LogLevel { Error = 0, Warn = 1, Info = 2, Debug = 3 };
LogLevel g_log_level = LogLevel::Warn;

void log(LogLevel level, const std::string& msg) {
  static const char* names[] = {"error", "warn", "info", "debug"};
  if (level <= g_log_level) std::fprintf(stderr, "snaq: %s: %s\n", names[static_cast<int>(level)], msg.c_str());
}

// Rounds every floating-point leaf to 15 significant digits.
void round_json(json& j) {
  if (j.is_number_float()) {
    j = snaq::round15(j.get<double>());
  } else if (j.is_structured()) {
    for (auto& x : j) round_json(x);
  }
}

void write_text(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    std::cout.flush();
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw UsageError("cannot write output file " + path);
  out << text;
  if (!out) throw UsageError("failed writing output file " + path);
}

void write_json(const std::string& path, json j) {
  round_json(j);
  write_text(path, j.dump(2) + "\n");
}

std::vector<int> parse_int_list(const std::string& text) {
  std::vector<int> out;
  std::stringstream ss(text);
  std::string cell;
  while (std::getline(ss, cell, ',')) {
    int v = 0;
    const char* b = cell.data();
    const char* e = b + cell.size();
    auto r = std::from_chars(b, e, v);
    if (r.ec != std::errc() || r.ptr != e) throw UsageError("not an integer list: " + text);
    out.push_back(v);
  }
  return out;
}

snaq::Level level_of(int k) {
  if (k < 1) throw UsageError("--k must be >= 1");
  return snaq::Level(k);
}

std::array<snaq::SpinLabel, 6> parse_outer(const std::string& text, snaq::Level level) {
  const auto v = parse_int_list(text);
  if (v.size() != 6) throw UsageError("--outer needs six twice-spin labels");
  std::array<snaq::SpinLabel, 6> out;
  for (int i = 0; i < 6; ++i) {
    if (v[i] < 0 || v[i] > level.k()) throw UsageError("--outer label out of range for this level");
    out[i] = snaq::SpinLabel(v[i]);
  }
  return out;
}

json outer_json(const std::array<snaq::SpinLabel, 6>& outer) {
  json a = json::array();
  for (auto s : outer) a.push_back(s.twice());
  return a;
}

// ---------------------------------------------------------------------------
// Subcommand options

struct Globals {
  int threads = 1;
  std::string log_level = "warn";
};

struct VerifyArgs {
  int k = 1;
  double tol = 0.0;
  std::string out;
};

int run_verify(const VerifyArgs& a, const Globals& g) {
  const snaq::Level level = level_of(a.k);
  snaq::IdentityOptions o;
  o.tolerance = a.tol;
  o.threads = g.threads;
  o.max_level = std::max(6, a.k);
  const snaq::IdentityReport rep = snaq::verify_identities(snaq::shared_ftable(level), o, [](const snaq::IdentityResidual& r) {
    log(LogLevel::Info, r.identity + " max residual " + snaq::format_sig15(r.max_residual));
  });
  json res = json::array();
  for (const auto& r : rep.residuals) {
    res.push_back({{"identity", r.identity}, {"max_residual", r.max_residual}, {"num_checked", r.num_checked}});
  }
  write_json(a.out, {{"schema", "snaq.verify/1"},
                     {"k", rep.k},
                     {"tolerance", rep.tolerance},
                     {"passed", rep.passed()},
                     {"residuals", std::move(res)}});
  return rep.passed() ? 0 : 1;
}

struct FsymbolArgs {
  int k = 1;
  std::string labels;
};

int run_fsymbol(const FsymbolArgs& a) {
  const snaq::Level level = level_of(a.k);
  const auto v = parse_int_list(a.labels);
  if (v.size() != 6) throw UsageError("--labels needs six twice-spin labels 2j1,2j2,2j5,2j3,2j4,2j6");
  for (int x : v) {
    if (x < 0 || x > level.k()) throw UsageError("label out of range for this level");
  }
  using snaq::SpinLabel;
  const double f = snaq::f_matrix(SpinLabel(v[0]), SpinLabel(v[1]), SpinLabel(v[2]), SpinLabel(v[3]),
                                  SpinLabel(v[4]), SpinLabel(v[5]), level);
  write_text("", snaq::format_fixed15(snaq::round15(f)) + "\n");
  return 0;
}

struct BasisDimArgs {
  std::string topology = "single-plaquette";
  int k = 1;
  std::string outer = "0,0,0,0,0,0";
};

snaq::SpinNetwork network_of(const std::string& topology, const std::string& outer, snaq::Level level) {
  if (topology == "single-plaquette" || topology == "chain") return snaq::SpinNetwork::single_plaquette();
  if (topology == "hexagon") return snaq::SpinNetwork::hexagon(parse_outer(outer, level));
  std::string t = topology;
  if (t.rfind("torus", 0) == 0) t = t.substr(t.find_first_not_of("torus:-_ "));
  try {
    const auto spec = snaq::LatticeSpec::parse(t);
    if (spec.kind == snaq::LatticeSpec::Kind::Torus) return spec.network();
  } catch (const std::invalid_argument&) {
  }
  throw UsageError("unknown topology '" + topology + "' (single-plaquette, hexagon, LxL)");
}

int run_basis_dim(const BasisDimArgs& a) {
  const snaq::Level level = level_of(a.k);
  const snaq::SNBasis basis(network_of(a.topology, a.outer, level), level);
  write_text("", std::to_string(basis.size()) + "\n");
  return 0;
}

struct SpectrumArgs {
  int k = 1;
  double g2 = 1.0;
  int levels = 1;
  std::string convention = "rescaled";
  std::string out;
};

int run_plaquette_spectrum(const SpectrumArgs& a) {
  const snaq::Level level = level_of(a.k);
  const auto conv = a.convention == "raw" ? snaq::Convention::Raw : snaq::Convention::Rescaled;
  const auto h = snaq::single_plaquette_hamiltonian(level, a.g2, conv);
  if (a.levels < 1 || a.levels > h.dimension()) throw UsageError("--levels must be in [1, k+1]");
  const snaq::Spectrum s = snaq::diagonalize(h, a.levels);
  json ev = json::array(), dist = json::array();
  for (int n = 0; n < a.levels; ++n) {
    ev.push_back(s.eigenvalues(n));
    json row = json::array();
    for (Eigen::Index j = 0; j < s.eigenvectors.rows(); ++j) row.push_back(s.eigenvectors(j, n) * s.eigenvectors(j, n));
    dist.push_back(std::move(row));
  }
  write_json(a.out, {{"schema", "snaq.plaquette-spectrum/1"},
                     {"k", a.k},
                     {"g2", a.g2},
                     {"convention", a.convention},
                     {"eigenvalues", std::move(ev)},
                     {"distributions", std::move(dist)}});
  return 0;
}

struct GroundstateArgs {
  int k = 1;
  double g2 = 1.0;
  int restarts = 8;
  std::uint64_t seed = 0;
  std::string out;
};

int run_groundstate(const GroundstateArgs& a, const Globals& g) {
  const snaq::Level level = level_of(a.k);
  snaq::OptimizeOptions o;
  o.restarts = a.restarts;
  o.seed = a.seed;
  o.threads = g.threads;
  const snaq::OptimizeResult r = snaq::optimize(level, a.g2, o);
  if (!r.converged) log(LogLevel::Warn, "optimizer stopped with gradient norm " + snaq::format_sig15(r.gradient_norm));
  json psi = json::array();
  for (Eigen::Index i = 0; i < r.psi.size(); ++i) psi.push_back(r.psi(i));
  write_json(a.out, {{"schema", "snaq.groundstate/1"},
                     {"k", a.k},
                     {"g2", a.g2},
                     {"energy", r.energy},
                     {"plaquette", r.plaquette},
                     {"psi", std::move(psi)},
                     {"converged", r.converged},
                     {"gradient_norm", r.gradient_norm},
                     {"iterations", r.iterations}});
  return 0;
}

struct ScanArgs {
  int k = 1;
  double g2_min = 0.05;
  double g2_max = 10.0;
  int points = 60;
  int restarts = 8;
  std::uint64_t seed = 0;
  std::string out;
};

int run_phase_scan(const ScanArgs& a, const Globals& g) {
  const snaq::Level level = level_of(a.k);
  std::vector<double> grid;
  try {
    grid = snaq::log_grid(a.g2_min, a.g2_max, a.points);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  snaq::ScanOptions o;
  o.optimize.restarts = a.restarts;
  o.optimize.seed = a.seed;
  o.optimize.threads = g.threads;
  const snaq::PhaseScanResult r = snaq::phase_scan(level, grid, o);
  std::string csv = "g2,energy,plaquette,converged\n";
  for (const auto& p : r.points) {
    csv += snaq::format_sig15(p.g2) + "," + snaq::format_sig15(p.energy) + "," +
           snaq::format_sig15(p.plaquette) + "," + (p.converged ? "1" : "0") + "\n";
  }
  write_text(a.out, csv);
  json side = {{"schema", "snaq.phase-scan/1"},
               {"k", r.k},
               {"g2_min", a.g2_min},
               {"g2_max", a.g2_max},
               {"points", a.points},
               {"restarts", a.restarts},
               {"seed", a.seed},
               {"critical_g2", r.critical_g2 ? json(*r.critical_g2) : json(nullptr)},
               {"detection", r.detection},
               {"bracket", {r.bracket.first, r.bracket.second}},
               {"max_derivative", r.max_derivative},
               {"bisection_steps", r.bisection_steps}};
  if (!a.out.empty() && a.out != "-") {
    write_json(a.out + ".json", side);
  } else {
    round_json(side);
    std::cerr << side.dump() << "\n";
  }
  if (r.critical_g2) log(LogLevel::Info, "g_c^2 = " + snaq::format_sig15(*r.critical_g2) + " (" + r.detection + ")");
  return 0;
}

struct FitArgs {
  std::string input;
  std::string out;
};

int run_fit_critical(const FitArgs& a) {
  if (!fs::is_directory(a.input)) throw UsageError("--input must be a directory of phase-scan sidecars");
  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(a.input)) {
    if (e.is_regular_file() && e.path().extension() == ".json") files.push_back(e.path());
  }
  std::sort(files.begin(), files.end());
  std::vector<std::pair<int, double>> pts;
  for (const auto& f : files) {
    std::ifstream in(f);
    json j = json::parse(in, nullptr, false);
    if (j.is_discarded() || !j.is_object() || j.value("schema", "") != "snaq.phase-scan/1") continue;
    if (j["critical_g2"].is_null()) {
      log(LogLevel::Warn, f.string() + ": no transition detected, skipped");
      continue;
    }
    pts.emplace_back(j["k"].get<int>(), j["critical_g2"].get<double>());
  }
  std::sort(pts.begin(), pts.end());
  if (pts.size() < 3) throw ValidationFailure("need at least 3 scans with a detected transition");
  const snaq::CriticalLawFit fit = snaq::fit_critical_law(pts);
  json arr = json::array();
  for (std::size_t i = 0; i < pts.size(); ++i) {
    arr.push_back({{"k", pts[i].first}, {"critical_g2", pts[i].second}, {"residual", fit.residuals[i]}});
  }
  write_json(a.out, {{"schema", "snaq.fit-critical/1"},
                     {"g0", fit.g0},
                     {"k0", fit.k0},
                     {"residual", fit.residual},
                     {"points", std::move(arr)}});
  return 0;
}

std::vector<snaq::ScanPoint> read_scan_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open scan file " + path);
  std::vector<snaq::ScanPoint> pts;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#' || line.rfind("g2", 0) == 0) continue;
    std::stringstream ss(line);
    std::string cells[4];
    int n = 0;
    while (n < 4 && std::getline(ss, cells[n], ',')) ++n;
    double v[3];
    for (int i = 0; i < 3; ++i) {
      auto r = std::from_chars(cells[i].data(), cells[i].data() + cells[i].size(), v[i]);
      if (n < 3 || r.ec != std::errc()) {
        throw std::runtime_error(path + ":" + std::to_string(lineno) + ": malformed scan row");
      }
    }
    snaq::ScanPoint p;
    p.g2 = v[0];
    p.energy = v[1];
    p.plaquette = v[2];
    p.converged = n < 4 || cells[3] == "1";
    pts.push_back(p);
  }
  return pts;
}

struct CompareArgs {
  std::string scan;
  std::string reference;
  std::string out;
};

int run_compare_mc(const CompareArgs& a) {
  const auto scan = read_scan_csv(a.scan);
  const auto ref = snaq::read_mc_reference(a.reference);
  const auto cmp = snaq::compare_mc(scan, ref);
  std::string csv = "g2,reference,error,variational,difference\n";
  for (const auto& c : cmp) {
    csv += snaq::format_sig15(c.g2) + "," + snaq::format_sig15(c.reference) + "," +
           snaq::format_sig15(c.error) + "," + snaq::format_sig15(c.variational) + "," +
           snaq::format_sig15(c.difference) + "\n";
  }
  write_text(a.out, csv);
  if (cmp.size() < ref.size()) {
    log(LogLevel::Warn, std::to_string(ref.size() - cmp.size()) + " reference rows outside the scanned range");
  }
  return 0;
}

struct CompileArgs {
  int k = 1;
  double g2 = 1.0;
  double tau = 0.1;
  std::string lattice = "2x2";
  std::string outer = "0,0,0,0,0,0";
  int steps = 1;
  bool lower = false;
  std::string out;
};

int run_compile(const CompileArgs& a) {
  const snaq::Level level = level_of(a.k);
  snaq::LatticeSpec lattice;
  try {
    lattice = snaq::LatticeSpec::parse(a.lattice);
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  if (lattice.kind == snaq::LatticeSpec::Kind::Hexagon) lattice.outer = parse_outer(a.outer, level);
  if (a.steps < 1) throw UsageError("--steps must be >= 1");
  snaq::TrotterOptions o;
  o.steps = a.steps;
  snaq::Circuit c = snaq::trotter_step_second_order(a.tau, a.g2, snaq::shared_ftable(level), lattice, o);
  if (a.lower) c = snaq::lower_multicontrolled(c);
  c.validate(1e-10);
  log(LogLevel::Info, std::to_string(c.gates.size()) + " gates, " + std::to_string(c.payloads.size()) + " payloads");
  write_json(a.out, snaq::circuit_to_json(c));
  return 0;
}

struct HexagonArgs {
  int k = 1;
  double tau = 0.3;
  double g2 = 1.0;
  std::string outer;
  std::uint64_t seed = 0;
  bool lowered = false;
  bool trotter = false;
  double tol = 1e-8;
  std::string out;
};

int run_hexagon_verify(const HexagonArgs& a) {
  const snaq::Level level = level_of(a.k);
  std::array<snaq::SpinLabel, 6> outer;
  if (a.outer.empty()) {
    std::mt19937_64 rng(a.seed);
    outer = snaq::random_admissible_outer(level, rng, 1);
  } else {
    outer = parse_outer(a.outer, level);
  }
  const auto& table = snaq::shared_ftable(level);
  snaq::HexagonCheck chk;
  try {
    chk = a.trotter ? snaq::hexagon_trotter_error(outer, a.tau, a.g2, table)
                    : snaq::hexagon_exactness(outer, a.tau, a.g2, table, a.lowered);
  } catch (const snaq::EmptyBasisError& e) {
    throw UsageError(std::string("outer labels admit no spin network: ") + e.what());
  }
  const bool ok = a.trotter || chk.operator_norm_error < a.tol;
  write_json(a.out, {{"schema", "snaq.hexagon-verify/1"},
                     {"k", a.k},
                     {"tau", a.tau},
                     {"g2", a.g2},
                     {"outer", outer_json(outer)},
                     {"mode", a.trotter ? "trotter" : "exact"},
                     {"lowered", a.lowered},
                     {"dimension", chk.dimension},
                     {"operator_norm_error", chk.operator_norm_error},
                     {"max_abs_error", chk.max_abs_error},
                     {"leakage", chk.leakage},
                     {"tolerance", a.trotter ? json(nullptr) : json(a.tol)},
                     {"passed", ok}});
  return ok ? 0 : 1;
}

struct GateCountArgs {
  std::string circuit;
  std::string out;
};

int run_gate_count(const GateCountArgs& a) {
  std::ifstream in(a.circuit);
  if (!in) throw UsageError("cannot open circuit file " + a.circuit);
  json j = json::parse(in, nullptr, false);
  if (j.is_discarded()) throw UsageError(a.circuit + " is not valid JSON");
  snaq::Circuit c;
  try {
    c = snaq::circuit_from_json(j);
  } catch (const nlohmann::json::exception& e) {
    throw UsageError(std::string("malformed circuit document: ") + e.what());
  }
  const snaq::ComplexityReport r = snaq::gate_count(c);
  write_json(a.out, snaq::complexity_to_json(r));
  return r.within_bound ? 0 : 1;
}

struct SuiteArgs {
  int k_max = 0;  // 0: full ranges
  bool inject_fault = false;
  std::uint64_t seed = 2026;
};

int run_suite_all(const SuiteArgs& a, const Globals& g) {
  snaq::AcceptanceOptions o;
  if (a.k_max > 0) o.k_max = a.k_max;
  o.inject_ftable_fault = a.inject_fault;
  o.threads = g.threads;
  o.seed = a.seed;
  o.on_result = [](const snaq::CriterionResult& r) {
    std::cout << snaq::format_result_line(r) << std::endl;
  };
  const snaq::AcceptanceReport rep = snaq::run_acceptance(o);
  int pass = 0, fail = 0, skip = 0;
  for (const auto& r : rep.results) {
    (r.status == snaq::CriterionStatus::Pass ? pass : r.status == snaq::CriterionStatus::Fail ? fail : skip)++;
  }
  std::cout << "summary: " << pass << " passed, " << fail << " failed, " << skip << " skipped" << std::endl;
  return rep.passed() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"snaq: q-deformed SU(2)_k lattice gauge theory toolkit"};
  app.require_subcommand(1);
  Globals globals;
  app.add_option("--threads", globals.threads, "Worker threads (SNAQ_THREADS overrides)")
      ->check(CLI::PositiveNumber);
  app.add_option("--log-level", globals.log_level, "error, warn, info or debug")
      ->check(CLI::IsMember({"error", "warn", "info", "debug"}));

  VerifyArgs verify;
  auto* c_verify = app.add_subcommand("verify", "Exhaustive F-symbol identity report");
  c_verify->add_option("--k", verify.k, "Level")->required();
  c_verify->add_option("--tol", verify.tol, "Tolerance (default 1e-10 for k<=4, else 1e-8)");
  c_verify->add_option("--out", verify.out, "Output file (default stdout)");

  FsymbolArgs fsym;
  auto* c_fsym = app.add_subcommand("fsymbol", "Print one F-symbol");
  c_fsym->add_option("--k", fsym.k, "Level")->required();
  c_fsym->add_option("--labels", fsym.labels, "2j1,2j2,2j5,2j3,2j4,2j6")->required();

  BasisDimArgs bdim;
  auto* c_bdim = app.add_subcommand("basis-dim", "Spin-network basis dimension");
  c_bdim->add_option("--topology", bdim.topology, "single-plaquette, hexagon or LxL");
  c_bdim->add_option("--k", bdim.k, "Level")->required();
  c_bdim->add_option("--outer", bdim.outer, "Hexagon outer labels (twice-spin)");

  SpectrumArgs spec;
  auto* c_spec = app.add_subcommand("plaquette-spectrum", "Single-plaquette spectrum");
  c_spec->add_option("--k", spec.k, "Level")->required();
  c_spec->add_option("--g2", spec.g2, "Coupling g^2")->required()->check(CLI::PositiveNumber);
  c_spec->add_option("--levels", spec.levels, "Number of eigenpairs");
  c_spec->add_option("--convention", spec.convention, "raw or rescaled")
      ->check(CLI::IsMember({"raw", "rescaled"}));
  c_spec->add_option("--out", spec.out, "Output file");

  GroundstateArgs gs;
  auto* c_gs = app.add_subcommand("groundstate", "Variational optimum at one coupling");
  c_gs->add_option("--k", gs.k, "Level")->required();
  c_gs->add_option("--g2", gs.g2, "Coupling g^2")->required()->check(CLI::PositiveNumber);
  c_gs->add_option("--restarts", gs.restarts, "Cold restarts")->check(CLI::PositiveNumber);
  c_gs->add_option("--seed", gs.seed, "Seed");
  c_gs->add_option("--out", gs.out, "Output file");

  ScanArgs scan;
  auto* c_scan = app.add_subcommand("phase-scan", "Variational scan over a log grid in g^2");
  c_scan->add_option("--k", scan.k, "Level")->required();
  c_scan->add_option("--g2-min", scan.g2_min, "Smallest g^2");
  c_scan->add_option("--g2-max", scan.g2_max, "Largest g^2");
  c_scan->add_option("--points", scan.points, "Grid points");
  c_scan->add_option("--restarts", scan.restarts, "Cold restarts per point")->check(CLI::PositiveNumber);
  c_scan->add_option("--seed", scan.seed, "Seed");
  c_scan->add_option("--out", scan.out, "CSV output; a sidecar <out>.json holds g_c^2");

  FitArgs fit;
  auto* c_fit = app.add_subcommand("fit-critical", "Fit g_c^2 = (g0/(k+k0))^2 over scan sidecars");
  c_fit->add_option("--input", fit.input, "Directory with phase-scan outputs")->required();
  c_fit->add_option("--out", fit.out, "Output file");

  CompareArgs cmp;
  auto* c_cmp = app.add_subcommand("compare-mc", "Compare a scan with a reference plaquette table");
  c_cmp->add_option("--scan", cmp.scan, "phase-scan CSV")->required();
  c_cmp->add_option("--reference", cmp.reference, "CSV (g2 or beta, plaquette, error)")->required();
  c_cmp->add_option("--out", cmp.out, "Output file");

  CompileArgs comp;
  auto* c_comp = app.add_subcommand("compile", "Compile second-order Trotter steps to a circuit");
  c_comp->add_option("--k", comp.k, "Level")->required();
  c_comp->add_option("--g2", comp.g2, "Coupling g^2")->required()->check(CLI::PositiveNumber);
  c_comp->add_option("--tau", comp.tau, "Time step")->required();
  c_comp->add_option("--lattice", comp.lattice, "hexagon or LxL torus");
  c_comp->add_option("--outer", comp.outer, "Hexagon outer labels (twice-spin)");
  c_comp->add_option("--steps", comp.steps, "Trotter steps");
  c_comp->add_flag("--lower-ancilla", comp.lower, "Expand multi-controlled gates with ancillas");
  c_comp->add_option("--out", comp.out, "Output file");

  HexagonArgs hex;
  auto* c_hex = app.add_subcommand("hexagon-verify", "Dense check of the plaquette circuit on a hexagon");
  c_hex->add_option("--k", hex.k, "Level")->required();
  c_hex->add_option("--tau", hex.tau, "Time step")->required();
  c_hex->add_option("--g2", hex.g2, "Coupling g^2")->required()->check(CLI::PositiveNumber);
  c_hex->add_option("--outer", hex.outer, "Outer labels 2j,... (default: random admissible)");
  c_hex->add_option("--seed", hex.seed, "Seed for random outer labels");
  c_hex->add_option("--tol", hex.tol, "Pass threshold on the operator-norm error");
  c_hex->add_flag("--lowered", hex.lowered, "Verify the ancilla-lowered circuit");
  c_hex->add_flag("--trotter", hex.trotter, "Report the symmetric Trotter step error instead");
  c_hex->add_option("--out", hex.out, "Output file");

  GateCountArgs gc;
  auto* c_gc = app.add_subcommand("gate-count", "Complexity report of a compiled circuit");
  c_gc->add_option("--circuit", gc.circuit, "Circuit JSON")->required();
  c_gc->add_option("--out", gc.out, "Output file");

  SuiteArgs suite;
  auto* c_suite = app.add_subcommand("suite-all", "Run every acceptance check");
  c_suite->add_option("--k-max", suite.k_max, "Cap every level sweep (default: full ranges)")
      ->check(CLI::PositiveNumber);
  c_suite->add_option("--seed", suite.seed, "Seed");
  c_suite->add_flag("--inject-ftable-fault", suite.inject_fault, "Negative control: corrupt one F-symbol");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    g_log_level = globals.log_level == "error" ? LogLevel::Error
                  : globals.log_level == "info" ? LogLevel::Info
                  : globals.log_level == "debug" ? LogLevel::Debug
                                                 : LogLevel::Warn;
    if (const char* env = std::getenv("SNAQ_THREADS"); env && *env) {
      int t = 0;
      auto r = std::from_chars(env, env + std::strlen(env), t);
      if (r.ec != std::errc() || *r.ptr != '\0' || t < 1) throw UsageError("SNAQ_THREADS must be a positive integer");
      globals.threads = t;
    }
    log(LogLevel::Debug, "threads = " + std::to_string(globals.threads));

    if (*c_verify) return run_verify(verify, globals);
    if (*c_fsym) return run_fsymbol(fsym);
    if (*c_bdim) return run_basis_dim(bdim);
    if (*c_spec) return run_plaquette_spectrum(spec);
    if (*c_gs) return run_groundstate(gs, globals);
    if (*c_scan) return run_phase_scan(scan, globals);
    if (*c_fit) return run_fit_critical(fit);
    if (*c_cmp) return run_compare_mc(cmp);
    if (*c_comp) return run_compile(comp);
    if (*c_hex) return run_hexagon_verify(hex);
    if (*c_gc) return run_gate_count(gc);
    if (*c_suite) return run_suite_all(suite, globals);
  } catch (const UsageError& e) {
    log(LogLevel::Error, e.what());
    return 2;
  } catch (const ValidationFailure& e) {
    log(LogLevel::Error, e.what());
    return 1;
  } catch (const std::invalid_argument& e) {
    log(LogLevel::Error, e.what());
    return 2;
  } catch (const std::out_of_range& e) {
    log(LogLevel::Error, e.what());
    return 2;
  } catch (const std::exception& e) {
    log(LogLevel::Error, e.what());
    return 1;
  }
  return 2;
}
