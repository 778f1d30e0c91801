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

#include "snaq/qalgebra.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <mutex>
#include <numbers>
#include <stdexcept>
#include <thread>

namespace snaq {

namespace {

// Racah sum shared by the quantum and classical paths. `fact(n)` returns [n]!
// (or n!) and throws on negative n; the triples are assumed admissible.
template <class Factorial>
double racah_sum(const Factorial& fact, int j1, int j2, int j5, int j3, int j4,
                 int j6) {
  const std::array<std::array<int, 3>, 4> tris{{{j1, j2, j5},
                                                {j1, j4, j6},
                                                {j3, j2, j6},
                                                {j3, j4, j5}}};
  double pre = 1.0;
  std::array<int, 4> a{};
  for (int i = 0; i < 4; ++i) {
    const auto [x, y, z] = tris[i];
    pre *= fact((x + y - z) / 2) * fact((x - y + z) / 2) *
           fact((-x + y + z) / 2) / fact((x + y + z) / 2 + 1);
    a[i] = (x + y + z) / 2;
  }
  const std::array<int, 3> b{(j1 + j2 + j3 + j4) / 2, (j1 + j3 + j5 + j6) / 2,
                             (j2 + j4 + j5 + j6) / 2};
  const int zmin = *std::max_element(a.begin(), a.end());
  const int zmax = *std::min_element(b.begin(), b.end());
  double sum = 0.0;
  for (int z = zmin; z <= zmax; ++z) {
    double den = 1.0;
    for (int x : a) den *= fact(z - x);
    for (int y : b) den *= fact(y - z);
    sum += ((z % 2 == 0) ? 1.0 : -1.0) * fact(z + 1) / den;
  }
  return std::sqrt(pre) * sum;
}

bool triangle_twice(int a, int b, int c) {
  return (a + b + c) % 2 == 0 && a + b >= c && b + c >= a && c + a >= b;
}

bool admissible_twice(int a, int b, int c, int k) {
  return triangle_twice(a, b, c) && a + b + c <= 2 * k;
}

bool tetra_admissible(int j1, int j2, int j5, int j3, int j4, int j6,
                      const std::function<bool(int, int, int)>& adm) {
  return adm(j1, j2, j5) && adm(j1, j4, j6) && adm(j3, j2, j6) &&
         adm(j3, j4, j5);
}

int sign_exponent(int j1, int j2, int j3, int j4) {
  const int s = j1 + j2 + j3 + j4;
  if (s % 2 != 0) {
    throw std::logic_error("F-symbol sign exponent is not an integer");
  }
  return s / 2;
}

[[noreturn]] void negative_factorial(int n) {
  throw std::logic_error("negative factorial argument " + std::to_string(n) +
                         " inside Racah sum");
}

}  // namespace

double q_number(int n, Level level) {
  const double x = std::numbers::pi / (level.k() + 2);
  return std::sin(n * x) / std::sin(x);
}

double q_factorial(int n, Level level) {
  if (n < 0) negative_factorial(n);
  double r = 1.0;
  for (int m = 2; m <= n; ++m) r *= q_number(m, level);
  return r;
}

double quantum_dimension(SpinLabel j, Level level) {
  level.require(j);
  return q_number(j.twice() + 1, level);
}

bool is_admissible(SpinLabel a, SpinLabel b, SpinLabel c, Level level) {
  return admissible_twice(a.twice(), b.twice(), c.twice(), level.k());
}

bool is_triangle(SpinLabel a, SpinLabel b, SpinLabel c) {
  return triangle_twice(a.twice(), b.twice(), c.twice());
}

double racah_q6j(SpinLabel j1, SpinLabel j2, SpinLabel j5, SpinLabel j3,
                 SpinLabel j4, SpinLabel j6, Level level) {
  for (SpinLabel j : {j1, j2, j5, j3, j4, j6}) level.require(j);
  const int k = level.k();
  if (!tetra_admissible(j1.twice(), j2.twice(), j5.twice(), j3.twice(),
                        j4.twice(), j6.twice(),
                        [k](int a, int b, int c) {
                          return admissible_twice(a, b, c, k);
                        })) {
    return 0.0;
  }
  auto fact = [level](int n) { return q_factorial(n, level); };
  return racah_sum(fact, j1.twice(), j2.twice(), j5.twice(), j3.twice(),
                   j4.twice(), j6.twice());
}

double classical_6j(SpinLabel j1, SpinLabel j2, SpinLabel j5, SpinLabel j3,
                    SpinLabel j4, SpinLabel j6) {
  if (!tetra_admissible(j1.twice(), j2.twice(), j5.twice(), j3.twice(),
                        j4.twice(), j6.twice(), triangle_twice)) {
    return 0.0;
  }
  auto fact = [](int n) {
    if (n < 0) negative_factorial(n);
    return std::tgamma(n + 1.0);
  };
  return racah_sum(fact, j1.twice(), j2.twice(), j5.twice(), j3.twice(),
                   j4.twice(), j6.twice());
}

double f_matrix(SpinLabel j1, SpinLabel j2, SpinLabel j5, SpinLabel j3,
                SpinLabel j4, SpinLabel j6, Level level) {
  const double sixj = racah_q6j(j1, j2, j5, j3, j4, j6, level);
  if (sixj == 0.0) return 0.0;
  const int e = sign_exponent(j1.twice(), j2.twice(), j3.twice(), j4.twice());
  return ((e % 2 == 0) ? 1.0 : -1.0) *
         std::sqrt(quantum_dimension(j5, level) * quantum_dimension(j6, level)) *
         sixj;
}

double v_ratio(SpinLabel a, SpinLabel b, SpinLabel c, Level level) {
  const int e = c.twice() - a.twice() - b.twice();
  if (e % 2 != 0) return 0.0;
  const double mag = std::sqrt(quantum_dimension(c, level) /
                               (quantum_dimension(a, level) *
                                quantum_dimension(b, level)));
  return ((e / 2) % 2 == 0 ? 1.0 : -1.0) * mag;
}

double classical_limit_deviation(Level level, int max_twice) {
  const int m = std::min(max_twice, level.k());
  double worst = 0.0;
  for (int j1 = 0; j1 <= m; ++j1)
    for (int j2 = 0; j2 <= m; ++j2)
      for (int j5 = 0; j5 <= m; ++j5)
        for (int j3 = 0; j3 <= m; ++j3)
          for (int j4 = 0; j4 <= m; ++j4)
            for (int j6 = 0; j6 <= m; ++j6) {
              const SpinLabel a(j1), b(j2), c(j5), d(j3), e(j4), f(j6);
              worst = std::max(worst, std::abs(racah_q6j(a, b, c, d, e, f, level) -
                                               classical_6j(a, b, c, d, e, f)));
            }
  return worst;
}

// ---------------------------------------------------------------------------
// FTable

namespace {
constexpr int kDenseMaxLabels = 12;  // (k+1)^6 <= 3e6 entries
const double kUnset = std::numeric_limits<double>::quiet_NaN();
}  // namespace

FTable::FTable(Level level)
    : level_(level), n_(level.k() + 1), dense_(n_ <= kDenseMaxLabels) {
  qfact_.resize(3 * n_ + 4);
  qfact_[0] = 1.0;
  for (std::size_t m = 1; m < qfact_.size(); ++m) {
    qfact_[m] = qfact_[m - 1] * q_number(static_cast<int>(m), level);
  }
  dims_.resize(n_);
  for (int t = 0; t < n_; ++t) dims_[t] = q_number(t + 1, level);
  admissible_.resize(static_cast<std::size_t>(n_) * n_ * n_);
  for (int a = 0; a < n_; ++a)
    for (int b = 0; b < n_; ++b)
      for (int c = 0; c < n_; ++c)
        admissible_[(a * n_ + b) * n_ + c] = admissible_twice(a, b, c, level.k());
  if (dense_) {
    const std::size_t size = flat(n_ - 1, n_ - 1, n_ - 1, n_ - 1, n_ - 1, n_ - 1) + 1;
    dense_cache_ = std::make_unique<std::atomic<double>[]>(size);
    for (std::size_t i = 0; i < size; ++i) {
      dense_cache_[i].store(kUnset, std::memory_order_relaxed);
    }
  }
}

std::size_t FTable::flat(int j1, int j2, int j5, int j3, int j4, int j6) const {
  std::size_t i = j1;
  for (int x : {j2, j5, j3, j4, j6}) i = i * n_ + x;
  return i;
}

double FTable::compute(int j1, int j2, int j5, int j3, int j4, int j6) const {
  if (!(admissible(j1, j2, j5) && admissible(j1, j4, j6) &&
        admissible(j3, j2, j6) && admissible(j3, j4, j5))) {
    return 0.0;
  }
  auto fact = [this](int n) {
    if (n < 0) negative_factorial(n);
    return qfact_.at(n);
  };
  const double sixj = racah_sum(fact, j1, j2, j5, j3, j4, j6);
  const int e = sign_exponent(j1, j2, j3, j4);
  return ((e % 2 == 0) ? 1.0 : -1.0) * std::sqrt(dims_[j5] * dims_[j6]) * sixj;
}

double FTable::get(int j1, int j2, int j5, int j3, int j4, int j6) const {
  const std::size_t i = flat(j1, j2, j5, j3, j4, j6);
  if (dense_) {
    double v = dense_cache_[i].load(std::memory_order_relaxed);
    if (std::isnan(v)) {
      v = compute(j1, j2, j5, j3, j4, j6);
      dense_cache_[i].store(v, std::memory_order_relaxed);
    }
    return v;
  }
  {
    std::shared_lock lock(map_mutex_);
    auto it = map_cache_.find(i);
    if (it != map_cache_.end()) return it->second;
  }
  const double v = compute(j1, j2, j5, j3, j4, j6);
  std::unique_lock lock(map_mutex_);
  return map_cache_.try_emplace(i, v).first->second;
}

double FTable::v_ratio(int a, int b, int c) const {
  const int e = c - a - b;
  if (e % 2 != 0) return 0.0;
  return ((e / 2) % 2 == 0 ? 1.0 : -1.0) *
         std::sqrt(dims_[c] / (dims_[a] * dims_[b]));
}

void FTable::build_eager() {
  for (int j1 = 0; j1 < n_; ++j1)
    for (int j2 = 0; j2 < n_; ++j2)
      for (int j5 = 0; j5 < n_; ++j5) {
        if (!admissible(j1, j2, j5)) continue;
        for (int j3 = 0; j3 < n_; ++j3)
          for (int j4 = 0; j4 < n_; ++j4)
            for (int j6 = 0; j6 < n_; ++j6) get(j1, j2, j5, j3, j4, j6);
      }
}

std::size_t FTable::cached_entries() const {
  if (dense_) {
    const std::size_t size = flat(n_ - 1, n_ - 1, n_ - 1, n_ - 1, n_ - 1, n_ - 1) + 1;
    std::size_t count = 0;
    for (std::size_t i = 0; i < size; ++i) {
      if (!std::isnan(dense_cache_[i].load(std::memory_order_relaxed))) ++count;
    }
    return count;
  }
  std::shared_lock lock(map_mutex_);
  return map_cache_.size();
}

void FTable::inject_for_testing(std::array<int, 6> t, double value) {
  const std::size_t i = flat(t[0], t[1], t[2], t[3], t[4], t[5]);
  if (dense_) {
    dense_cache_[i].store(value, std::memory_order_relaxed);
    return;
  }
  std::unique_lock lock(map_mutex_);
  map_cache_[i] = value;
}

const FTable& shared_ftable(Level level) {
  static std::mutex mutex;
  static std::map<int, std::unique_ptr<FTable>> tables;
  std::lock_guard lock(mutex);
  auto& slot = tables[level.k()];
  if (!slot) slot = std::make_unique<FTable>(level);
  return *slot;
}

// ---------------------------------------------------------------------------
// Identity suite

bool IdentityReport::passed() const {
  return std::all_of(residuals.begin(), residuals.end(), [&](const auto& r) {
    return std::isfinite(r.max_residual) && r.max_residual <= tolerance;
  });
}

const IdentityResidual& IdentityReport::at(std::string_view identity) const {
  for (const auto& r : residuals) {
    if (r.identity == identity) return r;
  }
  throw std::out_of_range("no identity named " + std::string(identity));
}

double default_identity_tolerance(Level level) {
  return level.k() <= 4 ? 1e-10 : 1e-8;
}

namespace {

// Residual accumulator; NaN poisons the maximum.
struct Acc {
  double max = 0.0;
  std::size_t count = 0;
  void add(double r) {
    ++count;
    max = std::isnan(r) ? std::numeric_limits<double>::infinity() : std::max(max, r);
  }
  void merge(const Acc& o) {
    max = std::max(max, o.max);
    count += o.count;
  }
};

// Pentagon for a fixed j1; independent slices run on separate threads.
Acc pentagon_slice(const FTable& F, int j1) {
  const int n = F.level().k() + 1;
  Acc acc;
  for (int j2 = 0; j2 < n; ++j2)
    for (int j5 = 0; j5 < n; ++j5) {
      if (!F.admissible(j1, j2, j5)) continue;
      for (int j6 = 0; j6 < n; ++j6)
        for (int j7 = 0; j7 < n; ++j7)
          for (int j4 = 0; j4 < n; ++j4) {
            if (!F.admissible(j6, j7, j4)) continue;
            for (int j3 = 0; j3 < n; ++j3)
              for (int j8 = 0; j8 < n; ++j8)
                for (int j9 = 0; j9 < n; ++j9) {
                  double lhs = 0.0;
                  for (int J = 0; J < n; ++J) {
                    const double a = F.get(j1, j2, j5, j3, j4, J);
                    if (a == 0.0) continue;
                    lhs += a * F.get(j6, j7, j4, J, j1, j8) *
                           F.get(j8, j7, J, j3, j2, j9);
                  }
                  const double rhs = F.get(j1, j2, j5, j9, j6, j8) *
                                     F.get(j6, j7, j4, j3, j5, j9);
                  acc.add(std::abs(lhs - rhs));
                }
          }
    }
  return acc;
}

}  // namespace

IdentityReport verify_identities(
    const FTable& F, const IdentityOptions& options,
    const std::function<void(const IdentityResidual&)>& sink) {
  const Level level = F.level();
  if (level.k() > options.max_level) {
    throw std::invalid_argument("verify_identities: k=" + std::to_string(level.k()) +
                                " exceeds max_level=" +
                                std::to_string(options.max_level));
  }
  const int n = level.k() + 1;
  IdentityReport report;
  report.k = level.k();
  report.tolerance = options.tolerance > 0 ? options.tolerance
                                           : default_identity_tolerance(level);
  auto emit = [&](std::string name, const Acc& acc) {
    report.residuals.push_back({std::move(name), acc.max, acc.count});
    if (sink) sink(report.residuals.back());
  };

  // Pentagon, parallel over j1.
  {
    std::vector<Acc> slices(n);
    const int threads = std::max(1, std::min(options.threads, n));
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t) {
      pool.emplace_back([&, t] {
        for (int j1 = t; j1 < n; j1 += threads) slices[j1] = pentagon_slice(F, j1);
      });
    }
    for (auto& th : pool) th.join();
    Acc total;
    for (const auto& s : slices) total.merge(s);
    emit("pentagon", total);
  }

  // Orthogonality: Gram matrix over the lower-right slot.
  {
    Acc acc;
    for (int j1 = 0; j1 < n; ++j1)
      for (int j2 = 0; j2 < n; ++j2)
        for (int j3 = 0; j3 < n; ++j3)
          for (int j4 = 0; j4 < n; ++j4)
            for (int jp = 0; jp < n; ++jp)
              for (int j = 0; j < n; ++j) {
                double s = 0.0;
                for (int J = 0; J < n; ++J) {
                  s += F.get(j1, j2, jp, j3, j4, J) * F.get(j1, j2, j, j3, j4, J);
                }
                const bool row = F.admissible(j1, j2, j) && F.admissible(j3, j4, j);
                const double expect = (jp == j && row) ? 1.0 : 0.0;
                acc.add(std::abs(s - expect));
              }
    emit("orthogonality", acc);
  }

  // Tetrahedral symmetry (unweighted) and the v-weighted column swap.
  {
    Acc tetra, weighted, real;
    for (int j1 = 0; j1 < n; ++j1)
      for (int j2 = 0; j2 < n; ++j2)
        for (int j5 = 0; j5 < n; ++j5)
          for (int j3 = 0; j3 < n; ++j3)
            for (int j4 = 0; j4 < n; ++j4)
              for (int j6 = 0; j6 < n; ++j6) {
                const double f = F.get(j1, j2, j5, j3, j4, j6);
                real.add(std::isfinite(f) ? 0.0 : std::numeric_limits<double>::infinity());
                tetra.add(std::max(std::abs(f - F.get(j2, j1, j5, j4, j3, j6)),
                                   std::abs(f - F.get(j4, j3, j5, j2, j1, j6))));
                const int e = j5 + j6 - j1 - j3;
                const double g = F.get(j5, j2, j1, j6, j4, j3);
                double w = 0.0;
                if (e % 2 == 0) {
                  w = ((e / 2) % 2 == 0 ? 1.0 : -1.0) *
                      std::sqrt(F.dim(j5) * F.dim(j6) / (F.dim(j1) * F.dim(j3)));
                }
                weighted.add(std::abs(f - g * w));
              }
    emit("tetrahedral_symmetry", tetra);
    emit("v_weighted_symmetry", weighted);

    Acc norm;
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b)
        for (int c = 0; c < n; ++c) {
          const double expect = F.admissible(a, b, c) ? F.v_ratio(a, b, c) : 0.0;
          norm.add(std::abs(F.get(a, a, 0, b, b, c) - expect));
          const double delta = (a == b && b == c) ? 1.0 : 0.0;
          norm.add(std::abs(F.get(0, 0, 0, a, b, c) - delta));
        }
    emit("normalization", norm);
    emit("realness", real);
  }
  return report;
}

}  // namespace snaq
