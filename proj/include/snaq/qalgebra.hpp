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

#ifndef SNAQ_QALGEBRA_HPP
#define SNAQ_QALGEBRA_HPP

#include <array>
#include <atomic>
#include <cstddef>
#include <functional>
#include <memory>
#include <shared_mutex>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "snaq/spin.hpp"

namespace snaq {

// [n] = sin(pi n/(k+2)) / sin(pi/(k+2)).
double q_number(int n, Level level);

// [n]! with [0]! = 1.
double q_factorial(int n, Level level);

// d_j = [2j+1].
double quantum_dimension(SpinLabel j, Level level);

// SU(2)_k fusion rule for the triple (a, b, c).
bool is_admissible(SpinLabel a, SpinLabel b, SpinLabel c, Level level);

// Classical SU(2) triangle rule: triangle inequalities and integer sum.
bool is_triangle(SpinLabel a, SpinLabel b, SpinLabel c);

// q-deformed 6j symbol {j1 j2 j5; j3 j4 j6}. Its triples are
// (j1,j2,j5), (j1,j4,j6), (j3,j2,j6), (j3,j4,j5).
double racah_q6j(SpinLabel j1, SpinLabel j2, SpinLabel j5, SpinLabel j3,
                 SpinLabel j4, SpinLabel j6, Level level);

// Same Racah sum with ordinary integers (k -> infinity).
double classical_6j(SpinLabel j1, SpinLabel j2, SpinLabel j5, SpinLabel j3,
                    SpinLabel j4, SpinLabel j6);

// F^{j1 j2 j5}_{j3 j4 j6} = (-1)^{j1+j2+j3+j4} sqrt(d5 d6) {j1 j2 j5; j3 j4 j6}.
double f_matrix(SpinLabel j1, SpinLabel j2, SpinLabel j5, SpinLabel j3,
                SpinLabel j4, SpinLabel j6, Level level);

// Real ratio v_c / (v_a v_b) with v_j = i^{2j} sqrt(d_j); zero unless the
// phase is real, which holds whenever (a, b, c) has an integer sum.
double v_ratio(SpinLabel a, SpinLabel b, SpinLabel c, Level level);

// max over labels <= max_twice of |racah_q6j - classical_6j|.
double classical_limit_deviation(Level level, int max_twice);

// Memoized F-symbols for one level. Lookups are thread safe: small levels use
// a dense array of atomics filled on first use, larger ones a locked map.
class FTable {
 public:
  explicit FTable(Level level);
  FTable(const FTable&) = delete;
  FTable& operator=(const FTable&) = delete;

  Level level() const { return level_; }

  double operator()(SpinLabel j1, SpinLabel j2, SpinLabel j5, SpinLabel j3,
                    SpinLabel j4, SpinLabel j6) const {
    return get(j1.twice(), j2.twice(), j5.twice(), j3.twice(), j4.twice(),
               j6.twice());
  }

  // Twice-spin arguments, same slot order as f_matrix. No range check.
  double get(int j1, int j2, int j5, int j3, int j4, int j6) const;

  bool admissible(int a, int b, int c) const {
    return admissible_[(a * n_ + b) * n_ + c] != 0;
  }
  double dim(int twice_j) const { return dims_[twice_j]; }
  double v_ratio(int a, int b, int c) const;

  // Fills every entry whose top triple (j1, j2, j5) is admissible; the rest
  // vanish and are computed on demand.
  void build_eager();
  std::size_t cached_entries() const;

  // Overrides one entry. Test hook for negative controls only.
  void inject_for_testing(std::array<int, 6> twice_labels, double value);

 private:
  double compute(int j1, int j2, int j5, int j3, int j4, int j6) const;
  std::size_t flat(int j1, int j2, int j5, int j3, int j4, int j6) const;

  Level level_;
  int n_;
  std::vector<double> qfact_;
  std::vector<double> dims_;
  std::vector<char> admissible_;
  bool dense_;
  std::unique_ptr<std::atomic<double>[]> dense_cache_;
  mutable std::unordered_map<std::size_t, double> map_cache_;
  mutable std::shared_mutex map_mutex_;
};

// Process-wide shared table per level.
const FTable& shared_ftable(Level level);

struct IdentityResidual {
  std::string identity;
  double max_residual = 0.0;
  std::size_t num_checked = 0;
};

struct IdentityReport {
  int k = 0;
  double tolerance = 0.0;
  std::vector<IdentityResidual> residuals;

  bool passed() const;
  const IdentityResidual& at(std::string_view identity) const;
};

struct IdentityOptions {
  double tolerance = 0.0;  // <= 0 selects default_identity_tolerance
  int max_level = 6;
  int threads = 1;
};

// 1e-10 for k <= 4, 1e-8 above.
double default_identity_tolerance(Level level);

// Exhaustive pentagon, orthogonality, tetrahedral symmetry, v-weighted
// symmetry, normalization and realness checks over all labels.
IdentityReport verify_identities(
    const FTable& table, const IdentityOptions& options = {},
    const std::function<void(const IdentityResidual&)>& sink = nullptr);

}  // namespace snaq

#endif  // SNAQ_QALGEBRA_HPP
