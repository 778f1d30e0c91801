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

#ifndef SNAQ_ACCEPTANCE_HPP
#define SNAQ_ACCEPTANCE_HPP

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace snaq {

enum class CriterionStatus { Pass, Fail, Skip };

std::string_view to_string(CriterionStatus status);

struct CriterionResult {
  int id = 0;
  std::string name;
  CriterionStatus status = CriterionStatus::Skip;
  std::string detail;
  double seconds = 0.0;
};

struct AcceptanceOptions {
  // Caps every level sweep. Criteria whose definition needs larger levels
  // (the k -> large convergence checks and the k <= 16 scans) are skipped.
  std::optional<int> k_max;
  // Corrupts one F-symbol of the private k = 1 table used by the identity
  // suite (negative control).
  bool inject_ftable_fault = false;
  int threads = 1;
  std::uint64_t seed = 2026;
  double time_budget_seconds = 600.0;
  std::function<void(const CriterionResult&)> on_result;
};

struct AcceptanceReport {
  std::vector<CriterionResult> results;
  double seconds = 0.0;

  bool passed() const;  // no criterion failed
};

// Runs criteria 1..12 in order.
AcceptanceReport run_acceptance(const AcceptanceOptions& options = {});

// "[PASS]  3  single-plaquette-convergence  (0.01 s)  detail".
std::string format_result_line(const CriterionResult& result);

}  // namespace snaq

#endif  // SNAQ_ACCEPTANCE_HPP
