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

// Acceptance suite: one PASS/FAIL/SKIP line per criterion, exit status 1 if
// any criterion fails.
#include <cstdio>
#include <cstdlib>
#include <string>

#include "snaq/acceptance.hpp"

int main(int argc, char** argv) {
  snaq::AcceptanceOptions options;
  for (int i = 1; i < argc; ++i) {
    const std::string arg = argv[i];
    if (arg == "--k-max" && i + 1 < argc) {
      options.k_max = std::atoi(argv[++i]);
    } else if (arg == "--threads" && i + 1 < argc) {
      options.threads = std::atoi(argv[++i]);
    } else {
      std::fprintf(stderr, "usage: %s [--k-max K] [--threads N]\n", argv[0]);
      return 2;
    }
  }
  if (const char* env = std::getenv("SNAQ_THREADS")) options.threads = std::atoi(env);
  options.on_result = [](const snaq::CriterionResult& r) {
    std::printf("%s\n", snaq::format_result_line(r).c_str());
    std::fflush(stdout);
  };
  const snaq::AcceptanceReport report = snaq::run_acceptance(options);
  return report.passed() ? 0 : 1;
}
