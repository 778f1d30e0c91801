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

#ifndef SNAQ_CIRCUIT_JSON_HPP
#define SNAQ_CIRCUIT_JSON_HPP

#include "json.hpp"
#include "snaq/circuit.hpp"

namespace snaq {

inline constexpr const char* kCircuitSchema = "snaq.circuit/1";

// Payloads are row-major lists of [re, im] pairs; control values are
// twice-spin integers on register qudits.
nlohmann::json circuit_to_json(const Circuit& circuit);
Circuit circuit_from_json(const nlohmann::json& j);

nlohmann::json complexity_to_json(const ComplexityReport& report);

}  // namespace snaq

#endif  // SNAQ_CIRCUIT_JSON_HPP
