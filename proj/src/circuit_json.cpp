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

#include "snaq/circuit_json.hpp"

#include <stdexcept>

namespace snaq {

using nlohmann::json;

json circuit_to_json(const Circuit& c) {
  json j;
  j["schema"] = kCircuitSchema;
  j["register"] = {{"qudits", c.num_register}, {"dim", c.meta.k + 1}};
  std::vector<int> anc(c.dims.begin() + c.num_register, c.dims.end());
  j["ancillas"] = {{"count", anc.size()}, {"dims", anc}};
  j["metadata"] = {{"k", c.meta.k},         {"g2", c.meta.g2},
                   {"tau", c.meta.tau},     {"lattice", c.meta.lattice},
                   {"steps", c.meta.steps}, {"trotter_order", c.meta.trotter_order},
                   {"lowered", c.meta.lowered}};
  json ops = json::array();
  for (const auto& op : c.ops) {
    ops.push_back({{"kind", to_string(op.kind)},
                   {"plaquette", op.plaquette},
                   {"round", op.round},
                   {"step", op.step},
                   {"qudits", op.qudits}});
  }
  j["ops"] = std::move(ops);
  json gates = json::array();
  for (const auto& g : c.gates) {
    json ctrl = json::array();
    for (const auto& x : g.controls) ctrl.push_back({x.qudit, x.value});
    gates.push_back({{"kind", to_string(g.kind)},
                     {"origin", to_string(g.origin)},
                     {"targets", g.targets},
                     {"controls", std::move(ctrl)},
                     {"payload_ref", "p" + std::to_string(g.payload)},
                     {"op", g.op},
                     {"ancilla", g.ancilla}});
  }
  j["gates"] = std::move(gates);
  json payloads = json::object();
  for (std::size_t i = 0; i < c.payloads.size(); ++i) {
    const auto& m = c.payloads[i];
    json data = json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r)
      for (Eigen::Index s = 0; s < m.cols(); ++s) data.push_back({m(r, s).real(), m(r, s).imag()});
    payloads["p" + std::to_string(i)] = {{"rows", m.rows()}, {"cols", m.cols()}, {"data", std::move(data)}};
  }
  j["payloads"] = std::move(payloads);
  return j;
}

Circuit circuit_from_json(const json& j) {
  if (j.value("schema", "") != kCircuitSchema) {
    throw std::invalid_argument("not a circuit document (schema mismatch)");
  }
  Circuit c;
  const auto& meta = j.at("metadata");
  c.meta.k = meta.at("k").get<int>();
  c.meta.g2 = meta.at("g2").get<double>();
  c.meta.tau = meta.at("tau").get<double>();
  c.meta.lattice = meta.at("lattice").get<std::string>();
  c.meta.steps = meta.at("steps").get<int>();
  c.meta.trotter_order = meta.at("trotter_order").get<int>();
  c.meta.lowered = meta.at("lowered").get<bool>();
  c.num_register = j.at("register").at("qudits").get<int>();
  c.dims.assign(c.num_register, j.at("register").at("dim").get<int>());
  for (int d : j.at("ancillas").at("dims").get<std::vector<int>>()) c.dims.push_back(d);

  // Payload ids are "p<index>"; keep their numbering.
  const auto& payloads = j.at("payloads");
  std::vector<Eigen::MatrixXcd> mats(payloads.size());
  for (auto it = payloads.begin(); it != payloads.end(); ++it) {
    const std::size_t id = std::stoul(it.key().substr(1));
    if (it.key()[0] != 'p' || id >= mats.size()) throw std::invalid_argument("bad payload id " + it.key());
    const int rows = it->at("rows").get<int>(), cols = it->at("cols").get<int>();
    const auto& data = it->at("data");
    if (data.size() != static_cast<std::size_t>(rows) * cols)
      throw std::invalid_argument("payload " + it.key() + " has the wrong size");
    Eigen::MatrixXcd m(rows, cols);
    for (int r = 0; r < rows; ++r)
      for (int s = 0; s < cols; ++s) {
        const auto& z = data[r * cols + s];
        m(r, s) = {z.at(0).get<double>(), z.at(1).get<double>()};
      }
    mats[id] = std::move(m);
  }
  for (const auto& m : mats) c.add_payload(m);
  if (c.payloads.size() != mats.size()) {
    // Duplicate payloads collapsed; keep the original numbering instead.
    c.payloads = mats;
  }
  for (const auto& op : j.at("ops")) {
    c.ops.push_back({gate_kind_from_string(op.at("kind").get<std::string>()),
                     op.at("plaquette").get<int>(), op.at("round").get<int>(),
                     op.at("step").get<int>(), op.at("qudits").get<std::vector<int>>()});
  }
  for (const auto& g : j.at("gates")) {
    Gate x;
    x.kind = gate_kind_from_string(g.at("kind").get<std::string>());
    x.origin = gate_kind_from_string(g.at("origin").get<std::string>());
    x.targets = g.at("targets").get<std::vector<int>>();
    for (const auto& ctrl : g.at("controls")) x.controls.push_back({ctrl.at(0).get<int>(), ctrl.at(1).get<int>()});
    x.payload = std::stoi(g.at("payload_ref").get<std::string>().substr(1));
    x.op = g.at("op").get<int>();
    x.ancilla = g.at("ancilla").get<int>();
    c.gates.push_back(std::move(x));
  }
  c.validate(1e-10);
  return c;
}

json complexity_to_json(const ComplexityReport& r) {
  json kinds = json::object();
  for (const auto& [k, v] : r.gates_by_kind) kinds[k] = v;
  return {{"schema", "snaq.complexity/1"},
          {"k", r.k},
          {"steps", r.steps},
          {"total_entangling", r.total_entangling},
          {"depth_unit_entangling", r.depth_unit_entangling},
          {"bound", r.bound},
          {"within_bound", r.within_bound},
          {"inventory",
           {{"electric", r.inventory.electric},
            {"omega", r.inventory.omega},
            {"g", r.inventory.g},
            {"f_prime", r.inventory.fprime},
            {"f", r.inventory.f}}},
          {"max_f_blocks", r.max_f_blocks},
          {"max_f_prime_blocks", r.max_fprime_blocks},
          {"gates_by_kind", std::move(kinds)}};
}

}  // namespace snaq
