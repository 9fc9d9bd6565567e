#pragma once

#include <string>
#include <vector>

#include "menes/linkevents.hpp"
#include "menes/scenario.hpp"
#include "menes/topology.hpp"

namespace menes::config {

// Parse and validate a scenario document (YAML). Optional keys are filled
// with their documented defaults, so parse(print(spec)) is a fixpoint.
// Violations raise ConfigError with a distinct code and, where available,
// the source position. `filename` only decorates error messages.
ScenarioSpec parse(const std::string& text, const std::string& filename = "");
ScenarioSpec parse_file(const std::string& path);

// Canonical text: 2-space indent, keys sorted lexicographically, all
// resolved fields explicit. Round-trips through parse.
std::string print(const ScenarioSpec& spec);

// Fully concrete scenario: node count resolved, graph materialized, every
// node reference validated. Deterministic under (spec, seed).
struct ConcreteScenario {
  ScenarioSpec spec;  // normalized source spec
  std::uint32_t node_count = 0;
  topo::Network network;
  std::vector<TrafficRule> flows;
  std::vector<RoutingRule> routing;  // groups resolved to member lists

  // Concrete form re-printed as a document: resolved node count, structure
  // pinned to the enumerated edge list.
  std::string print() const;
};

// `base_dir` resolves a relative topology.edge_file.
ConcreteScenario expand(const ScenarioSpec& spec,
                        const std::string& base_dir = ".");

}  // namespace menes::config
