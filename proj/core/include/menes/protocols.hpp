#pragma once

#include <memory>
#include <vector>

#include "menes/emucore.hpp"
#include "menes/scenario.hpp"

namespace menes::routing {

// Instantiate control planes from the scenario's routing rules:
//  - static: omniscient tables computed once at t=0, never updated
//  - centralized: omniscient tables recomputed after every link event
//  - ospf-like / olsr-like: distributed hello + full-flood link state
// Multiple protocols may coexist per node; forwarding uses the merged
// best table by preference.
std::vector<std::unique_ptr<emu::RoutingAgent>> make_agents(
    const std::vector<RoutingRule>& rules, std::uint32_t node_count);

}  // namespace menes::routing
