#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "menes/scenario.hpp"
#include "menes/topology.hpp"

namespace menes::routing {

// The dataplane triple plus bookkeeping: destination, next hop, and the
// link that reaches the next hop.
struct RouteEntry {
  NodeId destination = 0;
  NodeId gateway = 0;
  LinkId out_port = 0;
  ProtocolKind origin_protocol = ProtocolKind::static_route;
  int preference = 0;
  int cost = 0;

  bool operator==(const RouteEntry&) const = default;
};

struct RouteTable {
  NodeId node = 0;
  std::map<NodeId, RouteEntry> entries;  // best per destination
  std::map<NodeId, std::vector<RouteEntry>> alternates;

  bool operator==(const RouteTable& other) const {
    return node == other.node && entries == other.entries;
  }
};

// One node's view of the topology, assembled from flooded advertisements.
// A newer sequence number for an origin supersedes its previous edge set.
class LinkStateDb {
 public:
  struct Advert {
    std::uint64_t seq = 0;
    SimTime heard_at = 0;
    std::vector<std::pair<NodeId, NodeId>> edges;  // directed, unit cost
  };

  // Returns true when the advert was new (higher seq than stored).
  bool apply(NodeId origin, std::uint64_t seq, SimTime now,
             std::vector<std::pair<NodeId, NodeId>> edges);

  // Drops adverts older than hold; returns true if anything expired.
  bool age_out(SimTime now, SimTime hold);

  // All directed edges currently advertised.
  std::vector<std::pair<NodeId, NodeId>> edges() const;

  std::optional<std::uint64_t> seq_of(NodeId origin) const;

 private:
  std::map<NodeId, Advert> adverts_;
};

// Dijkstra over unit-cost directed edges. First hops follow the minimal
// gateway address among equal-cost paths; unreachable destinations are
// simply absent. `net` resolves (src, gateway) to the out port.
RouteTable spf(const std::vector<std::pair<NodeId, NodeId>>& edge_list,
               NodeId src, std::uint32_t node_count, const topo::Network& net,
               ProtocolKind proto, int preference);

inline RouteTable spf(const LinkStateDb& db, NodeId src,
                      std::uint32_t node_count, const topo::Network& net,
                      ProtocolKind proto, int preference) {
  return spf(db.edges(), src, node_count, net, proto, preference);
}

// Omniscient tables for every node: spf over the links currently passing
// the `live` predicate (defaults to all links).
std::vector<RouteTable> centralized_compute(
    const topo::Network& net,
    const std::function<bool(const topo::Link&)>& live = {},
    int preference = default_preference(ProtocolKind::centralized));

// Minimal preference wins; ties break on the lowest gateway address.
RouteEntry select_route(const std::vector<RouteEntry>& candidates);

// Merge per-protocol tables of one node into best entries + alternates.
RouteTable merge_tables(NodeId node, const std::vector<RouteTable>& tables);

// Text dump, one line per best entry, stable order for golden-file diffs:
//   node=<i> dest=<addr> gw=<addr> port=<link_id> proto=<name> pref=<n>
std::string dump_routes(const std::vector<RouteTable>& tables);

}  // namespace menes::routing
