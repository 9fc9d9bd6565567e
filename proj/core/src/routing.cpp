#include "menes/routing.hpp"

#include <algorithm>
#include <limits>
#include <queue>

namespace menes::routing {

bool LinkStateDb::apply(NodeId origin, std::uint64_t seq, SimTime now,
                        std::vector<std::pair<NodeId, NodeId>> edges) {
  auto it = adverts_.find(origin);
  if (it != adverts_.end() && seq <= it->second.seq) {
    if (seq == it->second.seq) it->second.heard_at = now;  // refresh
    return false;
  }
  adverts_[origin] = Advert{seq, now, std::move(edges)};
  return true;
}

bool LinkStateDb::age_out(SimTime now, SimTime hold) {
  bool expired = false;
  for (auto it = adverts_.begin(); it != adverts_.end();) {
    if (now - it->second.heard_at > hold) {
      it = adverts_.erase(it);
      expired = true;
    } else {
      ++it;
    }
  }
  return expired;
}

std::vector<std::pair<NodeId, NodeId>> LinkStateDb::edges() const {
  std::vector<std::pair<NodeId, NodeId>> out;
  for (const auto& [origin, advert] : adverts_) {
    out.insert(out.end(), advert.edges.begin(), advert.edges.end());
  }
  return out;
}

std::optional<std::uint64_t> LinkStateDb::seq_of(NodeId origin) const {
  auto it = adverts_.find(origin);
  if (it == adverts_.end()) return std::nullopt;
  return it->second.seq;
}

RouteTable spf(const std::vector<std::pair<NodeId, NodeId>>& edge_list,
               NodeId src, std::uint32_t node_count, const topo::Network& net,
               ProtocolKind proto, int preference) {
  constexpr int kInf = std::numeric_limits<int>::max();
  constexpr NodeId kNone = 0xffffffff;

  // Adjacency, deduplicated and ordered for deterministic relaxation.
  std::vector<std::vector<NodeId>> adj(node_count);
  for (const auto& [a, b] : edge_list) {
    if (a < node_count && b < node_count && a != b) adj[a].push_back(b);
  }
  for (auto& row : adj) {
    std::sort(row.begin(), row.end());
    row.erase(std::unique(row.begin(), row.end()), row.end());
  }

  std::vector<int> dist(node_count, kInf);
  // Minimal first hop over all equal-cost shortest paths; propagated in
  // distance order, so ties settle on the lowest gateway address.
  std::vector<NodeId> first_hop(node_count, kNone);
  dist[src] = 0;

  using Item = std::pair<int, NodeId>;  // (distance, node)
  std::priority_queue<Item, std::vector<Item>, std::greater<Item>> heap;
  heap.push({0, src});
  std::vector<bool> done(node_count, false);
  while (!heap.empty()) {
    auto [d, u] = heap.top();
    heap.pop();
    if (done[u] || d > dist[u]) continue;
    done[u] = true;
    for (NodeId v : adj[u]) {
      int nd = d + 1;  // unit cost per link
      NodeId fh = (u == src) ? v : first_hop[u];
      if (nd < dist[v]) {
        dist[v] = nd;
        first_hop[v] = fh;
        heap.push({nd, v});
      } else if (nd == dist[v] && fh < first_hop[v]) {
        // Equal-cost path with a lower gateway. All distance-(d) nodes
        // settle before any distance-(d+1) node pops, so first hops are
        // final by the time a node relaxes its own successors.
        first_hop[v] = fh;
      }
    }
  }

  RouteTable table;
  table.node = src;
  for (NodeId dest = 0; dest < node_count; ++dest) {
    if (dest == src || dist[dest] == kInf) continue;
    NodeId gw = first_hop[dest];
    std::int64_t port = net.find_link(src, gw);
    if (port < 0) continue;  // db edge not present in the real graph
    table.entries[dest] = RouteEntry{dest, gw, static_cast<LinkId>(port),
                                     proto, preference, dist[dest]};
  }
  return table;
}

std::vector<RouteTable> centralized_compute(
    const topo::Network& net,
    const std::function<bool(const topo::Link&)>& live, int preference) {
  std::vector<std::pair<NodeId, NodeId>> edges;
  for (const auto& link : net.links()) {
    if (!live || live(link)) edges.push_back({link.src, link.dst});
  }
  std::vector<RouteTable> tables;
  tables.reserve(net.node_count());
  for (NodeId n = 0; n < net.node_count(); ++n) {
    tables.push_back(spf(edges, n, net.node_count(), net,
                         ProtocolKind::centralized, preference));
  }
  return tables;
}

RouteEntry select_route(const std::vector<RouteEntry>& candidates) {
  const RouteEntry* best = &candidates.front();
  for (const auto& c : candidates) {
    if (c.preference < best->preference ||
        (c.preference == best->preference && c.gateway < best->gateway)) {
      best = &c;
    }
  }
  return *best;
}

RouteTable merge_tables(NodeId node, const std::vector<RouteTable>& tables) {
  RouteTable merged;
  merged.node = node;
  std::map<NodeId, std::vector<RouteEntry>> candidates;
  for (const auto& t : tables) {
    for (const auto& [dest, entry] : t.entries) candidates[dest].push_back(entry);
  }
  for (auto& [dest, list] : candidates) {
    RouteEntry best = select_route(list);
    for (const auto& e : list) {
      if (!(e == best)) merged.alternates[dest].push_back(e);
    }
    merged.entries[dest] = best;
  }
  return merged;
}

std::string dump_routes(const std::vector<RouteTable>& tables) {
  std::string out;
  for (const auto& table : tables) {
    for (const auto& [dest, e] : table.entries) {
      out += "node=" + std::to_string(table.node);
      out += " dest=" + data_address(e.destination);
      out += " gw=" + data_address(e.gateway);
      out += " port=" + std::to_string(e.out_port);
      out += " proto=" + std::string(protocol_name(e.origin_protocol));
      out += " pref=" + std::to_string(e.preference);
      out += '\n';
    }
  }
  return out;
}

}  // namespace menes::routing
