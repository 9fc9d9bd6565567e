#pragma once

#include <map>
#include <string>
#include <vector>

#include "menes/scenario.hpp"
#include "menes/types.hpp"

namespace menes::topo {

struct Link {
  LinkId id = 0;
  NodeId src = 0;
  NodeId dst = 0;
  LinkParams params;
};

// Weighted directed graph without multiple edges. Immutable after build.
class Network {
 public:
  Network() = default;
  Network(std::uint32_t node_count, std::vector<Link> links);

  std::uint32_t node_count() const { return node_count_; }
  const std::vector<Link>& links() const { return links_; }
  const Link& link(LinkId id) const { return links_[id]; }

  // Out-link ids of a node, ordered by destination.
  const std::vector<LinkId>& out_links(NodeId node) const { return out_[node]; }

  // Link id for the ordered pair, or -1 if absent.
  std::int64_t find_link(NodeId src, NodeId dst) const;

 private:
  std::uint32_t node_count_ = 0;
  std::vector<Link> links_;
  std::vector<std::vector<LinkId>> out_;
};

// Materialize the graph for a resolved node count. Link parameters start
// from defaults (or the predefined edge values) and each matching rule in
// `rules` is applied in order, last match winning per field group.
Network build(const TopologySpec& topology, std::uint32_t node_count,
              const std::vector<LinkRule>& rules, RngStream& rng);

// Partition of the link set by MAC kind.
struct HeterogeneityReport {
  std::map<MacKind, std::vector<LinkId>> by_mac;
};
HeterogeneityReport heterogeneity_check(const Network& net);

// Edge-list text: one "src dst capacity_bps prop_delay_s pathloss_db" line
// per directed link, '#' comments.
std::vector<PredefEdge> parse_edge_list(const std::string& text);
std::vector<PredefEdge> load_edge_list(const std::string& path);

}  // namespace menes::topo
