#include "menes/topology.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "menes/error.hpp"

namespace menes::topo {
namespace {

[[noreturn]] void fail(errc code, const std::string& msg) {
  throw RunError(stage::topology, code, msg);
}

MacConfig resolve_mac(const MacSpec& spec, double capacity_bps, NodeId src) {
  MacConfig mac;
  mac.datarate_bps = capacity_bps;
  mac.queue_limit = spec.queue_limit.value_or(100);
  MacChoice choice = spec.choice;
  if (choice == MacChoice::automatic) {
    choice = (is_80211b_rate(capacity_bps) || is_80211g_rate(capacity_bps))
                 ? MacChoice::csma
                 : MacChoice::rf_pipe;
  }
  switch (choice) {
    case MacChoice::rf_pipe:
      mac.kind = MacKind::rf_pipe;
      mac.fixed_delay_s = spec.fixed_delay_s.value_or(0.0);
      break;
    case MacChoice::csma:
      mac.kind = MacKind::csma;
      break;
    case MacChoice::tdma:
      mac.kind = MacKind::tdma;
      mac.slot_len_s = spec.slot_len_s.value_or(0.01);
      mac.slots_per_frame = spec.slots_per_frame.value_or(10);
      if (spec.owned_slots) {
        mac.owned_slots = *spec.owned_slots;
      } else {
        mac.owned_slots = {static_cast<int>(src) % mac.slots_per_frame};
      }
      break;
    case MacChoice::automatic:
      break;  // resolved above
  }
  return mac;
}

}  // namespace

Network::Network(std::uint32_t node_count, std::vector<Link> links)
    : node_count_(node_count), links_(std::move(links)), out_(node_count) {
  std::set<std::pair<NodeId, NodeId>> seen;
  for (LinkId id = 0; id < links_.size(); ++id) {
    auto& l = links_[id];
    l.id = id;
    if (l.src >= node_count_ || l.dst >= node_count_) {
      fail(errc::dangling_link, "link endpoint out of range: " +
                                    std::to_string(l.src) + "->" +
                                    std::to_string(l.dst));
    }
    if (l.src == l.dst) {
      fail(errc::dangling_link, "self link at node " + std::to_string(l.src));
    }
    if (!seen.insert({l.src, l.dst}).second) {
      fail(errc::duplicate_link, "duplicate link " + std::to_string(l.src) +
                                     "->" + std::to_string(l.dst));
    }
    out_[l.src].push_back(id);
  }
  for (auto& row : out_) {
    std::sort(row.begin(), row.end(), [&](LinkId a, LinkId b) {
      return links_[a].dst < links_[b].dst;
    });
  }
}

std::int64_t Network::find_link(NodeId src, NodeId dst) const {
  if (src >= node_count_) return -1;
  for (LinkId id : out_[src]) {
    if (links_[id].dst == dst) return id;
  }
  return -1;
}

Network build(const TopologySpec& topology, std::uint32_t node_count,
              const std::vector<LinkRule>& rules, RngStream& rng) {
  if (node_count < 1) fail(errc::nonpositive_node_count, "node count must be >= 1");

  struct Edge {
    NodeId src, dst;
    bool from_file = false;
    double capacity = 0, delay = 0, loss = 0;
  };
  std::vector<Edge> edges;

  switch (topology.structure) {
    case Structure::ring: {
      if (node_count < 2) fail(errc::ring_too_small, "ring needs at least 2 nodes");
      if (node_count == 2) {
        edges.push_back({0, 1});
        edges.push_back({1, 0});
      } else {
        for (NodeId i = 0; i < node_count; ++i) {
          NodeId j = (i + 1) % node_count;
          edges.push_back({i, j});
          edges.push_back({j, i});
        }
      }
      break;
    }
    case Structure::full_mesh: {
      for (NodeId i = 0; i < node_count; ++i)
        for (NodeId j = 0; j < node_count; ++j)
          if (i != j) edges.push_back({i, j});
      break;
    }
    case Structure::random: {
      double p = topology.random_p.value_or(0.5);
      for (NodeId i = 0; i < node_count; ++i) {
        for (NodeId j = i + 1; j < node_count; ++j) {
          if (rng.next_unit() < p) {
            edges.push_back({i, j});
            edges.push_back({j, i});
          }
        }
      }
      break;
    }
    case Structure::predefined: {
      if (topology.edges.empty())
        fail(errc::missing_edge_list, "predefined structure without edges");
      for (const auto& e : topology.edges) {
        edges.push_back({e.src, e.dst, true, e.capacity_bps, e.prop_delay_s,
                         e.pathloss_db});
      }
      break;
    }
  }

  std::vector<Link> links;
  links.reserve(edges.size());
  for (const auto& e : edges) {
    LinkParams params;
    static const MacSpec kDefaultMac{};
    const MacSpec* mac_spec = &kDefaultMac;
    // Later rules win; predefined edge values win for the fields the
    // edge list carries.
    for (const auto& rule : rules) {
      if (!rule.selector.matches(e.src, e.dst)) continue;
      params.capacity_bps = rule.capacity_bps;
      params.prop_delay_s = rule.prop_delay_s;
      params.initial_pathloss_db = rule.initial_pathloss_db;
      params.rx_threshold_db = rule.rx_threshold_db;
      mac_spec = &rule.mac;
    }
    if (e.from_file) {
      params.capacity_bps = e.capacity;
      params.prop_delay_s = e.delay;
      params.initial_pathloss_db = e.loss;
    }
    params.mac = resolve_mac(*mac_spec, params.capacity_bps, e.src);
    links.push_back(Link{0, e.src, e.dst, params});
  }
  return Network(node_count, std::move(links));
}

HeterogeneityReport heterogeneity_check(const Network& net) {
  HeterogeneityReport report;
  for (const auto& link : net.links()) {
    report.by_mac[link.params.mac.kind].push_back(link.id);
  }
  return report;
}

std::vector<PredefEdge> parse_edge_list(const std::string& text) {
  std::vector<PredefEdge> edges;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    long long src, dst;
    double cap, delay, loss;
    if (!(ls >> src)) continue;  // blank or comment-only
    if (!(ls >> dst >> cap >> delay >> loss) || src < 0 || dst < 0) {
      fail(errc::bad_value,
           "edge list line " + std::to_string(lineno) + ": expected 'src dst capacity_bps prop_delay_s pathloss_db'");
    }
    std::string extra;
    if (ls >> extra) {
      fail(errc::bad_value,
           "edge list line " + std::to_string(lineno) + ": trailing tokens");
    }
    edges.push_back(PredefEdge{static_cast<NodeId>(src),
                               static_cast<NodeId>(dst), cap, delay, loss});
  }
  return edges;
}

std::vector<PredefEdge> load_edge_list(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open edge list file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_edge_list(buf.str());
}

}  // namespace menes::topo
