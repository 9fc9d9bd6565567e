#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "menes/dist.hpp"
#include "menes/types.hpp"

namespace menes {

// Config-level MAC choice. `automatic` resolves from the link capacity at
// expansion time (54 Mbit/s becomes an 802.11g-class CSMA model and so on);
// a rule that omits the mac key gets rf-pipe.
enum class MacChoice { automatic, rf_pipe, csma, tdma };
std::string_view mac_choice_name(MacChoice choice);

struct MacSpec {
  MacChoice choice = MacChoice::rf_pipe;
  std::optional<double> fixed_delay_s;       // rf-pipe only
  std::optional<int> queue_limit;            // any kind, default 100
  std::optional<double> slot_len_s;          // tdma, required
  std::optional<int> slots_per_frame;        // tdma, required
  std::optional<std::vector<int>> owned_slots;  // tdma; absent = node_id % frame

  bool operator==(const MacSpec&) const = default;
};

// Which links a rule applies to: every link, the two directed links of an
// unordered pair, or all links with both endpoints inside a group.
struct LinkSelector {
  enum class Kind { all, pair, group };
  Kind kind = Kind::all;
  NodeId a = 0;
  NodeId b = 0;
  std::vector<NodeId> members;

  bool matches(NodeId src, NodeId dst) const;
  bool operator==(const LinkSelector&) const = default;
};

struct LinkRule {
  LinkSelector selector;
  double capacity_bps = 54e6;
  double prop_delay_s = 0.001;
  double initial_pathloss_db = 80.0;
  double rx_threshold_db = 100.0;
  MacSpec mac;
  std::optional<DistSpec> event_dist;      // inter-event gap law
  std::optional<DistSpec> pathloss_dist;   // event magnitudes

  bool operator==(const LinkRule&) const = default;
};

enum class Structure { ring, full_mesh, random, predefined };
std::string_view structure_name(Structure s);

// One directed edge of a predefined topology (matches the edge-list file
// columns: src dst capacity_bps prop_delay_s pathloss_db).
struct PredefEdge {
  NodeId src = 0;
  NodeId dst = 0;
  double capacity_bps = 54e6;
  double prop_delay_s = 0.001;
  double pathloss_db = 80.0;

  bool operator==(const PredefEdge&) const = default;
};

struct TopologySpec {
  DistSpec num_nodes = DistSpec::interval(1);
  Structure structure = Structure::full_mesh;
  std::vector<PredefEdge> edges;   // predefined, inline
  std::string edge_file;           // predefined, external file (alternative)
  std::optional<double> random_p;  // random

  bool operator==(const TopologySpec&) const = default;
};

enum class TrafficApp { mgen, ping, iperf };
enum class Transport { udp, tcp, icmp };
std::string_view traffic_app_name(TrafficApp app);
std::string_view transport_name(Transport t);

struct TrafficRule {
  NodeId src = 0;
  NodeId dst = 0;
  TrafficApp app = TrafficApp::mgen;
  Transport transport = Transport::udp;
  DistSpec interarrival = DistSpec::interval(1.0);
  int packet_size = 1250;
  double start_s = 0.0;
  double stop_s = 0.0;

  bool operator==(const TrafficRule&) const = default;
};

enum class ProtocolKind { static_route, centralized, ospf_like, olsr_like };
std::string_view protocol_name(ProtocolKind p);
int default_preference(ProtocolKind p);

struct NodeGroup {
  bool all = true;
  std::vector<NodeId> members;

  bool contains(NodeId node) const;
  bool operator==(const NodeGroup&) const = default;
};

struct RoutingRule {
  NodeGroup group;
  ProtocolKind protocol = ProtocolKind::static_route;
  double hello_interval_s = 2.0;
  double refresh_interval_s = 10.0;
  double hold_time_s = 6.0;
  std::optional<int> preference;

  bool operator==(const RoutingRule&) const = default;
};

enum class Backend { in_process, compile_only };
std::string_view backend_name(Backend b);

// Validated in-memory form of a scenario document.
struct ScenarioSpec {
  int duration_s = 0;
  std::uint64_t seed = 0;
  TopologySpec topology;
  std::vector<LinkRule> links;
  std::vector<TrafficRule> traffic;
  std::vector<RoutingRule> routing;
  Backend backend = Backend::in_process;
  double monitoring_period_s = 1.0;

  bool operator==(const ScenarioSpec&) const = default;
};

}  // namespace menes
