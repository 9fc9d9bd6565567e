#pragma once

#include <cstdint>
#include <deque>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <queue>
#include <string>
#include <variant>
#include <vector>

#include "menes/linkevents.hpp"
#include "menes/routing.hpp"
#include "menes/scenario.hpp"
#include "menes/topology.hpp"
#include "menes/types.hpp"

namespace menes::emu {

// ---------------------------------------------------------------------------
// MAC models

struct RfPipe {
  double datarate_bps = 54e6;
  double fixed_delay_s = 0.0;
  int queue_limit = 100;
};

struct Csma {
  double rate_class_bps = 54e6;
  int queue_limit = 100;
};

struct Tdma {
  double slot_len_s = 0.01;
  int slots_per_frame = 10;
  std::vector<int> owned_slots;
  double datarate_bps = 54e6;
  int queue_limit = 100;
};

using MacModel = std::variant<RfPipe, Csma, Tdma>;

MacKind mac_kind(const MacModel& model);
int queue_limit(const MacModel& model);

// Rate-class translation: 54 Mbit/s and the other OFDM rates map to an
// 802.11g-class CSMA model, the 802.11b set to a b-class one, anything else
// to an RF pipe at the requested rate. An explicit MAC choice in the config
// bypasses this.
MacModel map_rate_to_mac(double requested_rate_bps);

MacModel make_mac_model(const MacConfig& config);

// Serialization delay: 8 * size / rate.
double transmission_delay(int size_bytes, double rate_bps);

// Delivery iff current pathloss does not exceed the receiver threshold
// (boundary inclusive).
bool phy_receive(double current_pathloss_db, double rx_threshold_db);

// Departure time for the head-of-queue packet entering service at `now`.
// RF pipe: now + tx + fixed delay. CSMA: the datarate is shared fairly
// among `contenders` transmitters. TDMA: service waits for the next owned
// slot boundary, one packet per owned slot.
SimTime mac_service_departure(const MacModel& model, SimTime now,
                              int size_bytes, int contenders);

// ---------------------------------------------------------------------------
// Packets

enum class PacketKind {
  data_udp,
  data_tcp_segment,
  icmp_echo,
  icmp_reply,
  control_hello,
  control_lsa,
};
std::string_view packet_kind_name(PacketKind kind);

enum class DropReason { phy, queue_full, ttl_exceeded, no_route };
std::string_view drop_reason_name(DropReason reason);

struct HelloPayload {
  NodeId origin = 0;
};

struct LsaPayload {
  NodeId origin = 0;
  std::uint64_t seq = 0;
  std::vector<std::pair<NodeId, NodeId>> edges;
};

inline constexpr NodeId kBroadcast = 0xffffffff;

struct Packet {
  std::uint64_t id = 0;
  int flow_id = -1;  // -1 for control traffic
  NodeId src = 0;
  NodeId dst = 0;  // kBroadcast for broadcast
  int size_bytes = 0;
  PacketKind kind = PacketKind::data_udp;
  SimTime created_at = 0;
  std::vector<std::pair<NodeId, SimTime>> hop_trace;
  std::uint32_t app_seq = 0;  // echo sequence / tcp segment number
  bool tcp_is_ack = false;
  std::variant<std::monostate, HelloPayload, LsaPayload> control;
};

// ---------------------------------------------------------------------------
// Per-NEM view (used by the artifact compiler and reports)

struct NemStack {
  NodeId node = 0;
  bool unicast = true;
  bool broadcast = true;
  bool multicast = true;
  MacModel mac;
  double rx_threshold_db = 100.0;
};

// Representative NEM per node: MAC from the first out-link, threshold from
// the node's out-links.
std::vector<NemStack> nem_stacks(const topo::Network& net);

// ---------------------------------------------------------------------------
// Run results

struct PacketLogEntry {
  int flow_id = -1;
  std::uint64_t packet_id = 0;
  NodeId src = 0;
  NodeId dst = 0;
  SimTime sent = 0;
  std::optional<SimTime> recv;          // flow-level receive time
  std::optional<DropReason> drop;       // terminal drop, if never delivered
  int size_bytes = 0;
  std::vector<std::pair<NodeId, SimTime>> hop_trace;
};

struct Counters {
  std::uint64_t sent = 0;  // wire packets injected (per broadcast copy)
  std::uint64_t delivered = 0;
  std::uint64_t dropped_phy = 0;
  std::uint64_t dropped_queue_full = 0;
  std::uint64_t dropped_ttl = 0;
  std::uint64_t dropped_no_route = 0;
  std::uint64_t in_flight_at_end = 0;  // counted from residual state
  std::uint64_t hellos_sent = 0;
  std::uint64_t lsas_sent = 0;

  std::uint64_t dropped_total() const {
    return dropped_phy + dropped_queue_full + dropped_ttl + dropped_no_route;
  }
};

struct RouteInstall {
  SimTime t = 0;
  NodeId node = 0;
  ProtocolKind proto = ProtocolKind::static_route;
  bool changed = false;  // merged best table changed
};

struct TcpFlowStats {
  std::uint64_t offered_bytes = 0;
  std::uint64_t acked_bytes = 0;
  std::uint64_t retransmits = 0;
};

struct RunTrace {
  std::vector<PacketLogEntry> packet_log;  // application packets only
  Counters counters;
  std::vector<ResourceSample> resources;
  std::vector<RouteInstall> route_log;
  std::vector<routing::RouteTable> final_tables;  // merged best, per node
  std::map<int, TcpFlowStats> tcp_stats;          // by flow id
  std::uint64_t hop_events = 0;
  SimTime last_route_change = 0;

  // Machine exports; byte-deterministic for a given run.
  std::string to_json() const;
  std::string to_csv() const;
};

// ---------------------------------------------------------------------------
// Actors

class Emulator;

// Facade handed to routing agents and traffic sources.
class EmuApi {
 public:
  explicit EmuApi(Emulator& emu) : emu_(emu) {}

  SimTime now() const;
  const topo::Network& network() const;
  void schedule(SimTime t, std::function<void()> fn);

  // Inject an application packet at src (routed hop by hop to dst).
  void send_data(int flow_id, NodeId src, NodeId dst, PacketKind kind,
                 int size_bytes, std::uint32_t app_seq, bool tcp_is_ack = false);

  // One copy per out-link passing the PHY at transmit time. Requires the
  // broadcast capability.
  void broadcast_control(NodeId origin, PacketKind kind, int size_bytes,
                         std::variant<std::monostate, HelloPayload, LsaPayload> payload);

  // Install a protocol's table snapshot for a node; the merged best table
  // swaps atomically at this event boundary.
  void install_table(NodeId node, ProtocolKind proto, routing::RouteTable table);

  // True graph view: is the directed link currently passing the PHY?
  bool link_live(const topo::Link& link) const;

 private:
  Emulator& emu_;
};

class RoutingAgent {
 public:
  virtual ~RoutingAgent() = default;
  virtual void start(EmuApi& api) = 0;
  virtual void on_control(EmuApi& api, NodeId at, const Packet& pkt) {}
  virtual void on_link_event(EmuApi& api, const events::LinkEvent& ev) {}
};

class FlowSource {
 public:
  virtual ~FlowSource() = default;
  virtual void start(EmuApi& api) = 0;
  virtual void on_tcp_ack(EmuApi& api, std::uint32_t seq, SimTime t) {}
};

// ---------------------------------------------------------------------------
// The deterministic event loop

struct EmulatorConfig {
  int duration_s = 0;
  std::uint64_t seed = 0;
  double monitoring_period_s = 1.0;
};

class Emulator {
 public:
  Emulator(const topo::Network& net, events::EventLog eventlog,
           EmulatorConfig config);
  ~Emulator();

  Emulator(const Emulator&) = delete;
  Emulator& operator=(const Emulator&) = delete;

  void add_agent(std::unique_ptr<RoutingAgent> agent);
  void add_flow(int flow_id, std::unique_ptr<FlowSource> source);

  // Process everything up to the configured duration and collect results.
  RunTrace run();

 private:
  friend class EmuApi;
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace menes::emu
