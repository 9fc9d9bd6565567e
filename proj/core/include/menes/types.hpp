#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace menes {

using NodeId = std::uint32_t;
using LinkId = std::uint32_t;

// Simulation time in microseconds from scenario start.
using SimTime = std::int64_t;
inline constexpr SimTime kUsPerSec = 1'000'000;

SimTime us_from_s(double seconds);
double s_from_us(SimTime t);

// Node addresses are labels derived from the index; there is no real IP
// stack behind them. Node i gets data address 10.100.0.(i+1) (spilling into
// the third octet past 254) and a management address on 10.200.0.0/16.
std::string data_address(NodeId node);
std::string mgmt_address(NodeId node);

enum class MacKind { rf_pipe, csma, tdma };
std::string_view mac_kind_name(MacKind kind);

// 802.11 rate classes used by the automatic MAC translation.
bool is_80211b_rate(double bps);
bool is_80211g_rate(double bps);

// "802.11b", "802.11g", or "rf-pipe" for anything off the rate tables.
std::string_view rate_class_name(double bps);

// Resolved per-link MAC configuration. Which fields are meaningful depends
// on kind; datarate_bps and queue_limit apply to all.
struct MacConfig {
  MacKind kind = MacKind::rf_pipe;
  double datarate_bps = 54e6;
  int queue_limit = 100;
  double fixed_delay_s = 0.0;        // rf-pipe
  double slot_len_s = 0.0;           // tdma
  int slots_per_frame = 0;           // tdma
  std::vector<int> owned_slots;      // tdma, slots this transmitter may use

  bool operator==(const MacConfig&) const = default;
};

// The weight record attached to each directed link.
struct LinkParams {
  double capacity_bps = 54e6;
  double prop_delay_s = 0.001;
  double initial_pathloss_db = 80.0;
  double rx_threshold_db = 100.0;
  MacConfig mac;

  bool operator==(const LinkParams&) const = default;
};

// Per-node resource proxy taken every monitoring period: cpu_proxy counts
// packet-handling events in the period, mem_proxy is bytes currently queued
// across the node's MAC queues.
struct ResourceSample {
  double t_s = 0.0;
  NodeId node = 0;
  std::uint64_t cpu_proxy = 0;
  std::uint64_t mem_proxy = 0;
};

}  // namespace menes
