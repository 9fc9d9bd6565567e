#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "menes/emucore.hpp"
#include "menes/scenario.hpp"

namespace menes::traffic {

struct PacketSample {
  std::uint64_t packet_id = 0;
  double sent_s = 0.0;
  std::optional<double> recv_s;
  std::optional<emu::DropReason> drop;
  int size_bytes = 0;
};

struct FlowRecord {
  int flow_id = -1;
  TrafficRule rule;
  std::vector<PacketSample> packets;
  std::uint64_t offered_bytes = 0;
  std::uint64_t acked_bytes = 0;  // tcp mode
};

struct RttStats {
  double min_s = 0.0;
  double mean_s = 0.0;
  double max_s = 0.0;
};

struct MetricSummary {
  int flow_id = -1;
  NodeId src = 0;
  NodeId dst = 0;
  TrafficApp app = TrafficApp::mgen;
  std::uint64_t sent = 0;
  std::uint64_t delivered = 0;
  double loss_rate = 0.0;
  double throughput_bps = 0.0;
  double mean_latency_s = 0.0;
  double p95_latency_s = 0.0;
  std::optional<double> jitter_s;     // absent below 2 deliveries
  std::optional<RttStats> rtt;        // ping flows
};

// Traffic generators driven by the emulator loop. flow_id is the rule's
// index in the scenario's traffic list.
std::vector<std::unique_ptr<emu::FlowSource>> make_flow_sources(
    const std::vector<TrafficRule>& rules, std::uint64_t seed);

// Group a run's packet log back into per-flow records.
std::vector<FlowRecord> collect_flows(const emu::RunTrace& trace,
                                      const std::vector<TrafficRule>& rules);

// Mean absolute difference of consecutive one-way latencies; absent below
// two deliveries.
std::optional<double> compute_jitter(const std::vector<double>& latencies_s);

// Aggregate one flow over [start + warmup, stop]. For ping flows the
// latency series is the RTT series.
MetricSummary summarize(const FlowRecord& record, double warmup_s = 1.0);

std::string summaries_csv(const std::vector<MetricSummary>& summaries);
std::string summaries_json(const std::vector<MetricSummary>& summaries);

}  // namespace menes::traffic
