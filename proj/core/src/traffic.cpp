#include "menes/traffic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <set>

#include <nlohmann/json.hpp>

#include "menes/strfmt.hpp"

namespace menes::traffic {

using json = nlohmann::ordered_json;

namespace {

constexpr int kAckBytes = 40;
constexpr int kTcpWindow = 8;
constexpr SimTime kInitialRttEstimate = 200'000;

// Periodic/stochastic unidirectional sender (mgen pattern or iperf UDP
// offered load). Gaps below 1 us are floored so a degenerate pattern
// cannot stall the clock.
class PatternSender : public emu::FlowSource {
 public:
  PatternSender(int flow_id, TrafficRule rule, std::uint64_t seed,
                emu::PacketKind kind)
      : flow_id_(flow_id),
        rule_(std::move(rule)),
        kind_(kind),
        rng_(seed, "flow/" + std::to_string(flow_id)) {}

  void start(emu::EmuApi& api) override {
    stop_ = us_from_s(rule_.stop_s);
    emu::EmuApi owned = api;
    api.schedule(us_from_s(rule_.start_s),
                 [this, owned]() mutable { tick(owned); });
  }

 private:
  void tick(emu::EmuApi api) {
    if (api.now() >= stop_) return;
    api.send_data(flow_id_, rule_.src, rule_.dst, kind_, rule_.packet_size,
                  seq_++);
    SimTime gap = std::max<SimTime>(1, us_from_s(sample_gap(rule_.interarrival, rng_)));
    SimTime next = api.now() + gap;
    if (next < stop_) {
      api.schedule(next, [this, api]() mutable { tick(api); });
    }
  }

  int flow_id_;
  TrafficRule rule_;
  emu::PacketKind kind_;
  RngStream rng_;
  std::uint32_t seq_ = 0;
  SimTime stop_ = 0;
};

// Stop-and-wait window: at most W unacked segments, per-segment acks,
// retransmit on a 2x smoothed-RTT timeout.
class TcpSource : public emu::FlowSource {
 public:
  TcpSource(int flow_id, TrafficRule rule, std::uint64_t seed, bool continuous)
      : flow_id_(flow_id),
        rule_(std::move(rule)),
        continuous_(continuous),
        rng_(seed, "flow/" + std::to_string(flow_id)) {}

  void start(emu::EmuApi& api) override {
    stop_ = us_from_s(rule_.stop_s);
    emu::EmuApi owned = api;
    api.schedule(us_from_s(rule_.start_s),
                 [this, owned]() mutable { begin(owned); });
  }

  void on_tcp_ack(emu::EmuApi& api, std::uint32_t seq, SimTime t) override {
    auto it = unacked_.find(seq);
    if (it == unacked_.end()) return;
    if (!retransmitted_.count(seq)) {
      SimTime sample = t - it->second;
      rtt_est_ = (7 * rtt_est_ + sample) / 8;
    }
    unacked_.erase(it);
    drain(api);
  }

 private:
  void begin(emu::EmuApi api) {
    if (continuous_) {
      backlog_ = std::numeric_limits<std::uint64_t>::max();
      drain(api);
    } else {
      pattern_tick(api);
    }
  }

  void pattern_tick(emu::EmuApi api) {
    if (api.now() >= stop_) return;
    ++backlog_;
    drain(api);
    SimTime gap = std::max<SimTime>(1, us_from_s(sample_gap(rule_.interarrival, rng_)));
    SimTime next = api.now() + gap;
    if (next < stop_) {
      api.schedule(next, [this, api]() mutable { pattern_tick(api); });
    }
  }

  void drain(emu::EmuApi& api) {
    while (backlog_ > 0 && unacked_.size() < kTcpWindow && api.now() < stop_) {
      if (backlog_ != std::numeric_limits<std::uint64_t>::max()) --backlog_;
      std::uint32_t seq = next_seq_++;
      transmit(api, seq);
    }
  }

  void transmit(emu::EmuApi& api, std::uint32_t seq) {
    unacked_[seq] = api.now();
    api.send_data(flow_id_, rule_.src, rule_.dst,
                  emu::PacketKind::data_tcp_segment, rule_.packet_size, seq);
    arm_retransmit(api, seq);
  }

  void arm_retransmit(emu::EmuApi& api, std::uint32_t seq) {
    SimTime deadline = api.now() + 2 * rtt_est_;
    api.schedule(deadline, [this, api, seq]() mutable {
      if (!unacked_.count(seq) || api.now() >= stop_) return;
      retransmitted_.insert(seq);
      unacked_[seq] = api.now();
      api.send_data(flow_id_, rule_.src, rule_.dst,
                    emu::PacketKind::data_tcp_segment, rule_.packet_size, seq);
      arm_retransmit(api, seq);
    });
  }

  int flow_id_;
  TrafficRule rule_;
  bool continuous_;
  RngStream rng_;
  SimTime stop_ = 0;
  std::uint32_t next_seq_ = 0;
  std::uint64_t backlog_ = 0;
  std::map<std::uint32_t, SimTime> unacked_;  // seq -> last tx time
  std::set<std::uint32_t> retransmitted_;
  SimTime rtt_est_ = kInitialRttEstimate;
};

}  // namespace

std::vector<std::unique_ptr<emu::FlowSource>> make_flow_sources(
    const std::vector<TrafficRule>& rules, std::uint64_t seed) {
  std::vector<std::unique_ptr<emu::FlowSource>> sources;
  for (size_t i = 0; i < rules.size(); ++i) {
    const auto& rule = rules[i];
    int id = static_cast<int>(i);
    if (rule.app == TrafficApp::ping) {
      sources.push_back(std::make_unique<PatternSender>(
          id, rule, seed, emu::PacketKind::icmp_echo));
    } else if (rule.transport == Transport::tcp) {
      sources.push_back(std::make_unique<TcpSource>(
          id, rule, seed, rule.app == TrafficApp::iperf));
    } else {
      sources.push_back(std::make_unique<PatternSender>(
          id, rule, seed, emu::PacketKind::data_udp));
    }
  }
  return sources;
}

std::vector<FlowRecord> collect_flows(const emu::RunTrace& trace,
                                      const std::vector<TrafficRule>& rules) {
  std::vector<FlowRecord> records(rules.size());
  for (size_t i = 0; i < rules.size(); ++i) {
    records[i].flow_id = static_cast<int>(i);
    records[i].rule = rules[i];
    auto tcp = trace.tcp_stats.find(static_cast<int>(i));
    if (tcp != trace.tcp_stats.end()) records[i].acked_bytes = tcp->second.acked_bytes;
  }
  for (const auto& entry : trace.packet_log) {
    if (entry.flow_id < 0 || entry.flow_id >= static_cast<int>(records.size()))
      continue;
    auto& rec = records[entry.flow_id];
    PacketSample sample;
    sample.packet_id = entry.packet_id;
    sample.sent_s = s_from_us(entry.sent);
    if (entry.recv) sample.recv_s = s_from_us(*entry.recv);
    sample.drop = entry.drop;
    sample.size_bytes = entry.size_bytes;
    rec.offered_bytes += entry.size_bytes;
    rec.packets.push_back(sample);
  }
  return records;
}

std::optional<double> compute_jitter(const std::vector<double>& latencies_s) {
  if (latencies_s.size() < 2) return std::nullopt;
  double total = 0.0;
  for (size_t i = 1; i < latencies_s.size(); ++i) {
    total += std::abs(latencies_s[i] - latencies_s[i - 1]);
  }
  return total / static_cast<double>(latencies_s.size() - 1);
}

MetricSummary summarize(const FlowRecord& record, double warmup_s) {
  MetricSummary s;
  s.flow_id = record.flow_id;
  s.src = record.rule.src;
  s.dst = record.rule.dst;
  s.app = record.rule.app;
  s.sent = record.packets.size();

  double window_begin = record.rule.start_s + warmup_s;
  double window_end = record.rule.stop_s;
  if (window_begin >= window_end) window_begin = record.rule.start_s;
  double window = window_end - window_begin;

  std::vector<double> latencies;
  std::uint64_t window_bits = 0;
  for (const auto& p : record.packets) {
    if (!p.recv_s) continue;
    ++s.delivered;
    latencies.push_back(*p.recv_s - p.sent_s);
    if (*p.recv_s >= window_begin && *p.recv_s <= window_end) {
      window_bits += 8ull * p.size_bytes;
    }
  }
  s.loss_rate = s.sent == 0
                    ? 0.0
                    : static_cast<double>(s.sent - s.delivered) /
                          static_cast<double>(s.sent);
  s.throughput_bps = window > 0 ? static_cast<double>(window_bits) / window : 0.0;

  if (!latencies.empty()) {
    double total = 0.0;
    for (double v : latencies) total += v;
    s.mean_latency_s = total / static_cast<double>(latencies.size());
    std::vector<double> sorted = latencies;
    std::sort(sorted.begin(), sorted.end());
    size_t rank = static_cast<size_t>(
        std::ceil(0.95 * static_cast<double>(sorted.size())));
    s.p95_latency_s = sorted[rank == 0 ? 0 : rank - 1];
    if (record.rule.app == TrafficApp::ping) {
      RttStats rtt;
      rtt.min_s = sorted.front();
      rtt.max_s = sorted.back();
      rtt.mean_s = s.mean_latency_s;
      s.rtt = rtt;
    }
  }
  s.jitter_s = compute_jitter(latencies);
  return s;
}

std::string summaries_csv(const std::vector<MetricSummary>& summaries) {
  std::string out =
      "flow_id,src,dst,app,sent,delivered,loss_rate,throughput_bps,"
      "mean_latency_s,p95_latency_s,jitter_s\n";
  for (const auto& s : summaries) {
    out += std::to_string(s.flow_id) + ',';
    out += std::to_string(s.src) + ',';
    out += std::to_string(s.dst) + ',';
    out += std::string(traffic_app_name(s.app)) + ',';
    out += std::to_string(s.sent) + ',';
    out += std::to_string(s.delivered) + ',';
    out += fmt_double(s.loss_rate) + ',';
    out += fmt_double(s.throughput_bps) + ',';
    out += fmt_double(s.mean_latency_s) + ',';
    out += fmt_double(s.p95_latency_s) + ',';
    if (s.jitter_s) out += fmt_double(*s.jitter_s);
    out += '\n';
  }
  return out;
}

std::string summaries_json(const std::vector<MetricSummary>& summaries) {
  json arr = json::array();
  for (const auto& s : summaries) {
    json e;
    e["flow_id"] = s.flow_id;
    e["src"] = s.src;
    e["dst"] = s.dst;
    e["app"] = std::string(traffic_app_name(s.app));
    e["sent"] = s.sent;
    e["delivered"] = s.delivered;
    e["loss_rate"] = s.loss_rate;
    e["throughput_bps"] = s.throughput_bps;
    e["mean_latency_s"] = s.mean_latency_s;
    e["p95_latency_s"] = s.p95_latency_s;
    if (s.jitter_s) e["jitter_s"] = *s.jitter_s;
    if (s.rtt) {
      e["rtt"] = {{"min_s", s.rtt->min_s},
                  {"mean_s", s.rtt->mean_s},
                  {"max_s", s.rtt->max_s}};
    }
    arr.push_back(std::move(e));
  }
  return arr.dump(2) + "\n";
}

}  // namespace menes::traffic
