#include <doctest.h>

#include <cmath>

#include "menes/protocols.hpp"
#include "menes/traffic.hpp"
#include "test_util.hpp"

using namespace menes;

TEST_SUITE_BEGIN("traffic");

namespace {

TrafficRule rule_of(TrafficApp app, Transport transport, NodeId src, NodeId dst,
                    DistSpec gap, int size, double start, double stop) {
  TrafficRule r;
  r.src = src;
  r.dst = dst;
  r.app = app;
  r.transport = transport;
  r.interarrival = gap;
  r.packet_size = size;
  r.start_s = start;
  r.stop_s = stop;
  return r;
}

emu::RunTrace run_flows(const topo::Network& net,
                        const std::vector<TrafficRule>& flows, int duration_s,
                        std::uint64_t seed = 1) {
  emu::Emulator emulator(net, {}, emu::EmulatorConfig{duration_s, seed, 1.0});
  for (auto& a : routing::make_agents({RoutingRule{}}, net.node_count()))
    emulator.add_agent(std::move(a));
  auto sources = traffic::make_flow_sources(flows, seed);
  for (size_t i = 0; i < sources.size(); ++i)
    emulator.add_flow(static_cast<int>(i), std::move(sources[i]));
  return emulator.run();
}

}  // namespace

TEST_CASE("ping: RTT series matches the closed form, 10 echoes in 10s") {
  auto net = testutil::line_network(2, 1e6, 0.001);
  auto flows = std::vector<TrafficRule>{
      rule_of(TrafficApp::ping, Transport::icmp, 0, 1, DistSpec::interval(1.0),
              125, 0, 10)};
  auto trace = run_flows(net, flows, 10);
  auto records = traffic::collect_flows(trace, flows);
  REQUIRE(records.size() == 1);
  CHECK(records[0].packets.size() == 10);
  auto summary = traffic::summarize(records[0], 0.0);
  CHECK(summary.sent == 10);
  CHECK(summary.delivered == 10);
  CHECK(summary.loss_rate == 0.0);
  REQUIRE(summary.rtt.has_value());
  CHECK(summary.rtt->mean_s == doctest::Approx(0.004).epsilon(1e-9));
  CHECK(summary.rtt->max_s - summary.rtt->min_s < 1e-12);  // constant series
  // rtt is bounded below by twice the propagation delay
  CHECK(summary.rtt->min_s >= 2 * 0.001);
}

TEST_CASE("ping over a partitioned pair loses everything") {
  topo::Network net(2, {});
  auto flows = std::vector<TrafficRule>{
      rule_of(TrafficApp::ping, Transport::icmp, 0, 1, DistSpec::interval(1.0),
              64, 0, 5)};
  auto records = traffic::collect_flows(run_flows(net, flows, 5), flows);
  auto summary = traffic::summarize(records[0], 0.0);
  CHECK(summary.sent == 5);
  CHECK(summary.delivered == 0);
  CHECK(summary.loss_rate == 1.0);
  CHECK(summary.throughput_bps == 0.0);
  CHECK(!summary.jitter_s.has_value());
}

TEST_CASE("udp under the capacity measures the offered rate") {
  // offered 2 Mbit/s over a 10 Mbit/s path
  auto net = testutil::line_network(2, 10e6, 0.001);
  auto flows = std::vector<TrafficRule>{
      rule_of(TrafficApp::iperf, Transport::udp, 0, 1, DistSpec::interval(0.005),
              1250, 0, 10)};
  auto records = traffic::collect_flows(run_flows(net, flows, 10), flows);
  auto summary = traffic::summarize(records[0]);  // 1s warm-up default
  CHECK(summary.throughput_bps == doctest::Approx(2e6).epsilon(0.05));
  CHECK(summary.loss_rate == 0.0);
}

TEST_CASE("udp over the capacity saturates at the bottleneck") {
  // offered 20 Mbit/s over a 10 Mbit/s link
  auto net = testutil::line_network(2, 10e6, 0.001);
  auto flows = std::vector<TrafficRule>{
      rule_of(TrafficApp::iperf, Transport::udp, 0, 1, DistSpec::interval(0.0005),
              1250, 0, 10)};
  auto records = traffic::collect_flows(run_flows(net, flows, 10), flows);
  auto summary = traffic::summarize(records[0]);
  CHECK(summary.throughput_bps == doctest::Approx(10e6).epsilon(0.05));
  CHECK(summary.loss_rate == doctest::Approx(0.5).epsilon(0.06));
}

TEST_CASE("tcp safety: acked bytes never exceed offered, goodput positive") {
  auto net = testutil::line_network(3, 5e6, 0.002);
  auto flows = std::vector<TrafficRule>{
      rule_of(TrafficApp::iperf, Transport::tcp, 0, 2, DistSpec::interval(1.0),
              1000, 0, 10)};
  auto trace = run_flows(net, flows, 10);
  auto records = traffic::collect_flows(trace, flows);
  CHECK(records[0].acked_bytes > 0);
  CHECK(records[0].acked_bytes <= records[0].offered_bytes);
  auto summary = traffic::summarize(records[0]);
  CHECK(summary.throughput_bps > 0.0);
}

TEST_CASE("tcp retransmits through a lossy window") {
  auto net = testutil::line_network(2, 1e6, 0.001);
  events::EventLog log;
  log.events.push_back(events::LinkEvent{us_from_s(2.0), 0, 1, 140.0});
  log.events.push_back(events::LinkEvent{us_from_s(4.0), 0, 1, 80.0});
  emu::Emulator emulator(net, log, emu::EmulatorConfig{10, 1, 1.0});
  for (auto& a : routing::make_agents({RoutingRule{}}, 2))
    emulator.add_agent(std::move(a));
  auto flows = std::vector<TrafficRule>{
      rule_of(TrafficApp::iperf, Transport::tcp, 0, 1, DistSpec::interval(1.0),
              500, 0, 10)};
  auto sources = traffic::make_flow_sources(flows, 1);
  emulator.add_flow(0, std::move(sources[0]));
  auto trace = emulator.run();
  CHECK(trace.tcp_stats.at(0).retransmits > 0);
  auto records = traffic::collect_flows(trace, flows);
  CHECK(records[0].acked_bytes <= records[0].offered_bytes);
  CHECK(records[0].acked_bytes > 0);  // recovers after the link comes back
}

TEST_CASE("mgen patterns") {
  auto net = testutil::line_network(2, 10e6, 0.0001);

  SUBCASE("interval(0.1) over one second sends exactly 10 packets") {
    auto flows = std::vector<TrafficRule>{
        rule_of(TrafficApp::mgen, Transport::udp, 0, 1, DistSpec::interval(0.1),
                200, 0, 1)};
    auto records = traffic::collect_flows(run_flows(net, flows, 2), flows);
    CHECK(records[0].packets.size() == 10);
  }

  SUBCASE("poisson(100) over 10s lands within 3 sigma of 1000") {
    auto flows = std::vector<TrafficRule>{
        rule_of(TrafficApp::mgen, Transport::udp, 0, 1,
                DistSpec::poisson(100.0), 200, 0, 10)};
    auto records = traffic::collect_flows(run_flows(net, flows, 10), flows);
    double n = static_cast<double>(records[0].packets.size());
    CHECK(std::abs(n - 1000.0) <= 3.0 * std::sqrt(1000.0));
  }

  SUBCASE("uniform gaps have the expected mean") {
    auto flows = std::vector<TrafficRule>{
        rule_of(TrafficApp::mgen, Transport::udp, 0, 1,
                DistSpec::uniform(0.0, 0.01), 100, 0, 30)};
    auto records = traffic::collect_flows(run_flows(net, flows, 30), flows);
    double n = static_cast<double>(records[0].packets.size());
    double mean_gap = 30.0 / n;
    CHECK(mean_gap == doctest::Approx(0.005).epsilon(0.05));
  }
}

TEST_CASE("jitter arithmetic") {
  CHECK(traffic::compute_jitter({0.010, 0.010, 0.010}) == doctest::Approx(0.0));
  CHECK(traffic::compute_jitter({0.010, 0.020, 0.010, 0.020}) ==
        doctest::Approx(0.010));
  CHECK(!traffic::compute_jitter({0.010}).has_value());
  CHECK(!traffic::compute_jitter({}).has_value());

  SUBCASE("invariant under constant shifts") {
    std::vector<double> base{0.01, 0.013, 0.009, 0.02};
    std::vector<double> shifted;
    for (double v : base) shifted.push_back(v + 0.5);
    CHECK(*traffic::compute_jitter(base) ==
          doctest::Approx(*traffic::compute_jitter(shifted)));
  }
}

TEST_CASE("summarize arithmetic on a synthetic record") {
  traffic::FlowRecord rec;
  rec.flow_id = 0;
  rec.rule = rule_of(TrafficApp::mgen, Transport::udp, 0, 1,
                     DistSpec::interval(0.01), 1250, 0, 10);
  for (int i = 0; i < 1000; ++i) {
    traffic::PacketSample p;
    p.packet_id = i;
    p.sent_s = i * 0.01;
    p.recv_s = p.sent_s + 0.002;
    p.size_bytes = 1250;
    rec.packets.push_back(p);
    rec.offered_bytes += 1250;
  }
  auto s = traffic::summarize(rec, 0.0);
  CHECK(s.sent == 1000);
  CHECK(s.delivered == 1000);
  CHECK(s.loss_rate == 0.0);
  CHECK(s.throughput_bps == doctest::Approx(1e6));  // 1000 x 1250B over 10s
  CHECK(s.mean_latency_s == doctest::Approx(0.002));
  CHECK(s.p95_latency_s == doctest::Approx(0.002));
  CHECK(*s.jitter_s == doctest::Approx(0.0));

  SUBCASE("all dropped") {
    for (auto& p : rec.packets) {
      p.recv_s.reset();
      p.drop = emu::DropReason::phy;
    }
    auto dropped = traffic::summarize(rec, 0.0);
    CHECK(dropped.loss_rate == 1.0);
    CHECK(dropped.throughput_bps == 0.0);
    CHECK(dropped.delivered == 0);
  }
}

TEST_CASE("loss rate plus delivered fraction is exactly one") {
  auto net = testutil::line_network(2, 1e6, 0.001);
  events::EventLog log;
  log.events.push_back(events::LinkEvent{us_from_s(3.0), 0, 1, 130.0});
  auto flows = std::vector<TrafficRule>{
      rule_of(TrafficApp::mgen, Transport::udp, 0, 1, DistSpec::interval(0.5),
              400, 0, 10)};
  emu::Emulator emulator(net, log, emu::EmulatorConfig{10, 1, 1.0});
  for (auto& a : routing::make_agents({RoutingRule{}}, 2))
    emulator.add_agent(std::move(a));
  auto sources = traffic::make_flow_sources(flows, 1);
  emulator.add_flow(0, std::move(sources[0]));
  auto records = traffic::collect_flows(emulator.run(), flows);
  auto s = traffic::summarize(records[0], 0.0);
  double delivered_fraction =
      static_cast<double>(s.delivered) / static_cast<double>(s.sent);
  CHECK(s.loss_rate + delivered_fraction == 1.0);
}

TEST_CASE("csv and json exports carry the spec'd columns") {
  traffic::MetricSummary s;
  s.flow_id = 0;
  s.src = 0;
  s.dst = 1;
  s.app = TrafficApp::iperf;
  s.sent = 10;
  s.delivered = 9;
  s.loss_rate = 0.1;
  s.throughput_bps = 2e6;
  s.mean_latency_s = 0.01;
  s.p95_latency_s = 0.02;
  s.jitter_s = 0.001;
  auto csv = traffic::summaries_csv({s});
  CHECK(csv.find("flow_id,src,dst,app,sent,delivered,loss_rate,throughput_bps,"
                 "mean_latency_s,p95_latency_s,jitter_s") == 0);
  CHECK(csv.find("0,0,1,iperf,10,9,0.1,2e+06,0.01,0.02,0.001") !=
        std::string::npos);
  auto json = traffic::summaries_json({s});
  CHECK(json.find("\"throughput_bps\": 2000000.0") != std::string::npos);
}

TEST_SUITE_END();
