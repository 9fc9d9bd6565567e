#include <benchmark/benchmark.h>

#include "menes/config.hpp"
#include "menes/emucore.hpp"
#include "menes/linkevents.hpp"
#include "menes/protocols.hpp"
#include "menes/routing.hpp"
#include "menes/sha256.hpp"
#include "menes/traffic.hpp"

using namespace menes;

namespace {

topo::Network random_net(std::uint32_t n, double p, std::uint64_t seed) {
  TopologySpec spec;
  spec.structure = Structure::random;
  spec.random_p = p;
  RngStream rng(seed, "bench/topology");
  return topo::build(spec, n, {LinkRule{}}, rng);
}

void BM_Spf(benchmark::State& state) {
  auto net = random_net(static_cast<std::uint32_t>(state.range(0)), 0.2, 42);
  std::vector<std::pair<NodeId, NodeId>> edges;
  for (const auto& l : net.links()) edges.push_back({l.src, l.dst});
  for (auto _ : state) {
    auto table = routing::spf(edges, 0, net.node_count(), net,
                              ProtocolKind::static_route, 1);
    benchmark::DoNotOptimize(table);
  }
}
BENCHMARK(BM_Spf)->Arg(30)->Arg(100)->Arg(300);

void BM_CentralizedCompute(benchmark::State& state) {
  auto net = random_net(static_cast<std::uint32_t>(state.range(0)), 0.2, 42);
  for (auto _ : state) {
    auto tables = routing::centralized_compute(net);
    benchmark::DoNotOptimize(tables);
  }
}
BENCHMARK(BM_CentralizedCompute)->Arg(30)->Arg(100);

void BM_EmulatorUdp(benchmark::State& state) {
  // 2-node link saturated with UDP; reports packets/second of wall time
  std::vector<topo::Link> links;
  LinkParams p;
  p.capacity_bps = 100e6;
  p.mac.datarate_bps = 100e6;
  links.push_back({0, 0, 1, p});
  links.push_back({0, 1, 0, p});
  topo::Network net(2, std::move(links));
  TrafficRule rule;
  rule.src = 0;
  rule.dst = 1;
  rule.app = TrafficApp::mgen;
  rule.transport = Transport::udp;
  rule.interarrival = DistSpec::interval(0.0001);
  rule.packet_size = 1000;
  rule.start_s = 0;
  rule.stop_s = 10;
  std::uint64_t packets = 0;
  for (auto _ : state) {
    emu::Emulator emulator(net, {}, emu::EmulatorConfig{10, 1, 1.0});
    for (auto& a : routing::make_agents({RoutingRule{}}, 2))
      emulator.add_agent(std::move(a));
    auto sources = traffic::make_flow_sources({rule}, 1);
    emulator.add_flow(0, std::move(sources[0]));
    auto trace = emulator.run();
    packets += trace.counters.sent;
    benchmark::DoNotOptimize(trace);
  }
  state.counters["pkts/s"] =
      benchmark::Counter(static_cast<double>(packets), benchmark::Counter::kIsRate);
}
BENCHMARK(BM_EmulatorUdp)->Unit(benchmark::kMillisecond);

void BM_LinkStateConvergence(benchmark::State& state) {
  auto net = random_net(static_cast<std::uint32_t>(state.range(0)), 0.3, 7);
  RoutingRule rule;
  rule.protocol = ProtocolKind::olsr_like;
  for (auto _ : state) {
    emu::Emulator emulator(net, {}, emu::EmulatorConfig{10, 1, 1.0});
    for (auto& a : routing::make_agents({rule}, net.node_count()))
      emulator.add_agent(std::move(a));
    auto trace = emulator.run();
    benchmark::DoNotOptimize(trace);
  }
}
BENCHMARK(BM_LinkStateConvergence)->Arg(10)->Arg(20)->Unit(benchmark::kMillisecond);

const char* kDoc =
    "duration: 60\nseed: 1\ntopology:\n  num_nodes: 30\n  structure: random\n"
    "  random_p: 0.25\ntraffic:\n  - src: 0\n    dst: 5\n    app: ping\n";

void BM_ParseExpand(benchmark::State& state) {
  std::string text(kDoc);
  for (auto _ : state) {
    auto scenario = config::expand(config::parse(text));
    benchmark::DoNotOptimize(scenario);
  }
}
BENCHMARK(BM_ParseExpand);

void BM_GenerateEvents(benchmark::State& state) {
  auto net = random_net(20, 0.3, 3);
  LinkRule rule;
  rule.event_dist = DistSpec::exponential(1.0);
  rule.pathloss_dist = DistSpec::uniform(80, 120);
  for (auto _ : state) {
    auto log = events::generate_events({rule}, net, 100, 11);
    benchmark::DoNotOptimize(log);
  }
}
BENCHMARK(BM_GenerateEvents);

void BM_Sha256(benchmark::State& state) {
  std::string data(static_cast<size_t>(state.range(0)), 'x');
  for (auto _ : state) {
    benchmark::DoNotOptimize(sha256_hex(data));
  }
  state.SetBytesProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Sha256)->Arg(1024)->Arg(65536);

}  // namespace

BENCHMARK_MAIN();
