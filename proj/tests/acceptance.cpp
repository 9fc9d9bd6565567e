// Acceptance suite: one line per criterion, nonzero exit if any fails.

#include <sys/wait.h>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "menes/config.hpp"
#include "menes/emucore.hpp"
#include "menes/linkevents.hpp"
#include "menes/orchestrator.hpp"
#include "menes/protocols.hpp"
#include "menes/routing.hpp"
#include "menes/traffic.hpp"
#include "oracles.hpp"
#include "test_util.hpp"

using namespace menes;
namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

namespace {

int g_failures = 0;

struct CheckFailed {
  std::string message;
};

void require(bool cond, const std::string& message) {
  if (!cond) throw CheckFailed{message};
}

void require_near(double actual, double expected, double rel,
                  const std::string& what) {
  double denom = std::max(std::abs(expected), 1e-300);
  if (std::abs(actual - expected) / denom > rel) {
    throw CheckFailed{what + ": got " + std::to_string(actual) + ", want " +
                      std::to_string(expected) + " within " +
                      std::to_string(rel * 100) + "%"};
  }
}

void criterion(int number, const std::string& name,
               const std::function<void()>& body) {
  try {
    body();
    std::printf("[PASS] criterion %2d: %s\n", number, name.c_str());
  } catch (const CheckFailed& f) {
    std::printf("[FAIL] criterion %2d: %s -- %s\n", number, name.c_str(),
                f.message.c_str());
    ++g_failures;
  } catch (const std::exception& e) {
    std::printf("[FAIL] criterion %2d: %s -- exception: %s\n", number,
                name.c_str(), e.what());
    ++g_failures;
  }
  std::fflush(stdout);
}

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

void check_conservation(const emu::Counters& c, const std::string& where) {
  require(c.sent == c.delivered + c.dropped_total() + c.in_flight_at_end,
          "conservation identity violated in " + where);
}

std::map<std::string, std::map<int, int>> parse_hosts_csv(const std::string& text) {
  std::map<std::string, std::map<int, int>> table;  // model -> n -> hosts
  std::istringstream in(text);
  std::string line;
  std::getline(in, line);  // header
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    auto c1 = line.find(',');
    auto c2 = line.find(',', c1 + 1);
    int n = std::stoi(line.substr(0, c1));
    std::string model = line.substr(c1 + 1, c2 - c1 - 1);
    int hosts = std::stoi(line.substr(c2 + 1));
    table[model][n] = hosts;
  }
  return table;
}

}  // namespace

int main() {
  const auto ceil_div = [](int a, int b) { return (a + b - 1) / b; };

  // 1. Host-scaling reproduction via the sweep subcommand.
  criterion(1, "host scaling: sweep matches the capacity formulas", [&] {
    auto dir = testutil::temp_dir("acc-sweep");
    std::string cmd =
        std::string(MENES_BIN) +
        " sweep --nodes 50:1000:50"
        " --models private-cloud,container-per-core,container-dense --quiet"
        " --out " + dir.string() + " > /dev/null 2>&1";
    auto t0 = Clock::now();
    int status = std::system(cmd.c_str());
    double elapsed = seconds_since(t0);
    require(WIFEXITED(status) && WEXITSTATUS(status) == 0, "sweep failed");
    require(elapsed < 1.0, "sweep took " + std::to_string(elapsed) + "s");

    auto table = parse_hosts_csv(
        testutil::read_file((dir / "sweep_hosts.csv").string()));
    std::string ratio_violations;
    for (int n = 50; n <= 1000; n += 50) {
      require(table.at("private-cloud").at(n) == 6 + ceil_div(n, 24),
              "private-cloud at n=" + std::to_string(n));
      require(table.at("container-per-core").at(n) == ceil_div(n, 24),
              "container-per-core at n=" + std::to_string(n));
      require(table.at("container-dense").at(n) == ceil_div(n, 88),
              "container-dense at n=" + std::to_string(n));
      if (n >= 176) {
        double ratio = static_cast<double>(table.at("private-cloud").at(n)) /
                       table.at("container-dense").at(n);
        if (!(ratio >= 2.0 && ratio <= 5.5)) {
          ratio_violations += " n=" + std::to_string(n) + " ratio=" +
                              std::to_string(ratio);
        }
      }
    }
    fs::remove_all(dir);
    // The envelope cannot hold with these capacity constants:
    // (6 + ceil(250/24)) / ceil(250/88) = 17/3 = 5.67. Reported rather
    // than widened.
    require(ratio_violations.empty(),
            "host formulas exact for every n, but the [2, 5.5] ratio "
            "envelope is violated at:" + ratio_violations);
  });

  // 2. The 283-node plan.
  criterion(2, "283-node plan: 4 dense, 12 per-core, 18 private-cloud", [&] {
    auto dense = orch::plan_deployment(283, orch::HostModel::container_dense);
    auto percore = orch::plan_deployment(283, orch::HostModel::container_per_core);
    auto cloud = orch::plan_deployment(283, orch::HostModel::private_cloud);
    require(dense.hosts == 4, "dense hosts = " + std::to_string(dense.hosts));
    require(percore.hosts == 12, "per-core hosts = " + std::to_string(percore.hosts));
    require(cloud.hosts == 18, "private-cloud hosts = " + std::to_string(cloud.hosts));
    require(static_cast<double>(cloud.hosts) / dense.hosts == 4.5, "ratio != 4.5");
  });

  // 3. Cost ordering under identical per-host rates.
  criterion(3, "cost ordering: dense <= vm-per-core for every pricing", [&] {
    RngStream rng(424242, "acceptance/pricing");
    for (int trial = 0; trial < 25; ++trial) {
      orch::Pricing pricing;
      pricing.environment = (trial % 2) ? orch::Environment::in_house
                                        : orch::Environment::cloud;
      pricing.server_unit_usd = 20000.0 * rng.next_unit();
      pricing.cloud_vm_hourly_usd = 50.0 * rng.next_unit();
      pricing.mgmt_usd_per_host_month = 500.0 * rng.next_unit();
      double horizon = 36.0 * rng.next_unit();
      for (std::uint32_t n = 50; n <= 1000; n += 50) {
        auto dense = orch::plan_deployment(n, orch::HostModel::container_dense);
        auto vms = orch::plan_deployment(n, orch::HostModel::vm_per_core);
        double dense_total =
            orch::estimate_cost(dense, pricing, horizon).total_usd;
        double vm_total = orch::estimate_cost(vms, pricing, horizon).total_usd;
        require(dense_total <= vm_total, "ordering broke at n=" + std::to_string(n));
        if (dense.hosts == vms.hosts) {
          require(dense_total == vm_total,
                  "equal hosts but unequal totals at n=" + std::to_string(n));
        }
      }
    }
  });

  // 4. Bootstrap substitute: cold pipeline under a second, deterministic
  //    compile. (The published 123s-vs-29s cloud bootstrap comparison is
  //    not reproducible on a desk; plan.json carries those numbers as
  //    reference constants instead.)
  criterion(4, "30-node startup under 1s; compile is byte-deterministic", [&] {
    auto t0 = Clock::now();
    auto spec = config::parse_file(testutil::fixture("sample30.yaml"));
    auto scenario = config::expand(spec, std::string(MENES_FIXTURE_DIR));
    auto plan = orch::plan_deployment(scenario.node_count,
                                      orch::HostModel::container_dense);
    double elapsed = seconds_since(t0);
    require(plan.hosts == 1, "plan should fit one dense host");
    require(elapsed < 1.0,
            "parse+expand+build+plan took " + std::to_string(elapsed) + "s");

    auto bundle_a = orch::compile_external(scenario);
    auto bundle_b = orch::compile_external(scenario);
    require(bundle_a.manifest_json == bundle_b.manifest_json,
            "manifests differ between compiles");
    require(bundle_a.bundle_hash == bundle_b.bundle_hash, "bundle hash differs");
    require(bundle_a.files == bundle_b.files, "bundle contents differ");
  });

  // 5. Routing oracle over 200 random connected graphs.
  criterion(5, "spf equals exhaustive first-hop enumeration, 200 graphs", [&] {
    auto t0 = Clock::now();
    int mismatches = 0;
    for (int trial = 0; trial < 200; ++trial) {
      std::uint32_t n = 4 + static_cast<std::uint32_t>(trial % 7);  // 4..10
      double p = 0.3 + 0.05 * (trial % 5);
      auto net = testutil::random_connected(n, p, 31000 + trial * 211);
      std::vector<std::pair<NodeId, NodeId>> edges;
      for (const auto& l : net.links()) edges.push_back({l.src, l.dst});
      for (NodeId src = 0; src < n; ++src) {
        auto table = routing::spf(edges, src, n, net,
                                  ProtocolKind::static_route, 1);
        std::map<NodeId, NodeId> got;
        for (const auto& [dest, e] : table.entries) got[dest] = e.gateway;
        if (got != oracles::first_hops(net, src)) ++mismatches;
      }
    }
    require(mismatches == 0, std::to_string(mismatches) + " mismatching tables");
    double elapsed = seconds_since(t0);
    require(elapsed < 30.0, "oracle run took " + std::to_string(elapsed) + "s");
  });

  // 6. Link-state convergence matches the omniscient computation.
  criterion(6, "link-state converges in bound and matches centralized", [&] {
    auto net = testutil::random_connected(10, 0.35, 606060);
    int diameter = oracles::diameter(net);

    RoutingRule rule;
    rule.protocol = ProtocolKind::olsr_like;  // hello 2s, refresh 10s defaults
    emu::Emulator emulator(net, {}, emu::EmulatorConfig{30, 1, 1.0});
    for (auto& a : routing::make_agents({rule}, net.node_count()))
      emulator.add_agent(std::move(a));
    auto trace = emulator.run();
    check_conservation(trace.counters, "convergence run");

    // per-hop flood budget: LSA debounce + queueing + tx + prop
    const double flood_delay_s = 0.2;
    double bound = 2.0 * rule.hello_interval_s + diameter * flood_delay_s;
    double settled = s_from_us(trace.last_route_change);
    require(settled <= bound, "tables still changing at " +
                                  std::to_string(settled) + "s, bound " +
                                  std::to_string(bound) + "s");

    auto want = routing::centralized_compute(net);
    require(trace.final_tables.size() == net.node_count(), "missing tables");
    for (NodeId n = 0; n < net.node_count(); ++n) {
      const auto& got = trace.final_tables[n];
      require(got.entries.size() == want[n].entries.size(),
              "table size differs at node " + std::to_string(n));
      for (const auto& [dest, e] : want[n].entries) {
        auto it = got.entries.find(dest);
        require(it != got.entries.end(), "missing destination");
        require(it->second.gateway == e.gateway &&
                    it->second.out_port == e.out_port,
                "first hop differs at node " + std::to_string(n) +
                    " for dest " + std::to_string(dest));
      }
    }
  });

  // 7. Emulator physics.
  criterion(7, "ping RTT closed form, bottleneck throughput, conservation", [&] {
    // 125B at 1 Mbit/s (tx 1ms), prop 1ms, fixed 0.5ms
    auto net = testutil::line_network(2, 1e6, 0.001, 0.0005);
    emu::Emulator emulator(net, {}, emu::EmulatorConfig{10, 1, 1.0});
    for (auto& a : routing::make_agents({RoutingRule{}}, 2))
      emulator.add_agent(std::move(a));
    TrafficRule ping;
    ping.src = 0;
    ping.dst = 1;
    ping.app = TrafficApp::ping;
    ping.transport = Transport::icmp;
    ping.interarrival = DistSpec::interval(1.0);
    ping.packet_size = 125;
    ping.start_s = 0;
    ping.stop_s = 10;
    auto sources = traffic::make_flow_sources({ping}, 1);
    emulator.add_flow(0, std::move(sources[0]));
    auto trace = emulator.run();
    check_conservation(trace.counters, "ping run");
    const double expected_rtt = 2.0 * (0.001 + 0.001 + 0.0005);
    require(trace.packet_log.size() == 10, "expected 10 echoes");
    for (const auto& p : trace.packet_log) {
      require(p.recv.has_value(), "echo lost");
      double rtt = s_from_us(*p.recv - p.sent);
      require(std::abs(rtt - expected_rtt) <= 1e-6 + 1e-12,
              "rtt " + std::to_string(rtt) + " vs closed form " +
                  std::to_string(expected_rtt));
    }

    // offered 20 Mbit/s over a 10 Mbit/s link
    auto bottleneck = testutil::line_network(2, 10e6, 0.001);
    emu::Emulator emu2(bottleneck, {}, emu::EmulatorConfig{10, 1, 1.0});
    for (auto& a : routing::make_agents({RoutingRule{}}, 2))
      emu2.add_agent(std::move(a));
    TrafficRule udp;
    udp.src = 0;
    udp.dst = 1;
    udp.app = TrafficApp::iperf;
    udp.transport = Transport::udp;
    udp.interarrival = DistSpec::interval(0.0005);
    udp.packet_size = 1250;
    udp.start_s = 0;
    udp.stop_s = 10;
    auto s2 = traffic::make_flow_sources({udp}, 1);
    emu2.add_flow(0, std::move(s2[0]));
    auto trace2 = emu2.run();
    check_conservation(trace2.counters, "bottleneck run");
    auto records = traffic::collect_flows(trace2, {udp});
    auto summary = traffic::summarize(records[0]);
    require_near(summary.throughput_bps, 10e6, 0.05, "bottleneck throughput");
  });

  // 8. Distribution sanity.
  criterion(8, "five distribution kinds: mean 5%, poisson variance 10%", [&] {
    auto stats = [](const DistSpec& d, std::uint64_t seed) {
      RngStream rng(seed, "acceptance/dist");
      double sum = 0, sq = 0;
      const int n = 10000;
      for (int i = 0; i < n; ++i) {
        double v = sample(d, rng);
        sum += v;
        sq += v * v;
      }
      double mean = sum / n;
      return std::make_pair(mean, sq / n - mean * mean);
    };
    {
      auto [mean, var] = stats(DistSpec::uniform(2.0, 6.0), 1);
      require_near(mean, 4.0, 0.05, "uniform mean");
    }
    {
      auto [mean, var] = stats(DistSpec::exponential(0.25), 2);
      require_near(mean, 4.0, 0.05, "exponential mean");
    }
    {
      auto [mean, var] = stats(DistSpec::normal(7.0, 3.0), 3);
      require_near(mean, 7.0, 0.05, "normal mean");
    }
    {
      auto [mean, var] = stats(DistSpec::interval(5.5), 4);
      require(mean == 5.5 && var == 0.0, "interval must be exact");
    }
    {
      auto [mean, var] = stats(DistSpec::poisson(6.0), 5);
      require_near(mean, 6.0, 0.05, "poisson mean");
      require_near(var, mean, 0.10, "poisson variance vs mean");
    }
  });

  // 9. Format round-trips across the fixture corpus.
  criterion(9, "eel and config round-trips over the corpus, 0 failures", [&] {
    const std::vector<std::string> corpus = {"minimal.yaml", "ring5.yaml",
                                             "mesh4.yaml",   "mixed.yaml",
                                             "random8.yaml", "predefined.yaml",
                                             "sample30.yaml"};
    for (const auto& name : corpus) {
      auto spec = config::parse_file(testutil::fixture(name));
      std::string printed = config::print(spec);
      auto reparsed = config::parse(printed);
      require(reparsed == spec, "config fixpoint failed for " + name);
      require(config::print(reparsed) == printed,
              "second print differs for " + name);

      auto scenario = config::expand(spec, std::string(MENES_FIXTURE_DIR));
      auto log = events::generate_events(spec.links, scenario.network,
                                         spec.duration_s, spec.seed);
      auto round = events::parse_eel(events::serialize_eel(log));
      require(round == log, "eel round-trip failed for " + name);
    }
    auto imported = events::import_precomputed(testutil::fixture("sample30.eel"));
    auto reparsed = events::parse_eel(events::serialize_eel(imported.log));
    require(reparsed == imported.log, "eel round-trip failed for sample30.eel");
  });

  // 10. End-to-end determinism of the 30-node sample.
  criterion(10, "same seed, byte-identical exports and manifests", [&] {
    auto dir = testutil::temp_dir("acc-det");
    auto a = (dir / "a").string();
    auto b = (dir / "b").string();
    orch::run_scenario(testutil::fixture("sample30.yaml"), a);
    orch::run_scenario(testutil::fixture("sample30.yaml"), b);
    for (const char* rel : {"trace.json", "trace.csv", "report/summary.csv",
                            "report/routes.txt", "report/metrics.csv"}) {
      require(testutil::read_file(a + "/" + rel) ==
                  testutil::read_file(b + "/" + rel),
              std::string(rel) + " differs between runs");
    }
    auto spec = config::parse_file(testutil::fixture("sample30.yaml"));
    auto scenario = config::expand(spec, std::string(MENES_FIXTURE_DIR));
    require(orch::compile_external(scenario).bundle_hash ==
                orch::compile_external(scenario).bundle_hash,
            "manifest hash differs");
    fs::remove_all(dir);
  });

  if (g_failures == 0) {
    std::printf("all criteria passed\n");
  } else {
    std::printf("%d criterion(s) failed\n", g_failures);
  }
  return g_failures == 0 ? 0 : 1;
}
