#include <doctest.h>

#include "menes/config.hpp"
#include "menes/error.hpp"
#include "test_util.hpp"

using namespace menes;

TEST_SUITE_BEGIN("config");

TEST_CASE("minimal document parses with documented defaults") {
  auto spec = config::parse(testutil::read_file(testutil::fixture("minimal.yaml")));
  CHECK(spec.duration_s == 60);
  CHECK(spec.seed == 1);
  CHECK(spec.topology.structure == Structure::ring);
  CHECK(spec.topology.num_nodes == DistSpec::interval(3));
  REQUIRE(spec.links.size() == 1);  // default link rule
  CHECK(spec.links[0].capacity_bps == 54e6);
  CHECK(spec.links[0].prop_delay_s == 0.001);
  CHECK(spec.links[0].rx_threshold_db == 100.0);
  CHECK(spec.links[0].mac.choice == MacChoice::rf_pipe);
  REQUIRE(spec.routing.size() == 1);  // default static everywhere
  CHECK(spec.routing[0].protocol == ProtocolKind::static_route);
  CHECK(spec.backend == Backend::in_process);

  auto scenario = config::expand(spec);
  CHECK(scenario.node_count == 3);
  CHECK(scenario.network.links().size() == 6);
}

TEST_CASE("semantic errors carry distinct codes") {
  auto parse_err = [](const std::string& doc) {
    try {
      config::parse(doc);
    } catch (const ConfigError& e) {
      return e.code();
    }
    return errc::ok;
  };
  std::string base =
      "duration: 60\ntopology:\n  num_nodes: 3\n  structure: ring\n";

  CHECK(parse_err("topology:\n  num_nodes: 3\n  structure: ring\n") ==
        errc::missing_key);
  CHECK(parse_err("duration: 0\ntopology:\n  num_nodes: 3\n  structure: ring\n") ==
        errc::bad_duration);
  CHECK(parse_err("duration: 60\nseed: -4\ntopology:\n  num_nodes: 3\n  structure: ring\n") ==
        errc::bad_seed);
  CHECK(parse_err(base + "color: blue\n") == errc::unknown_key);
  CHECK(parse_err("duration: 60\ntopology:\n  num_nodes: 3\n  structure: blob\n") ==
        errc::bad_structure);
  CHECK(parse_err("duration: 60\ntopology:\n  num_nodes: 3\n  structure: random\n") ==
        errc::missing_random_p);
  CHECK(parse_err("duration: 60\ntopology:\n  num_nodes: 3\n  structure: random\n"
                  "  random_p: 1.5\n") == errc::bad_probability);
  CHECK(parse_err("duration: 60\ntopology:\n  num_nodes: 3\n  structure: predefined\n") ==
        errc::missing_edge_list);
  CHECK(parse_err(base + "links:\n  - capacity: -5\n") == errc::bad_capacity);
  CHECK(parse_err(base + "links:\n  - slot_len: 0.01\n") == errc::bad_mac_params);
  CHECK(parse_err(base + "links:\n  - mac: tdma\n") == errc::tdma_missing_params);
  CHECK(parse_err(base + "links:\n  - mac: tdma\n    slot_len: 0.01\n"
                         "    slots_per_frame: 4\n    owned_slots: [4]\n") ==
        errc::bad_mac_params);
  CHECK(parse_err(base + "traffic:\n  - src: 0\n    dst: 0\n    app: ping\n") ==
        errc::src_equals_dst);
  CHECK(parse_err(base + "traffic:\n  - src: 0\n    dst: 1\n    app: ping\n"
                         "    transport: udp\n") == errc::app_transport_mismatch);
  CHECK(parse_err(base + "traffic:\n  - src: 0\n    dst: 1\n    app: mgen\n"
                         "    start: 5\n    stop: 3\n") == errc::bad_traffic_window);
  CHECK(parse_err(base + "routing:\n  - protocol: ebgp\n") == errc::bad_value);
  CHECK(parse_err(base + "links:\n  - mac: [1]\n") == errc::bad_value);
  CHECK(parse_err(base + "links:\n  - mac: tdma\n    slot_len: 0.01\n"
                         "    slots_per_frame: 4\n    owned_slots: []\n") ==
        errc::bad_mac_params);
}

TEST_CASE("negative rate in a distribution is rejected with a position") {
  std::string doc =
      "duration: 60\n"
      "topology:\n"
      "  num_nodes: 3\n"
      "  structure: ring\n"
      "traffic:\n"
      "  - src: 0\n"
      "    dst: 1\n"
      "    app: mgen\n"
      "    interarrival: exponential(-1.0)\n";
  try {
    config::parse(doc);
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(e.code() == errc::bad_dist_params);
    CHECK(std::string(e.what()).find("rate must be positive") != std::string::npos);
    CHECK(e.has_position());
    CHECK(e.line() == 9);
  }
}

TEST_CASE("traffic window beyond duration is a semantic error") {
  std::string doc =
      "duration: 60\n"
      "topology:\n"
      "  num_nodes: 3\n"
      "  structure: ring\n"
      "traffic:\n"
      "  - src: 0\n"
      "    dst: 1\n"
      "    app: mgen\n"
      "    stop: 120\n";
  try {
    config::parse(doc);
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(e.code() == errc::traffic_exceeds_duration);
  }
}

TEST_CASE("yaml syntax errors are position-annotated") {
  try {
    config::parse("duration: [\n");
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(e.code() == errc::yaml_syntax);
    CHECK(e.has_position());
  }
}

TEST_CASE("parse/print fixpoint over the fixture corpus") {
  for (const char* name : {"minimal.yaml", "ring5.yaml", "mesh4.yaml",
                           "mixed.yaml", "random8.yaml", "sample30.yaml"}) {
    CAPTURE(name);
    auto spec = config::parse(testutil::read_file(testutil::fixture(name)));
    std::string once = config::print(spec);
    auto reparsed = config::parse(once);
    CHECK(reparsed == spec);
    CHECK(config::print(reparsed) == once);
  }
}

namespace {

// Random valid ScenarioSpec for round-trip property checks.
ScenarioSpec random_spec(std::uint64_t seed) {
  RngStream rng(seed, "test/spec-gen");
  auto pick = [&](int n) { return static_cast<int>(rng.next_u64() % n); };
  auto real_in = [&](double lo, double hi) {
    return lo + rng.next_unit() * (hi - lo);
  };

  ScenarioSpec spec;
  spec.duration_s = 10 + pick(100);
  spec.seed = rng.next_u64() % 100000;
  spec.backend = pick(2) ? Backend::compile_only : Backend::in_process;
  spec.monitoring_period_s = real_in(0.1, 5.0);

  int n = 3 + pick(8);
  spec.topology.num_nodes = DistSpec::interval(n);
  switch (pick(3)) {
    case 0: spec.topology.structure = Structure::ring; break;
    case 1: spec.topology.structure = Structure::full_mesh; break;
    default:
      spec.topology.structure = Structure::random;
      spec.topology.random_p = real_in(0.3, 1.0);
  }

  auto random_dist = [&]() {
    switch (pick(5)) {
      case 0: {
        double lo = real_in(0.001, 1.0);
        return DistSpec::uniform(lo, lo + real_in(0.0, 2.0));
      }
      case 1: return DistSpec::exponential(real_in(0.01, 50.0));
      case 2: return DistSpec::normal(real_in(-5.0, 5.0), real_in(0.0, 3.0));
      case 3: return DistSpec::interval(real_in(0.001, 10.0));
      default: return DistSpec::poisson(real_in(0.1, 20.0));
    }
  };

  int rules = 1 + pick(3);
  for (int i = 0; i < rules; ++i) {
    LinkRule rule;
    if (i > 0 && pick(2)) {
      rule.selector = LinkSelector{LinkSelector::Kind::pair,
                                   static_cast<NodeId>(pick(n)),
                                   static_cast<NodeId>(pick(n)),
                                   {}};
      if (rule.selector.a == rule.selector.b)
        rule.selector.b = (rule.selector.a + 1) % n;
    }
    rule.capacity_bps = real_in(1e5, 1e8);
    rule.prop_delay_s = real_in(0.0, 0.01);
    rule.initial_pathloss_db = real_in(60.0, 99.0);
    switch (pick(4)) {
      case 0: rule.mac.choice = MacChoice::automatic; break;
      case 1: rule.mac.choice = MacChoice::csma; break;
      case 2:
        rule.mac.choice = MacChoice::tdma;
        rule.mac.slot_len_s = real_in(0.001, 0.05);
        rule.mac.slots_per_frame = 2 + pick(10);
        if (pick(2)) rule.mac.owned_slots = std::vector<int>{pick(2)};
        break;
      default:
        rule.mac.choice = MacChoice::rf_pipe;
        if (pick(2)) rule.mac.fixed_delay_s = real_in(0.0, 0.01);
    }
    if (pick(2)) rule.mac.queue_limit = 1 + pick(500);
    if (pick(2)) rule.event_dist = random_dist();
    if (pick(2)) rule.pathloss_dist = random_dist();
    spec.links.push_back(rule);
  }

  int flows = pick(4);
  for (int i = 0; i < flows; ++i) {
    TrafficRule t;
    t.src = static_cast<NodeId>(pick(n));
    t.dst = (t.src + 1 + pick(n - 1)) % n;
    switch (pick(3)) {
      case 0:
        t.app = TrafficApp::ping;
        t.transport = Transport::icmp;
        break;
      case 1:
        t.app = TrafficApp::iperf;
        t.transport = pick(2) ? Transport::tcp : Transport::udp;
        break;
      default:
        t.app = TrafficApp::mgen;
        t.transport = pick(2) ? Transport::tcp : Transport::udp;
    }
    t.interarrival = random_dist();
    t.packet_size = 40 + pick(1460);
    t.start_s = real_in(0.0, spec.duration_s / 2.0);
    t.stop_s = t.start_s + real_in(0.5, spec.duration_s - t.start_s);
    spec.traffic.push_back(t);
  }

  RoutingRule r;
  switch (pick(4)) {
    case 0: r.protocol = ProtocolKind::static_route; break;
    case 1: r.protocol = ProtocolKind::centralized; break;
    case 2: r.protocol = ProtocolKind::ospf_like; break;
    default: r.protocol = ProtocolKind::olsr_like;
  }
  r.hello_interval_s = real_in(0.5, 5.0);
  if (pick(2)) r.preference = 1 + pick(200);
  spec.routing.push_back(r);
  return spec;
}

}  // namespace

TEST_CASE("round-trip property: print(parse(print(s))) is a fixpoint") {
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    CAPTURE(seed);
    auto spec = random_spec(seed);
    std::string printed = config::print(spec);
    ScenarioSpec reparsed;
    try {
      reparsed = config::parse(printed);
    } catch (const ConfigError& e) {
      CAPTURE(printed);
      FAIL("canonical text failed to parse: " << e.what());
    }
    CHECK(reparsed == spec);
    CHECK(config::print(reparsed) == printed);
  }
}

TEST_CASE("key order does not affect the canonical form") {
  std::string a =
      "duration: 60\nseed: 4\ntopology:\n  num_nodes: 3\n  structure: ring\n";
  std::string b =
      "seed: 4\ntopology:\n  structure: ring\n  num_nodes: 3\nduration: 60\n";
  CHECK(config::print(config::parse(a)) == config::print(config::parse(b)));
}

TEST_CASE("expansion resolves stochastic node counts deterministically") {
  std::string doc =
      "duration: 10\nseed: 77\ntopology:\n  num_nodes: uniform(5,9)\n"
      "  structure: full-mesh\n";
  auto spec = config::parse(doc);
  auto a = config::expand(spec);
  auto b = config::expand(spec);
  CHECK(a.node_count == b.node_count);
  CHECK(a.node_count >= 5);
  CHECK(a.node_count <= 9);
  CHECK(a.network.links().size() == b.network.links().size());
  CHECK(config::print(a.spec) == config::print(b.spec));

  SUBCASE("degenerate distributions give exact counts") {
    spec.topology.num_nodes = DistSpec::interval(10);
    CHECK(config::expand(spec).node_count == 10);
    spec.topology.num_nodes = DistSpec::uniform(5, 5);
    CHECK(config::expand(spec).node_count == 5);
  }
}

TEST_CASE("node count resolving below one is an error, never a clamp") {
  std::string doc =
      "duration: 10\nseed: 1\ntopology:\n  num_nodes: normal(-50,0)\n"
      "  structure: ring\n";
  auto spec = config::parse(doc);
  try {
    config::expand(spec);
    FAIL("expected error");
  } catch (const MenesError& e) {
    CHECK(e.code() == errc::nonpositive_node_count);
  }
}

TEST_CASE("node references are validated after expansion") {
  std::string doc =
      "duration: 10\ntopology:\n  num_nodes: 3\n  structure: ring\n"
      "traffic:\n  - src: 0\n    dst: 7\n    app: mgen\n";
  auto spec = config::parse(doc);
  try {
    config::expand(spec);
    FAIL("expected error");
  } catch (const MenesError& e) {
    CHECK(e.code() == errc::unknown_node_ref);
  }
}

TEST_CASE("one instance of a protocol per node") {
  std::string doc =
      "duration: 10\ntopology:\n  num_nodes: 3\n  structure: ring\n"
      "routing:\n  - group: all\n    protocol: static\n"
      "  - group: [1]\n    protocol: static\n";
  auto spec = config::parse(doc);
  try {
    config::expand(spec);
    FAIL("expected error");
  } catch (const MenesError& e) {
    CHECK(e.code() == errc::duplicate_protocol);
  }
}

TEST_CASE("rip and bgp aliases validate with a substitution") {
  auto spec = config::parse(
      "duration: 10\ntopology:\n  num_nodes: 3\n  structure: ring\n"
      "routing:\n  - group: all\n    protocol: rip\n  - group: [0]\n"
      "    protocol: bgp\n");
  CHECK(spec.routing[0].protocol == ProtocolKind::ospf_like);
  CHECK(spec.routing[1].protocol == ProtocolKind::static_route);
}

TEST_CASE("edge_file predefined topology expands from disk") {
  auto spec = config::parse_file(testutil::fixture("predefined.yaml"));
  auto scenario = config::expand(spec, testutil::fixture(""));
  CHECK(scenario.node_count == 4);
  CHECK(scenario.network.links().size() == 6);
  // file values survive the default rule
  auto id = scenario.network.find_link(1, 2);
  REQUIRE(id >= 0);
  CHECK(scenario.network.link(id).params.capacity_bps == 2000000);
  CHECK(scenario.network.link(id).params.prop_delay_s == 0.002);
}

TEST_CASE("expanded scenario prints its resolved node count") {
  auto spec = config::parse(testutil::read_file(testutil::fixture("random8.yaml")));
  auto scenario = config::expand(spec);
  std::string text = scenario.print();
  CHECK(text.find("num_nodes: " + std::to_string(scenario.node_count)) !=
        std::string::npos);
  CHECK(text.find("structure: predefined") != std::string::npos);
  auto reparsed = config::parse(text);
  CHECK(config::expand(reparsed).network.links().size() ==
        scenario.network.links().size());
}

TEST_SUITE_END();
