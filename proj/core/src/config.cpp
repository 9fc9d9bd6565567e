#include "menes/config.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include <yaml-cpp/yaml.h>

#include "menes/error.hpp"
#include "menes/strfmt.hpp"

namespace menes::config {
namespace {

[[noreturn]] void fail_at(const YAML::Node& node, errc code,
                          const std::string& msg) {
  auto mark = node.Mark();
  throw ConfigError(code, msg, mark.line + 1, mark.column + 1);
}

void expect_map(const YAML::Node& node, const std::string& what) {
  if (!node.IsMap()) fail_at(node, errc::bad_value, what + " must be a mapping");
}

// Unknown keys are hard errors; silent typos are the failure mode a
// validated config is supposed to rule out.
void check_keys(const YAML::Node& map, const std::set<std::string>& allowed,
                const std::string& where) {
  for (const auto& kv : map) {
    std::string key = kv.first.as<std::string>();
    if (!allowed.count(key)) {
      fail_at(kv.first, errc::unknown_key,
              "unknown key '" + key + "' in " + where);
    }
  }
}

double scalar_double(const YAML::Node& node, const std::string& what) {
  if (!node.IsScalar()) fail_at(node, errc::bad_value, what + " must be a number");
  auto v = parse_double(node.Scalar());
  if (!v || !std::isfinite(*v))
    fail_at(node, errc::bad_value, what + " must be a finite number");
  return *v;
}

long long scalar_int(const YAML::Node& node, const std::string& what) {
  double v = scalar_double(node, what);
  if (v != std::floor(v))
    fail_at(node, errc::bad_value, what + " must be an integer");
  return static_cast<long long>(v);
}

NodeId scalar_node_ref(const YAML::Node& node, const std::string& what) {
  long long v = scalar_int(node, what);
  if (v < 0) fail_at(node, errc::unknown_node_ref, what + " must be >= 0");
  return static_cast<NodeId>(v);
}

DistSpec dist_at(const YAML::Node& node, const std::string& what) {
  if (!node.IsScalar())
    fail_at(node, errc::bad_dist_kind, what + " must be a distribution");
  try {
    return parse_dist(node.Scalar());
  } catch (const ConfigError& e) {
    fail_at(node, e.code(), what + ": " + e.what());
  }
}

// ---------------------------------------------------------------------------
// Section parsers

LinkSelector parse_selector(const YAML::Node& node) {
  LinkSelector sel;
  if (node.IsScalar() && node.Scalar() == "all") {
    sel.kind = LinkSelector::Kind::all;
    return sel;
  }
  if (node.IsMap()) {
    check_keys(node, {"pair", "group"}, "selector");
    if (node["pair"]) {
      const auto& pair = node["pair"];
      if (!pair.IsSequence() || pair.size() != 2)
        fail_at(pair, errc::bad_selector, "pair must be [a, b]");
      sel.kind = LinkSelector::Kind::pair;
      sel.a = scalar_node_ref(pair[0], "pair node");
      sel.b = scalar_node_ref(pair[1], "pair node");
      return sel;
    }
    if (node["group"]) {
      const auto& group = node["group"];
      if (!group.IsSequence() || group.size() == 0)
        fail_at(group, errc::bad_selector, "group must be a node list");
      sel.kind = LinkSelector::Kind::group;
      for (const auto& m : group) sel.members.push_back(scalar_node_ref(m, "group node"));
      return sel;
    }
  }
  fail_at(node, errc::bad_selector,
          "selector must be 'all', {pair: [a, b]} or {group: [...]}");
}

LinkRule parse_link_rule(const YAML::Node& node) {
  expect_map(node, "link rule");
  check_keys(node,
             {"selector", "capacity", "prop_delay", "pathloss", "rx_threshold",
              "mac", "fixed_delay", "queue_limit", "slot_len",
              "slots_per_frame", "owned_slots", "event_dist", "pathloss_dist"},
             "link rule");
  LinkRule rule;
  if (node["selector"]) rule.selector = parse_selector(node["selector"]);
  if (node["capacity"]) {
    rule.capacity_bps = scalar_double(node["capacity"], "capacity");
    if (rule.capacity_bps <= 0.0)
      fail_at(node["capacity"], errc::bad_capacity, "capacity must be positive");
  }
  if (node["prop_delay"]) {
    rule.prop_delay_s = scalar_double(node["prop_delay"], "prop_delay");
    if (rule.prop_delay_s < 0.0)
      fail_at(node["prop_delay"], errc::bad_delay, "prop_delay must be >= 0");
  }
  if (node["pathloss"])
    rule.initial_pathloss_db = scalar_double(node["pathloss"], "pathloss");
  if (node["rx_threshold"])
    rule.rx_threshold_db = scalar_double(node["rx_threshold"], "rx_threshold");

  if (node["mac"]) {
    std::string mac = node["mac"].as<std::string>();
    if (mac == "auto") rule.mac.choice = MacChoice::automatic;
    else if (mac == "rf-pipe") rule.mac.choice = MacChoice::rf_pipe;
    else if (mac == "csma") rule.mac.choice = MacChoice::csma;
    else if (mac == "tdma") rule.mac.choice = MacChoice::tdma;
    else
      fail_at(node["mac"], errc::bad_mac_params,
              "mac must be auto, rf-pipe, csma, or tdma");
  }
  bool tdma = rule.mac.choice == MacChoice::tdma;
  if (node["fixed_delay"]) {
    if (rule.mac.choice != MacChoice::rf_pipe)
      fail_at(node["fixed_delay"], errc::bad_mac_params,
              "fixed_delay applies to rf-pipe only");
    double v = scalar_double(node["fixed_delay"], "fixed_delay");
    if (v < 0.0)
      fail_at(node["fixed_delay"], errc::bad_mac_params, "fixed_delay must be >= 0");
    rule.mac.fixed_delay_s = v;
  }
  if (node["queue_limit"]) {
    long long v = scalar_int(node["queue_limit"], "queue_limit");
    if (v < 1)
      fail_at(node["queue_limit"], errc::bad_mac_params, "queue_limit must be >= 1");
    rule.mac.queue_limit = static_cast<int>(v);
  }
  if (node["slot_len"]) {
    if (!tdma)
      fail_at(node["slot_len"], errc::bad_mac_params, "slot_len requires mac: tdma");
    double v = scalar_double(node["slot_len"], "slot_len");
    if (v <= 0.0)
      fail_at(node["slot_len"], errc::bad_mac_params, "slot_len must be positive");
    rule.mac.slot_len_s = v;
  }
  if (node["slots_per_frame"]) {
    if (!tdma)
      fail_at(node["slots_per_frame"], errc::bad_mac_params,
              "slots_per_frame requires mac: tdma");
    long long v = scalar_int(node["slots_per_frame"], "slots_per_frame");
    if (v < 1)
      fail_at(node["slots_per_frame"], errc::bad_mac_params,
              "slots_per_frame must be >= 1");
    rule.mac.slots_per_frame = static_cast<int>(v);
  }
  if (node["owned_slots"]) {
    if (!tdma)
      fail_at(node["owned_slots"], errc::bad_mac_params,
              "owned_slots requires mac: tdma");
    if (!node["owned_slots"].IsSequence() || node["owned_slots"].size() == 0)
      fail_at(node["owned_slots"], errc::bad_mac_params,
              "owned_slots must be a non-empty list");
    std::vector<int> slots;
    for (const auto& s : node["owned_slots"])
      slots.push_back(static_cast<int>(scalar_int(s, "owned slot")));
    rule.mac.owned_slots = std::move(slots);
  }
  if (tdma) {
    if (!rule.mac.slot_len_s || !rule.mac.slots_per_frame)
      fail_at(node, errc::tdma_missing_params,
              "tdma requires slot_len and slots_per_frame");
    if (rule.mac.owned_slots) {
      for (int s : *rule.mac.owned_slots) {
        if (s < 0 || s >= *rule.mac.slots_per_frame)
          fail_at(node["owned_slots"], errc::bad_mac_params,
                  "owned slot outside [0, slots_per_frame)");
      }
    }
  }
  if (node["event_dist"]) rule.event_dist = dist_at(node["event_dist"], "event_dist");
  if (node["pathloss_dist"])
    rule.pathloss_dist = dist_at(node["pathloss_dist"], "pathloss_dist");
  return rule;
}

TopologySpec parse_topology(const YAML::Node& node) {
  expect_map(node, "topology");
  check_keys(node, {"num_nodes", "structure", "random_p", "edges", "edge_file"},
             "topology");
  TopologySpec topo;
  if (!node["num_nodes"])
    fail_at(node, errc::missing_key, "topology requires num_nodes");
  topo.num_nodes = dist_at(node["num_nodes"], "num_nodes");

  if (!node["structure"])
    fail_at(node, errc::missing_key, "topology requires structure");
  std::string structure = node["structure"].as<std::string>();
  if (structure == "ring") topo.structure = Structure::ring;
  else if (structure == "full-mesh") topo.structure = Structure::full_mesh;
  else if (structure == "random") topo.structure = Structure::random;
  else if (structure == "predefined") topo.structure = Structure::predefined;
  else
    fail_at(node["structure"], errc::bad_structure,
            "structure must be ring, full-mesh, random, or predefined");

  if (node["random_p"]) {
    if (topo.structure != Structure::random)
      fail_at(node["random_p"], errc::bad_probability,
              "random_p only applies to the random structure");
    double p = scalar_double(node["random_p"], "random_p");
    if (p < 0.0 || p > 1.0)
      fail_at(node["random_p"], errc::bad_probability, "random_p must be in [0, 1]");
    topo.random_p = p;
  } else if (topo.structure == Structure::random) {
    fail_at(node, errc::missing_random_p, "random structure requires random_p");
  }

  if (node["edges"]) {
    if (topo.structure != Structure::predefined)
      fail_at(node["edges"], errc::bad_structure,
              "edges only apply to the predefined structure");
    if (!node["edges"].IsSequence())
      fail_at(node["edges"], errc::bad_value, "edges must be a list");
    for (const auto& e : node["edges"]) {
      if (!e.IsSequence() || e.size() != 5)
        fail_at(e, errc::bad_value,
                "edge must be [src, dst, capacity_bps, prop_delay_s, pathloss_db]");
      PredefEdge edge;
      edge.src = scalar_node_ref(e[0], "edge src");
      edge.dst = scalar_node_ref(e[1], "edge dst");
      edge.capacity_bps = scalar_double(e[2], "edge capacity");
      edge.prop_delay_s = scalar_double(e[3], "edge prop_delay");
      edge.pathloss_db = scalar_double(e[4], "edge pathloss");
      if (edge.capacity_bps <= 0.0)
        fail_at(e[2], errc::bad_capacity, "edge capacity must be positive");
      topo.edges.push_back(edge);
    }
  }
  if (node["edge_file"]) {
    if (topo.structure != Structure::predefined)
      fail_at(node["edge_file"], errc::bad_structure,
              "edge_file only applies to the predefined structure");
    topo.edge_file = node["edge_file"].as<std::string>();
  }
  if (topo.structure == Structure::predefined && topo.edges.empty() &&
      topo.edge_file.empty()) {
    fail_at(node, errc::missing_edge_list,
            "predefined structure requires edges or edge_file");
  }
  return topo;
}

TrafficRule parse_traffic_rule(const YAML::Node& node, int duration_s) {
  expect_map(node, "traffic rule");
  check_keys(node,
             {"src", "dst", "app", "transport", "interarrival", "packet_size",
              "start", "stop"},
             "traffic rule");
  TrafficRule rule;
  if (!node["src"] || !node["dst"])
    fail_at(node, errc::missing_key, "traffic rule requires src and dst");
  rule.src = scalar_node_ref(node["src"], "src");
  rule.dst = scalar_node_ref(node["dst"], "dst");
  if (rule.src == rule.dst)
    fail_at(node["dst"], errc::src_equals_dst, "src and dst must differ");

  if (!node["app"]) fail_at(node, errc::missing_key, "traffic rule requires app");
  std::string app = node["app"].as<std::string>();
  if (app == "mgen") rule.app = TrafficApp::mgen;
  else if (app == "ping") rule.app = TrafficApp::ping;
  else if (app == "iperf") rule.app = TrafficApp::iperf;
  else fail_at(node["app"], errc::bad_value, "app must be mgen, ping, or iperf");

  if (node["transport"]) {
    std::string t = node["transport"].as<std::string>();
    if (t == "udp") rule.transport = Transport::udp;
    else if (t == "tcp") rule.transport = Transport::tcp;
    else if (t == "icmp") rule.transport = Transport::icmp;
    else
      fail_at(node["transport"], errc::bad_value,
              "transport must be udp, tcp, or icmp");
  } else {
    rule.transport = rule.app == TrafficApp::ping ? Transport::icmp : Transport::udp;
  }
  bool icmp = rule.transport == Transport::icmp;
  if ((rule.app == TrafficApp::ping) != icmp) {
    fail_at(node, errc::app_transport_mismatch,
            "ping requires icmp, mgen/iperf require udp or tcp");
  }

  rule.packet_size = rule.app == TrafficApp::ping ? 64 : 1250;
  if (node["packet_size"]) {
    long long v = scalar_int(node["packet_size"], "packet_size");
    if (v < 1)
      fail_at(node["packet_size"], errc::bad_packet_size,
              "packet_size must be >= 1");
    rule.packet_size = static_cast<int>(v);
  }
  if (node["interarrival"])
    rule.interarrival = dist_at(node["interarrival"], "interarrival");

  rule.start_s = node["start"] ? scalar_double(node["start"], "start") : 0.0;
  rule.stop_s = node["stop"] ? scalar_double(node["stop"], "stop")
                             : static_cast<double>(duration_s);
  if (rule.start_s < 0.0 || rule.start_s >= rule.stop_s)
    fail_at(node, errc::bad_traffic_window, "traffic window requires 0 <= start < stop");
  if (rule.stop_s > static_cast<double>(duration_s))
    fail_at(node, errc::traffic_exceeds_duration,
            "traffic window exceeds scenario duration");
  return rule;
}

RoutingRule parse_routing_rule(const YAML::Node& node,
                               std::vector<std::string>* warnings) {
  expect_map(node, "routing rule");
  check_keys(node,
             {"group", "protocol", "hello_interval", "refresh_interval",
              "hold_time", "preference"},
             "routing rule");
  RoutingRule rule;
  if (node["group"]) {
    const auto& g = node["group"];
    if (g.IsScalar() && g.Scalar() == "all") {
      rule.group.all = true;
    } else if (g.IsSequence()) {
      rule.group.all = false;
      for (const auto& m : g) rule.group.members.push_back(scalar_node_ref(m, "group node"));
    } else {
      fail_at(g, errc::bad_selector, "group must be 'all' or a node list");
    }
  }
  if (!node["protocol"])
    fail_at(node, errc::missing_key, "routing rule requires protocol");
  std::string proto = node["protocol"].as<std::string>();
  auto warn = [&](const std::string& msg) {
    if (warnings) warnings->push_back(msg);
  };
  if (proto == "static") rule.protocol = ProtocolKind::static_route;
  else if (proto == "centralized") rule.protocol = ProtocolKind::centralized;
  else if (proto == "ospf-like" || proto == "ospf") rule.protocol = ProtocolKind::ospf_like;
  else if (proto == "olsr-like" || proto == "olsr" || proto == "olsrv2")
    rule.protocol = ProtocolKind::olsr_like;
  else if (proto == "rip") {
    rule.protocol = ProtocolKind::ospf_like;
    warn("protocol 'rip' runs as ospf-like link state");
  } else if (proto == "bgp") {
    rule.protocol = ProtocolKind::static_route;
    warn("protocol 'bgp' runs as static routes");
  } else {
    fail_at(node["protocol"], errc::bad_value,
            "protocol must be static, centralized, ospf-like, or olsr-like");
  }
  auto positive = [&](const char* key, double fallback) {
    if (!node[key]) return fallback;
    double v = scalar_double(node[key], key);
    if (v <= 0.0) fail_at(node[key], errc::bad_value, std::string(key) + " must be positive");
    return v;
  };
  rule.hello_interval_s = positive("hello_interval", 2.0);
  rule.refresh_interval_s = positive("refresh_interval", 10.0);
  rule.hold_time_s = positive("hold_time", 6.0);
  if (node["preference"])
    rule.preference = static_cast<int>(scalar_int(node["preference"], "preference"));
  return rule;
}

}  // namespace

namespace {
ScenarioSpec parse_root(const YAML::Node& root);
}

ScenarioSpec parse(const std::string& text, const std::string& filename) {
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::ParserException& e) {
    throw ConfigError(errc::yaml_syntax,
                      (filename.empty() ? std::string() : filename + ": ") +
                          e.msg,
                      e.mark.line + 1, e.mark.column + 1);
  }
  try {
    return parse_root(root);
  } catch (const ConfigError&) {
    throw;
  } catch (const YAML::Exception& e) {
    throw ConfigError(errc::bad_value, e.msg, e.mark.line + 1,
                      e.mark.column + 1);
  }
}

namespace {

ScenarioSpec parse_root(const YAML::Node& root) {
  if (!root.IsMap())
    throw ConfigError(errc::bad_value, "scenario document must be a mapping");
  check_keys(root,
             {"duration", "seed", "emulation", "monitoring", "topology",
              "links", "traffic", "routing"},
             "scenario");

  ScenarioSpec spec;
  if (!root["duration"])
    throw ConfigError(errc::missing_key, "scenario requires duration");
  long long duration = scalar_int(root["duration"], "duration");
  if (duration < 1)
    fail_at(root["duration"], errc::bad_duration,
            "duration must be a positive integer");
  spec.duration_s = static_cast<int>(duration);

  if (root["seed"]) {
    long long seed = scalar_int(root["seed"], "seed");
    if (seed < 0) fail_at(root["seed"], errc::bad_seed, "seed must be >= 0");
    spec.seed = static_cast<std::uint64_t>(seed);
  }
  if (root["emulation"]) {
    std::string backend = root["emulation"].as<std::string>();
    if (backend == "in-process") spec.backend = Backend::in_process;
    else if (backend == "compile-only") spec.backend = Backend::compile_only;
    else
      fail_at(root["emulation"], errc::bad_value,
              "emulation must be in-process or compile-only");
  }
  if (root["monitoring"]) {
    spec.monitoring_period_s = scalar_double(root["monitoring"], "monitoring");
    if (spec.monitoring_period_s <= 0.0)
      fail_at(root["monitoring"], errc::bad_value, "monitoring period must be positive");
  }

  if (!root["topology"])
    throw ConfigError(errc::missing_key, "scenario requires topology");
  spec.topology = parse_topology(root["topology"]);

  if (root["links"]) {
    if (!root["links"].IsSequence())
      fail_at(root["links"], errc::bad_value, "links must be a list");
    for (const auto& l : root["links"]) spec.links.push_back(parse_link_rule(l));
  }
  if (spec.links.empty()) spec.links.push_back(LinkRule{});  // default rule

  if (root["traffic"]) {
    if (!root["traffic"].IsSequence())
      fail_at(root["traffic"], errc::bad_value, "traffic must be a list");
    for (const auto& t : root["traffic"])
      spec.traffic.push_back(parse_traffic_rule(t, spec.duration_s));
  }

  std::vector<std::string> warnings;
  if (root["routing"]) {
    if (!root["routing"].IsSequence())
      fail_at(root["routing"], errc::bad_value, "routing must be a list");
    for (const auto& r : root["routing"])
      spec.routing.push_back(parse_routing_rule(r, &warnings));
  }
  if (spec.routing.empty()) spec.routing.push_back(RoutingRule{});  // static, all

  return spec;
}

}  // namespace

ScenarioSpec parse_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open config file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse(buf.str(), path);
}

// ---------------------------------------------------------------------------
// Canonical printer

namespace {

class Emit {
 public:
  void kv(int indent, const std::string& key, const std::string& value) {
    pad(indent);
    out_ += key + ": " + value + "\n";
  }
  void key(int indent, const std::string& key) {
    pad(indent);
    out_ += key + ":\n";
  }
  // First key of a sequence-of-maps item: "- key: value".
  void item_kv(int indent, const std::string& key, const std::string& value) {
    pad(indent);
    out_ += "- " + key + ": " + value + "\n";
  }
  // Plain sequence item: "- value".
  void seq_item(int indent, const std::string& value) {
    pad(indent);
    out_ += "- " + value + "\n";
  }
  std::string str() && { return std::move(out_); }

 private:
  void pad(int indent) { out_.append(static_cast<size_t>(indent), ' '); }
  std::string out_;
};

std::string flow_ints(const std::vector<NodeId>& xs) {
  std::string out = "[";
  for (size_t i = 0; i < xs.size(); ++i) {
    if (i) out += ", ";
    out += std::to_string(xs[i]);
  }
  return out + "]";
}

std::string selector_str(const LinkSelector& sel) {
  switch (sel.kind) {
    case LinkSelector::Kind::all: return "all";
    case LinkSelector::Kind::pair:
      return "{pair: [" + std::to_string(sel.a) + ", " + std::to_string(sel.b) + "]}";
    case LinkSelector::Kind::group: {
      return "{group: " + flow_ints(sel.members) + "}";
    }
  }
  return "all";
}

// Keys inside each block are emitted in lexicographic order; this is the
// canonical form parse(print(spec)) == spec relies on.
void print_link_rule(Emit& e, const LinkRule& rule) {
  e.item_kv(2, "capacity", fmt_double(rule.capacity_bps));
  if (rule.event_dist) e.kv(4, "event_dist", print_dist(*rule.event_dist));
  if (rule.mac.fixed_delay_s)
    e.kv(4, "fixed_delay", fmt_double(*rule.mac.fixed_delay_s));
  e.kv(4, "mac", std::string(mac_choice_name(rule.mac.choice)));
  if (rule.mac.owned_slots) {
    std::vector<NodeId> slots(rule.mac.owned_slots->begin(),
                              rule.mac.owned_slots->end());
    e.kv(4, "owned_slots", flow_ints(slots));
  }
  e.kv(4, "pathloss", fmt_double(rule.initial_pathloss_db));
  if (rule.pathloss_dist) e.kv(4, "pathloss_dist", print_dist(*rule.pathloss_dist));
  e.kv(4, "prop_delay", fmt_double(rule.prop_delay_s));
  if (rule.mac.queue_limit) e.kv(4, "queue_limit", std::to_string(*rule.mac.queue_limit));
  e.kv(4, "rx_threshold", fmt_double(rule.rx_threshold_db));
  e.kv(4, "selector", selector_str(rule.selector));
  if (rule.mac.slot_len_s) e.kv(4, "slot_len", fmt_double(*rule.mac.slot_len_s));
  if (rule.mac.slots_per_frame)
    e.kv(4, "slots_per_frame", std::to_string(*rule.mac.slots_per_frame));
}

}  // namespace

std::string print(const ScenarioSpec& spec) {
  Emit e;
  e.kv(0, "duration", std::to_string(spec.duration_s));
  e.kv(0, "emulation", std::string(backend_name(spec.backend)));
  e.key(0, "links");
  for (const auto& rule : spec.links) print_link_rule(e, rule);
  e.kv(0, "monitoring", fmt_double(spec.monitoring_period_s));
  e.key(0, "routing");
  for (const auto& r : spec.routing) {
    e.item_kv(2, "group", r.group.all ? "all" : flow_ints(r.group.members));
    e.kv(4, "hello_interval", fmt_double(r.hello_interval_s));
    e.kv(4, "hold_time", fmt_double(r.hold_time_s));
    if (r.preference) e.kv(4, "preference", std::to_string(*r.preference));
    e.kv(4, "protocol", std::string(protocol_name(r.protocol)));
    e.kv(4, "refresh_interval", fmt_double(r.refresh_interval_s));
  }
  e.kv(0, "seed", std::to_string(spec.seed));
  e.key(0, "topology");
  const auto& topo = spec.topology;
  if (!topo.edge_file.empty()) e.kv(2, "edge_file", topo.edge_file);
  if (!topo.edges.empty()) {
    e.key(2, "edges");
    for (const auto& edge : topo.edges) {
      e.seq_item(4, "[" + std::to_string(edge.src) + ", " +
                        std::to_string(edge.dst) + ", " +
                        fmt_double(edge.capacity_bps) + ", " +
                        fmt_double(edge.prop_delay_s) + ", " +
                        fmt_double(edge.pathloss_db) + "]");
    }
  }
  e.kv(2, "num_nodes", print_dist(topo.num_nodes));
  if (topo.random_p) e.kv(2, "random_p", fmt_double(*topo.random_p));
  e.kv(2, "structure", std::string(structure_name(topo.structure)));
  if (!spec.traffic.empty()) {
    e.key(0, "traffic");
    for (const auto& t : spec.traffic) {
      e.item_kv(2, "app", std::string(traffic_app_name(t.app)));
      e.kv(4, "dst", std::to_string(t.dst));
      e.kv(4, "interarrival", print_dist(t.interarrival));
      e.kv(4, "packet_size", std::to_string(t.packet_size));
      e.kv(4, "src", std::to_string(t.src));
      e.kv(4, "start", fmt_double(t.start_s));
      e.kv(4, "stop", fmt_double(t.stop_s));
      e.kv(4, "transport", std::string(transport_name(t.transport)));
    }
  }
  return std::move(e).str();
}

// ---------------------------------------------------------------------------
// Expansion

ConcreteScenario expand(const ScenarioSpec& spec, const std::string& base_dir) {
  ConcreteScenario concrete;
  concrete.spec = spec;

  // Resolve the node count: nearest integer, rejected if < 1.
  double raw;
  if (spec.topology.num_nodes.kind == DistKind::interval) {
    raw = spec.topology.num_nodes.params[0];
  } else {
    RngStream rng(spec.seed, "expand/num_nodes");
    raw = sample(spec.topology.num_nodes, rng);
  }
  long long n = std::llround(raw);
  if (n < 1) {
    throw RunError(stage::config, errc::nonpositive_node_count,
                   "resolved node count " + std::to_string(n) +
                       " is not positive");
  }
  concrete.node_count = static_cast<std::uint32_t>(n);

  TopologySpec topo = spec.topology;
  if (topo.structure == Structure::predefined && topo.edges.empty()) {
    std::filesystem::path p(topo.edge_file);
    if (p.is_relative()) p = std::filesystem::path(base_dir) / p;
    topo.edges = topo::load_edge_list(p.string());
    concrete.spec.topology.edges = topo.edges;
  }

  RngStream topo_rng(spec.seed, "expand/topology");
  concrete.network = topo::build(topo, concrete.node_count, spec.links, topo_rng);

  auto check_ref = [&](NodeId node, const std::string& what) {
    if (node >= concrete.node_count) {
      throw RunError(stage::config, errc::unknown_node_ref,
                     what + " references node " + std::to_string(node) +
                         " but the scenario has " +
                         std::to_string(concrete.node_count) + " nodes");
    }
  };
  for (const auto& rule : spec.links) {
    if (rule.selector.kind == LinkSelector::Kind::pair) {
      check_ref(rule.selector.a, "link selector");
      check_ref(rule.selector.b, "link selector");
    } else if (rule.selector.kind == LinkSelector::Kind::group) {
      for (NodeId m : rule.selector.members) check_ref(m, "link selector");
    }
  }
  for (const auto& t : spec.traffic) {
    check_ref(t.src, "traffic rule");
    check_ref(t.dst, "traffic rule");
  }
  std::set<std::pair<NodeId, int>> proto_seen;
  for (const auto& r : spec.routing) {
    std::vector<NodeId> members;
    if (r.group.all) {
      for (NodeId i = 0; i < concrete.node_count; ++i) members.push_back(i);
    } else {
      for (NodeId m : r.group.members) {
        check_ref(m, "routing rule");
        members.push_back(m);
      }
    }
    for (NodeId m : members) {
      if (!proto_seen.insert({m, static_cast<int>(r.protocol)}).second) {
        throw RunError(stage::config, errc::duplicate_protocol,
                       "node " + std::to_string(m) + " runs protocol '" +
                           std::string(protocol_name(r.protocol)) +
                           "' more than once");
      }
    }
  }

  concrete.flows = spec.traffic;
  concrete.routing = spec.routing;
  return concrete;
}

std::string ConcreteScenario::print() const {
  ScenarioSpec resolved = spec;
  resolved.topology.num_nodes = DistSpec::interval(static_cast<double>(node_count));
  resolved.topology.structure = Structure::predefined;
  resolved.topology.random_p.reset();
  resolved.topology.edge_file.clear();
  resolved.topology.edges.clear();
  for (const auto& link : network.links()) {
    resolved.topology.edges.push_back(
        PredefEdge{link.src, link.dst, link.params.capacity_bps,
                   link.params.prop_delay_s, link.params.initial_pathloss_db});
  }
  return config::print(resolved);
}

}  // namespace menes::config
