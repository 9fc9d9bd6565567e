#include "menes/scenario.hpp"

#include <algorithm>

#include "menes/error.hpp"

namespace menes {

std::string_view errc_name(errc code) {
  switch (code) {
    case errc::ok: return "ok";
    case errc::yaml_syntax: return "yaml-syntax";
    case errc::unknown_key: return "unknown-key";
    case errc::missing_key: return "missing-key";
    case errc::bad_value: return "bad-value";
    case errc::bad_dist_kind: return "bad-dist-kind";
    case errc::bad_dist_params: return "bad-dist-params";
    case errc::bad_duration: return "bad-duration";
    case errc::bad_seed: return "bad-seed";
    case errc::bad_structure: return "bad-structure";
    case errc::missing_edge_list: return "missing-edge-list";
    case errc::missing_random_p: return "missing-random-p";
    case errc::bad_probability: return "bad-probability";
    case errc::bad_capacity: return "bad-capacity";
    case errc::bad_delay: return "bad-delay";
    case errc::bad_packet_size: return "bad-packet-size";
    case errc::bad_traffic_window: return "bad-traffic-window";
    case errc::traffic_exceeds_duration: return "traffic-exceeds-duration";
    case errc::src_equals_dst: return "src-equals-dst";
    case errc::app_transport_mismatch: return "app-transport-mismatch";
    case errc::unknown_node_ref: return "unknown-node-ref";
    case errc::duplicate_protocol: return "duplicate-protocol";
    case errc::bad_mac_params: return "bad-mac-params";
    case errc::tdma_missing_params: return "tdma-missing-params";
    case errc::bad_selector: return "bad-selector";
    case errc::nonpositive_node_count: return "nonpositive-node-count";
    case errc::ring_too_small: return "ring-too-small";
    case errc::duplicate_link: return "duplicate-link";
    case errc::dangling_link: return "dangling-link";
    case errc::eel_malformed_line: return "eel-malformed-line";
    case errc::eel_unsorted: return "eel-unsorted";
    case errc::capability_missing: return "capability-missing";
    case errc::event_storm: return "event-storm";
    case errc::bad_pricing: return "bad-pricing";
    case errc::bad_host_model: return "bad-host-model";
    case errc::io_failure: return "io-failure";
  }
  return "?";
}

std::string_view stage_name(stage s) {
  switch (s) {
    case stage::config: return "config";
    case stage::topology: return "topology";
    case stage::linkevents: return "linkevents";
    case stage::routing: return "routing";
    case stage::emulation: return "emulation";
    case stage::traffic: return "traffic";
    case stage::metrics: return "metrics";
    case stage::orchestrator: return "orchestrator";
    case stage::io: return "io";
  }
  return "?";
}

std::string_view mac_choice_name(MacChoice choice) {
  switch (choice) {
    case MacChoice::automatic: return "auto";
    case MacChoice::rf_pipe: return "rf-pipe";
    case MacChoice::csma: return "csma";
    case MacChoice::tdma: return "tdma";
  }
  return "?";
}

std::string_view structure_name(Structure s) {
  switch (s) {
    case Structure::ring: return "ring";
    case Structure::full_mesh: return "full-mesh";
    case Structure::random: return "random";
    case Structure::predefined: return "predefined";
  }
  return "?";
}

std::string_view traffic_app_name(TrafficApp app) {
  switch (app) {
    case TrafficApp::mgen: return "mgen";
    case TrafficApp::ping: return "ping";
    case TrafficApp::iperf: return "iperf";
  }
  return "?";
}

std::string_view transport_name(Transport t) {
  switch (t) {
    case Transport::udp: return "udp";
    case Transport::tcp: return "tcp";
    case Transport::icmp: return "icmp";
  }
  return "?";
}

std::string_view protocol_name(ProtocolKind p) {
  switch (p) {
    case ProtocolKind::static_route: return "static";
    case ProtocolKind::centralized: return "centralized";
    case ProtocolKind::ospf_like: return "ospf-like";
    case ProtocolKind::olsr_like: return "olsr-like";
  }
  return "?";
}

int default_preference(ProtocolKind p) {
  switch (p) {
    case ProtocolKind::static_route: return 1;
    case ProtocolKind::centralized: return 10;
    case ProtocolKind::ospf_like: return 110;
    case ProtocolKind::olsr_like: return 120;
  }
  return 255;
}

std::string_view backend_name(Backend b) {
  switch (b) {
    case Backend::in_process: return "in-process";
    case Backend::compile_only: return "compile-only";
  }
  return "?";
}

bool LinkSelector::matches(NodeId src, NodeId dst) const {
  switch (kind) {
    case Kind::all:
      return true;
    case Kind::pair:
      return (src == a && dst == b) || (src == b && dst == a);
    case Kind::group: {
      auto in = [&](NodeId n) {
        return std::find(members.begin(), members.end(), n) != members.end();
      };
      return in(src) && in(dst);
    }
  }
  return false;
}

bool NodeGroup::contains(NodeId node) const {
  if (all) return true;
  return std::find(members.begin(), members.end(), node) != members.end();
}

}  // namespace menes
