#include "menes/emucore.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include <nlohmann/json.hpp>

#include "menes/error.hpp"
#include "menes/strfmt.hpp"

namespace menes::emu {

using json = nlohmann::ordered_json;

// ---------------------------------------------------------------------------
// MAC models

MacKind mac_kind(const MacModel& model) {
  if (std::holds_alternative<RfPipe>(model)) return MacKind::rf_pipe;
  if (std::holds_alternative<Csma>(model)) return MacKind::csma;
  return MacKind::tdma;
}

int queue_limit(const MacModel& model) {
  return std::visit([](const auto& m) { return m.queue_limit; }, model);
}

MacModel map_rate_to_mac(double requested_rate_bps) {
  if (is_80211b_rate(requested_rate_bps) || is_80211g_rate(requested_rate_bps)) {
    return Csma{requested_rate_bps, 100};
  }
  return RfPipe{requested_rate_bps, 0.0, 100};
}

MacModel make_mac_model(const MacConfig& config) {
  switch (config.kind) {
    case MacKind::rf_pipe:
      return RfPipe{config.datarate_bps, config.fixed_delay_s, config.queue_limit};
    case MacKind::csma:
      return Csma{config.datarate_bps, config.queue_limit};
    case MacKind::tdma:
      return Tdma{config.slot_len_s, config.slots_per_frame, config.owned_slots,
                  config.datarate_bps, config.queue_limit};
  }
  return RfPipe{};
}

double transmission_delay(int size_bytes, double rate_bps) {
  return 8.0 * static_cast<double>(size_bytes) / rate_bps;
}

bool phy_receive(double current_pathloss_db, double rx_threshold_db) {
  return current_pathloss_db <= rx_threshold_db;
}

namespace {

// Start of the first owned slot at or after `t`.
SimTime next_owned_slot(const Tdma& mac, SimTime t) {
  const SimTime slot_us = us_from_s(mac.slot_len_s);
  const SimTime frame_us = slot_us * mac.slots_per_frame;
  std::vector<int> slots = mac.owned_slots;
  std::sort(slots.begin(), slots.end());
  SimTime base = (t / frame_us) * frame_us;
  for (int pass = 0; pass < 2; ++pass) {
    for (int s : slots) {
      SimTime start = base + static_cast<SimTime>(s) * slot_us;
      if (start >= t) return start;
    }
    base += frame_us;
  }
  return base;  // unreachable with non-empty slots
}

}  // namespace

SimTime mac_service_departure(const MacModel& model, SimTime now,
                              int size_bytes, int contenders) {
  if (const auto* pipe = std::get_if<RfPipe>(&model)) {
    return now + us_from_s(transmission_delay(size_bytes, pipe->datarate_bps)) +
           us_from_s(pipe->fixed_delay_s);
  }
  if (const auto* csma = std::get_if<Csma>(&model)) {
    double effective = csma->rate_class_bps / std::max(1, contenders);
    return now + us_from_s(transmission_delay(size_bytes, effective));
  }
  const auto& tdma = std::get<Tdma>(model);
  SimTime slot_start = next_owned_slot(tdma, now);
  return slot_start + us_from_s(transmission_delay(size_bytes, tdma.datarate_bps));
}

std::string_view packet_kind_name(PacketKind kind) {
  switch (kind) {
    case PacketKind::data_udp: return "data-udp";
    case PacketKind::data_tcp_segment: return "data-tcp-segment";
    case PacketKind::icmp_echo: return "icmp-echo";
    case PacketKind::icmp_reply: return "icmp-reply";
    case PacketKind::control_hello: return "control-hello";
    case PacketKind::control_lsa: return "control-lsa";
  }
  return "?";
}

std::string_view drop_reason_name(DropReason reason) {
  switch (reason) {
    case DropReason::phy: return "phy";
    case DropReason::queue_full: return "queue-full";
    case DropReason::ttl_exceeded: return "ttl-exceeded";
    case DropReason::no_route: return "no-route";
  }
  return "?";
}

std::vector<NemStack> nem_stacks(const topo::Network& net) {
  std::vector<NemStack> stacks;
  stacks.reserve(net.node_count());
  for (NodeId n = 0; n < net.node_count(); ++n) {
    NemStack s;
    s.node = n;
    const auto& out = net.out_links(n);
    if (!out.empty()) {
      const auto& params = net.link(out.front()).params;
      s.mac = make_mac_model(params.mac);
      s.rx_threshold_db = params.rx_threshold_db;
    } else {
      s.mac = RfPipe{};
    }
    stacks.push_back(std::move(s));
  }
  return stacks;
}

// ---------------------------------------------------------------------------
// Emulator internals

namespace {

struct Scheduled {
  SimTime t;
  std::uint64_t seq;
  std::function<void()> fn;
};

struct ScheduledAfter {
  bool operator()(const Scheduled& a, const Scheduled& b) const {
    return std::tie(a.t, a.seq) > std::tie(b.t, b.seq);
  }
};

struct LinkState {
  MacModel mac;
  double current_loss_db = 0.0;
  double rx_threshold_db = 100.0;
  SimTime prop_delay = 0;
  std::deque<Packet> queue;
  bool busy = false;
  SimTime tdma_floor = 0;  // earliest usable slot start
};

}  // namespace

struct Emulator::Impl {
  topo::Network net;
  events::EventLog eventlog;
  EmulatorConfig config;
  SimTime duration = 0;

  std::priority_queue<Scheduled, std::vector<Scheduled>, ScheduledAfter> pending;
  SimTime now = 0;
  std::uint64_t event_seq = 0;
  std::uint64_t next_packet_id = 1;

  std::vector<LinkState> links;
  std::vector<int> node_domain;            // csma broadcast domain per node
  std::vector<int> node_busy_csma;         // busy csma out-links per node
  std::vector<int> domain_active;          // transmitting nodes per domain

  std::vector<std::unique_ptr<RoutingAgent>> agents;
  std::map<int, std::unique_ptr<FlowSource>> flows;

  std::map<std::pair<NodeId, int>, routing::RouteTable> proto_tables;
  std::vector<routing::RouteTable> merged;

  RunTrace trace;
  std::map<std::pair<int, std::uint32_t>, size_t> log_index;  // (flow, seq)
  std::map<int, std::set<std::uint32_t>> tcp_acked;
  std::vector<std::uint64_t> node_hops;  // since last resource sample
  std::uint64_t in_transit = 0;

  Impl(const topo::Network& n, events::EventLog log, EmulatorConfig cfg)
      : net(n), eventlog(std::move(log)), config(cfg) {
    duration = static_cast<SimTime>(cfg.duration_s) * kUsPerSec;
    links.reserve(net.links().size());
    for (const auto& l : net.links()) {
      LinkState state;
      state.mac = make_mac_model(l.params.mac);
      state.current_loss_db = l.params.initial_pathloss_db;
      state.rx_threshold_db = l.params.rx_threshold_db;
      state.prop_delay = us_from_s(l.params.prop_delay_s);
      links.push_back(std::move(state));
    }
    build_csma_domains();
    node_busy_csma.assign(net.node_count(), 0);
    node_hops.assign(net.node_count(), 0);
    merged.resize(net.node_count());
    for (NodeId i = 0; i < net.node_count(); ++i) merged[i].node = i;

    for (const auto& ev : eventlog.events) {
      if (net.find_link(ev.src, ev.dst) < 0) {
        throw RunError(stage::emulation, errc::dangling_link,
                       "event references unknown link " + std::to_string(ev.src) +
                           "->" + std::to_string(ev.dst));
      }
    }
  }

  // Nodes joined by CSMA links share a medium (union-find over endpoints).
  void build_csma_domains() {
    std::vector<int> parent(net.node_count());
    for (size_t i = 0; i < parent.size(); ++i) parent[i] = static_cast<int>(i);
    std::function<int(int)> find = [&](int x) {
      while (parent[x] != x) x = parent[x] = parent[parent[x]];
      return x;
    };
    for (const auto& l : net.links()) {
      if (l.params.mac.kind != MacKind::csma) continue;
      int a = find(static_cast<int>(l.src));
      int b = find(static_cast<int>(l.dst));
      if (a != b) parent[a] = b;
    }
    node_domain.assign(net.node_count(), -1);
    int next_dom = 0;
    std::map<int, int> root_to_dom;
    for (NodeId n = 0; n < net.node_count(); ++n) {
      int root = find(static_cast<int>(n));
      auto [it, inserted] = root_to_dom.try_emplace(root, next_dom);
      if (inserted) ++next_dom;
      node_domain[n] = it->second;
    }
    domain_active.assign(next_dom, 0);
  }

  void schedule(SimTime t, std::function<void()> fn) {
    pending.push(Scheduled{t, event_seq++, std::move(fn)});
  }

  void count_hop(NodeId node) {
    ++trace.hop_events;
    ++node_hops[node];
  }

  // -- forwarding ----------------------------------------------------------

  void drop(Packet&& pkt, DropReason reason) {
    switch (reason) {
      case DropReason::phy: ++trace.counters.dropped_phy; break;
      case DropReason::queue_full: ++trace.counters.dropped_queue_full; break;
      case DropReason::ttl_exceeded: ++trace.counters.dropped_ttl; break;
      case DropReason::no_route: ++trace.counters.dropped_no_route; break;
    }
    auto it = log_index.find({pkt.flow_id, pkt.app_seq});
    if (it != log_index.end()) {
      auto& entry = trace.packet_log[it->second];
      if (!entry.recv) entry.drop = reason;  // terminal state unless delivered
      entry.hop_trace = pkt.hop_trace;
    }
  }

  void enqueue(LinkId link_id, Packet pkt) {
    auto& state = links[link_id];
    if (static_cast<int>(state.queue.size()) >= queue_limit(state.mac)) {
      drop(std::move(pkt), DropReason::queue_full);
      return;
    }
    state.queue.push_back(std::move(pkt));
    try_service(link_id);
  }

  void try_service(LinkId link_id) {
    auto& state = links[link_id];
    if (state.busy || state.queue.empty()) return;
    state.busy = true;

    const auto& link = net.link(link_id);
    NodeId src = link.src;
    bool csma = std::holds_alternative<Csma>(state.mac);
    if (csma && node_busy_csma[src]++ == 0) ++domain_active[node_domain[src]];

    const Packet& head = state.queue.front();
    SimTime depart;
    SimTime occupied_until;
    if (const auto* pipe = std::get_if<RfPipe>(&state.mac)) {
      occupied_until =
          now + us_from_s(transmission_delay(head.size_bytes, pipe->datarate_bps));
      depart = occupied_until + us_from_s(pipe->fixed_delay_s);
    } else if (std::holds_alternative<Csma>(state.mac)) {
      int contenders = domain_active[node_domain[src]];
      depart = mac_service_departure(state.mac, now, head.size_bytes, contenders);
      occupied_until = depart;
    } else {
      const auto& tdma = std::get<Tdma>(state.mac);
      SimTime slot_start = next_owned_slot(tdma, std::max(now, state.tdma_floor));
      depart = slot_start +
               us_from_s(transmission_delay(head.size_bytes, tdma.datarate_bps));
      occupied_until = depart;
      state.tdma_floor = slot_start + us_from_s(tdma.slot_len_s);
    }

    schedule(occupied_until, [this, link_id, depart] { finish_service(link_id, depart); });
  }

  void finish_service(LinkId link_id, SimTime depart) {
    auto& state = links[link_id];
    const auto& link = net.link(link_id);
    Packet pkt = std::move(state.queue.front());
    state.queue.pop_front();
    state.busy = false;
    if (std::holds_alternative<Csma>(state.mac) &&
        --node_busy_csma[link.src] == 0) {
      --domain_active[node_domain[link.src]];
    }

    // PHY decision at transmission end, with the loss in force now.
    if (phy_receive(state.current_loss_db, state.rx_threshold_db)) {
      SimTime arrive = depart + state.prop_delay;
      NodeId dst = link.dst;
      ++in_transit;
      schedule(arrive, [this, pkt = std::move(pkt), dst, arrive]() mutable {
        --in_transit;
        handle_at_node(dst, std::move(pkt), arrive);
      });
    } else {
      drop(std::move(pkt), DropReason::phy);
    }

    try_service(link_id);
  }

  void deliver_flow_packet(const Packet& pkt, SimTime t) {
    ++trace.counters.delivered;
    auto it = log_index.find({pkt.flow_id, pkt.app_seq});
    if (it == log_index.end()) return;
    auto& entry = trace.packet_log[it->second];
    if (!entry.recv) {
      entry.recv = t;
      entry.drop.reset();
      entry.hop_trace = pkt.hop_trace;
    }
  }

  void handle_at_node(NodeId node, Packet pkt, SimTime t) {
    pkt.hop_trace.push_back({node, t});
    count_hop(node);

    switch (pkt.kind) {
      case PacketKind::control_hello:
      case PacketKind::control_lsa: {
        ++trace.counters.delivered;  // consumed by the control plane
        EmuApi api(*owner);
        for (auto& agent : agents) agent->on_control(api, node, pkt);
        return;
      }
      default:
        break;
    }

    if (pkt.dst == node) {
      switch (pkt.kind) {
        case PacketKind::icmp_echo: {
          ++trace.counters.delivered;
          // The receiving stack answers echoes itself.
          Packet reply;
          reply.id = next_packet_id++;
          reply.flow_id = pkt.flow_id;
          reply.src = node;
          reply.dst = pkt.src;
          reply.size_bytes = pkt.size_bytes;
          reply.kind = PacketKind::icmp_reply;
          reply.created_at = t;
          reply.app_seq = pkt.app_seq;
          ++trace.counters.sent;
          inject(std::move(reply), t);
          return;
        }
        case PacketKind::icmp_reply:
          deliver_flow_packet(pkt, t);  // recv time closes the RTT
          return;
        case PacketKind::data_tcp_segment: {
          if (pkt.tcp_is_ack) {
            ++trace.counters.delivered;
            auto flow_it = flows.find(pkt.flow_id);
            auto& acked = tcp_acked[pkt.flow_id];
            if (acked.insert(pkt.app_seq).second) {
              auto idx = log_index.find({pkt.flow_id, pkt.app_seq});
              if (idx != log_index.end()) {
                trace.tcp_stats[pkt.flow_id].acked_bytes +=
                    trace.packet_log[idx->second].size_bytes;
              }
            }
            if (flow_it != flows.end()) {
              EmuApi api(*owner);
              flow_it->second->on_tcp_ack(api, pkt.app_seq, t);
            }
            return;
          }
          deliver_flow_packet(pkt, t);
          // Ack every segment, duplicates included.
          Packet ack;
          ack.id = next_packet_id++;
          ack.flow_id = pkt.flow_id;
          ack.src = node;
          ack.dst = pkt.src;
          ack.size_bytes = 40;
          ack.kind = PacketKind::data_tcp_segment;
          ack.tcp_is_ack = true;
          ack.created_at = t;
          ack.app_seq = pkt.app_seq;
          ++trace.counters.sent;
          inject(std::move(ack), t);
          return;
        }
        default:
          deliver_flow_packet(pkt, t);
          return;
      }
    }

    forward(node, std::move(pkt));
  }

  void forward(NodeId node, Packet pkt) {
    if (pkt.hop_trace.size() > 2 * static_cast<size_t>(net.node_count())) {
      drop(std::move(pkt), DropReason::ttl_exceeded);
      return;
    }
    const auto& table = merged[node];
    auto it = table.entries.find(pkt.dst);
    if (it == table.entries.end()) {
      drop(std::move(pkt), DropReason::no_route);
      return;
    }
    enqueue(it->second.out_port, std::move(pkt));
  }

  // Injection: the packet enters its source node's stack.
  void inject(Packet pkt, SimTime t) {
    handle_at_node(pkt.src, std::move(pkt), t);
  }

  // -- control/api ---------------------------------------------------------

  void install_table(NodeId node, ProtocolKind proto, routing::RouteTable table) {
    proto_tables[{node, static_cast<int>(proto)}] = std::move(table);
    std::vector<routing::RouteTable> sources;
    for (const auto& [key, t] : proto_tables) {
      if (key.first == node) sources.push_back(t);
    }
    routing::RouteTable next = routing::merge_tables(node, sources);
    bool changed = !(next == merged[node]);
    merged[node] = std::move(next);
    trace.route_log.push_back(RouteInstall{now, node, proto, changed});
    if (changed) trace.last_route_change = now;
  }

  void broadcast_control(
      NodeId origin, PacketKind kind, int size_bytes,
      std::variant<std::monostate, HelloPayload, LsaPayload> payload) {
    for (LinkId link_id : net.out_links(origin)) {
      Packet pkt;
      pkt.id = next_packet_id++;
      pkt.flow_id = -1;
      pkt.src = origin;
      pkt.dst = net.link(link_id).dst;
      pkt.size_bytes = size_bytes;
      pkt.kind = kind;
      pkt.created_at = now;
      pkt.control = payload;
      pkt.hop_trace.push_back({origin, now});
      count_hop(origin);
      ++trace.counters.sent;
      if (kind == PacketKind::control_hello) ++trace.counters.hellos_sent;
      if (kind == PacketKind::control_lsa) ++trace.counters.lsas_sent;
      enqueue(link_id, std::move(pkt));
    }
  }

  void send_data(int flow_id, NodeId src, NodeId dst, PacketKind kind,
                 int size_bytes, std::uint32_t app_seq, bool tcp_is_ack) {
    Packet pkt;
    pkt.id = next_packet_id++;
    pkt.flow_id = flow_id;
    pkt.src = src;
    pkt.dst = dst;
    pkt.size_bytes = size_bytes;
    pkt.kind = kind;
    pkt.created_at = now;
    pkt.app_seq = app_seq;
    pkt.tcp_is_ack = tcp_is_ack;
    ++trace.counters.sent;

    auto key = std::make_pair(flow_id, app_seq);
    if (!tcp_is_ack) {
      auto it = log_index.find(key);
      if (it == log_index.end()) {
        PacketLogEntry entry;
        entry.flow_id = flow_id;
        entry.packet_id = pkt.id;
        entry.src = src;
        entry.dst = dst;
        entry.sent = now;
        entry.size_bytes = size_bytes;
        log_index[key] = trace.packet_log.size();
        trace.packet_log.push_back(std::move(entry));
      } else if (kind == PacketKind::data_tcp_segment) {
        ++trace.tcp_stats[flow_id].retransmits;
      }
    }
    inject(std::move(pkt), now);
  }

  // -- run loop ------------------------------------------------------------

  Emulator* owner = nullptr;

  void sample_resources(SimTime t) {
    for (NodeId n = 0; n < net.node_count(); ++n) {
      std::uint64_t mem = 0;
      for (LinkId id : net.out_links(n)) {
        for (const auto& p : links[id].queue) mem += p.size_bytes;
      }
      trace.resources.push_back(
          ResourceSample{s_from_us(t), n, node_hops[n], mem});
      node_hops[n] = 0;
    }
  }

  RunTrace run() {
    for (auto& agent : agents) {
      auto* a = agent.get();
      schedule(0, [this, a] {
        EmuApi inner(*owner);
        a->start(inner);
      });
    }
    for (auto& [id, flow] : flows) {
      auto* f = flow.get();
      schedule(0, [this, f] {
        EmuApi inner(*owner);
        f->start(inner);
      });
    }
    for (const auto& ev : eventlog.events) {
      schedule(ev.time, [this, ev] {
        auto id = net.find_link(ev.src, ev.dst);
        links[id].current_loss_db = ev.pathloss_db;
        EmuApi inner(*owner);
        for (auto& agent : agents) agent->on_link_event(inner, ev);
      });
    }
    const SimTime period = us_from_s(config.monitoring_period_s);
    if (period > 0) {
      for (SimTime t = period; t < duration; t += period) {
        schedule(t, [this, t] { sample_resources(t); });
      }
    }

    while (!pending.empty() && pending.top().t <= duration) {
      Scheduled ev = pending.top();
      pending.pop();
      now = ev.t;
      ev.fn();
    }
    now = duration;
    sample_resources(duration);

    std::uint64_t queued = 0;
    for (const auto& l : links) queued += l.queue.size();
    trace.counters.in_flight_at_end = in_transit + queued;
    trace.final_tables = merged;
    return std::move(trace);
  }
};

// ---------------------------------------------------------------------------
// EmuApi

SimTime EmuApi::now() const { return emu_.impl_->now; }
const topo::Network& EmuApi::network() const { return emu_.impl_->net; }

void EmuApi::schedule(SimTime t, std::function<void()> fn) {
  emu_.impl_->schedule(t, std::move(fn));
}

void EmuApi::send_data(int flow_id, NodeId src, NodeId dst, PacketKind kind,
                       int size_bytes, std::uint32_t app_seq, bool tcp_is_ack) {
  emu_.impl_->send_data(flow_id, src, dst, kind, size_bytes, app_seq, tcp_is_ack);
}

void EmuApi::broadcast_control(
    NodeId origin, PacketKind kind, int size_bytes,
    std::variant<std::monostate, HelloPayload, LsaPayload> payload) {
  emu_.impl_->broadcast_control(origin, kind, size_bytes, std::move(payload));
}

void EmuApi::install_table(NodeId node, ProtocolKind proto,
                           routing::RouteTable table) {
  emu_.impl_->install_table(node, proto, std::move(table));
}

bool EmuApi::link_live(const topo::Link& link) const {
  const auto& state = emu_.impl_->links[link.id];
  return phy_receive(state.current_loss_db, state.rx_threshold_db);
}

// ---------------------------------------------------------------------------
// Emulator

Emulator::Emulator(const topo::Network& net, events::EventLog eventlog,
                   EmulatorConfig config)
    : impl_(std::make_unique<Impl>(net, std::move(eventlog), config)) {
  impl_->owner = this;
}

Emulator::~Emulator() = default;

void Emulator::add_agent(std::unique_ptr<RoutingAgent> agent) {
  impl_->agents.push_back(std::move(agent));
}

void Emulator::add_flow(int flow_id, std::unique_ptr<FlowSource> source) {
  impl_->flows[flow_id] = std::move(source);
}

RunTrace Emulator::run() { return impl_->run(); }

// ---------------------------------------------------------------------------
// Exports

std::string RunTrace::to_json() const {
  json j;
  json c;
  c["sent"] = counters.sent;
  c["delivered"] = counters.delivered;
  c["dropped_phy"] = counters.dropped_phy;
  c["dropped_queue_full"] = counters.dropped_queue_full;
  c["dropped_ttl"] = counters.dropped_ttl;
  c["dropped_no_route"] = counters.dropped_no_route;
  c["in_flight_at_end"] = counters.in_flight_at_end;
  c["hellos_sent"] = counters.hellos_sent;
  c["lsas_sent"] = counters.lsas_sent;
  j["counters"] = c;
  j["hop_events"] = hop_events;
  j["last_route_change_s"] = s_from_us(last_route_change);

  json packets = json::array();
  for (const auto& p : packet_log) {
    json e;
    e["flow_id"] = p.flow_id;
    e["packet_id"] = p.packet_id;
    e["src"] = p.src;
    e["dst"] = p.dst;
    e["sent_s"] = fmt_us_as_seconds(p.sent);
    if (p.recv) e["recv_s"] = fmt_us_as_seconds(*p.recv);
    if (p.drop) e["drop"] = std::string(drop_reason_name(*p.drop));
    e["size_bytes"] = p.size_bytes;
    packets.push_back(std::move(e));
  }
  j["packets"] = std::move(packets);

  json res_arr = json::array();
  for (const auto& r : resources) {
    json e;
    e["t_s"] = r.t_s;
    e["node"] = r.node;
    e["cpu_proxy"] = r.cpu_proxy;
    e["mem_proxy"] = r.mem_proxy;
    res_arr.push_back(std::move(e));
  }
  j["resources"] = std::move(res_arr);

  json tcp = json::object();
  for (const auto& [flow, stats] : tcp_stats) {
    json e;
    e["acked_bytes"] = stats.acked_bytes;
    e["retransmits"] = stats.retransmits;
    tcp[std::to_string(flow)] = std::move(e);
  }
  j["tcp"] = std::move(tcp);
  return j.dump(2) + "\n";
}

std::string RunTrace::to_csv() const {
  std::string out = "flow_id,packet_id,src,dst,sent_s,recv_s,size_bytes\n";
  for (const auto& p : packet_log) {
    out += std::to_string(p.flow_id) + ',';
    out += std::to_string(p.packet_id) + ',';
    out += std::to_string(p.src) + ',';
    out += std::to_string(p.dst) + ',';
    out += fmt_us_as_seconds(p.sent) + ',';
    if (p.recv) {
      out += fmt_us_as_seconds(*p.recv);
    } else if (p.drop) {
      out += drop_reason_name(*p.drop);
    } else {
      out += "in-flight";
    }
    out += ',' + std::to_string(p.size_bytes) + '\n';
  }
  return out;
}

}  // namespace menes::emu
