#include "menes/protocols.hpp"

#include <map>

#include "menes/routing.hpp"

namespace menes::routing {
namespace {

constexpr int kHelloBytes = 64;
constexpr int kLsaHeaderBytes = 64;
constexpr int kLsaEdgeBytes = 12;
constexpr SimTime kLsaDebounce = 100'000;  // batch neighbor churn into one lsa

std::vector<NodeId> resolve_members(const NodeGroup& group,
                                    std::uint32_t node_count) {
  if (group.all) {
    std::vector<NodeId> all(node_count);
    for (NodeId i = 0; i < node_count; ++i) all[i] = i;
    return all;
  }
  return group.members;
}

// Omniscient tables computed once at startup.
class StaticAgent : public emu::RoutingAgent {
 public:
  StaticAgent(std::vector<NodeId> members, int preference)
      : members_(std::move(members)), preference_(preference) {}

  void start(emu::EmuApi& api) override {
    auto tables = centralized_compute(
        api.network(), [&](const topo::Link& l) { return api.link_live(l); },
        preference_);
    for (NodeId n : members_) {
      auto t = tables[n];
      for (auto& [dest, e] : t.entries) {
        e.origin_protocol = ProtocolKind::static_route;
      }
      api.install_table(n, ProtocolKind::static_route, std::move(t));
    }
  }

 private:
  std::vector<NodeId> members_;
  int preference_;
};

// Controller with the true current graph; recomputes after every link event.
class CentralizedAgent : public emu::RoutingAgent {
 public:
  CentralizedAgent(std::vector<NodeId> members, int preference)
      : members_(std::move(members)), preference_(preference) {}

  void start(emu::EmuApi& api) override { recompute(api); }

  void on_link_event(emu::EmuApi& api, const events::LinkEvent&) override {
    recompute(api);
  }

 private:
  void recompute(emu::EmuApi& api) {
    auto tables = centralized_compute(
        api.network(), [&](const topo::Link& l) { return api.link_live(l); },
        preference_);
    for (NodeId n : members_) {
      api.install_table(n, ProtocolKind::centralized, std::move(tables[n]));
    }
  }

  std::vector<NodeId> members_;
  int preference_;
};

// Proactive link state: periodic hellos discover in-edges, each node floods
// its heard-neighbor set with a sequence number, SPF over the collected
// view. The olsr-like flavor floods fully (no relay-set optimization).
class LinkStateAgent : public emu::RoutingAgent {
 public:
  LinkStateAgent(NodeId self, ProtocolKind proto, const RoutingRule& rule)
      : self_(self),
        proto_(proto),
        preference_(rule.preference.value_or(default_preference(proto))),
        hello_interval_(us_from_s(rule.hello_interval_s)),
        refresh_interval_(us_from_s(rule.refresh_interval_s)),
        neighbor_hold_(us_from_s(rule.hold_time_s)),
        // Topology entries must outlive the refresh period or converged
        // tables would flap between refreshes.
        db_hold_(3 * us_from_s(rule.refresh_interval_s)) {}

  void start(emu::EmuApi& api) override {
    hello_tick(api);
    refresh_tick(api);
  }

  void on_control(emu::EmuApi& api, NodeId at, const emu::Packet& pkt) override {
    if (at != self_) return;
    if (const auto* hello = std::get_if<emu::HelloPayload>(&pkt.control)) {
      auto [it, inserted] = neighbors_.try_emplace(hello->origin, api.now());
      it->second = api.now();
      if (inserted) schedule_lsa(api);
      return;
    }
    if (const auto* lsa = std::get_if<emu::LsaPayload>(&pkt.control)) {
      bool fresh = db_.apply(lsa->origin, lsa->seq, api.now(), lsa->edges);
      if (fresh) {
        // Flood duplicate-suppressed copies onward.
        api.broadcast_control(
            self_, emu::PacketKind::control_lsa,
            kLsaHeaderBytes + kLsaEdgeBytes * static_cast<int>(lsa->edges.size()),
            *lsa);
        recompute(api);
      }
    }
  }

 private:
  void hello_tick(emu::EmuApi api) {
    api.broadcast_control(self_, emu::PacketKind::control_hello, kHelloBytes,
                          emu::HelloPayload{self_});
    bool lost = false;
    for (auto it = neighbors_.begin(); it != neighbors_.end();) {
      if (api.now() - it->second > neighbor_hold_) {
        it = neighbors_.erase(it);
        lost = true;
      } else {
        ++it;
      }
    }
    if (lost) schedule_lsa(api);
    if (db_.age_out(api.now(), db_hold_)) recompute(api);
    api.schedule(api.now() + hello_interval_,
                 [this, api]() mutable { hello_tick(api); });
  }

  void refresh_tick(emu::EmuApi api) {
    originate_lsa(api);
    api.schedule(api.now() + refresh_interval_,
                 [this, api]() mutable { refresh_tick(api); });
  }

  void schedule_lsa(emu::EmuApi api) {
    if (lsa_pending_) return;
    lsa_pending_ = true;
    api.schedule(api.now() + kLsaDebounce, [this, api]() mutable {
      lsa_pending_ = false;
      originate_lsa(api);
    });
  }

  void originate_lsa(emu::EmuApi& api) {
    ++seq_;
    std::vector<std::pair<NodeId, NodeId>> edges;
    for (const auto& [nbr, heard] : neighbors_) edges.push_back({nbr, self_});
    db_.apply(self_, seq_, api.now(), edges);
    api.broadcast_control(
        self_, emu::PacketKind::control_lsa,
        kLsaHeaderBytes + kLsaEdgeBytes * static_cast<int>(edges.size()),
        emu::LsaPayload{self_, seq_, std::move(edges)});
    recompute(api);
  }

  void recompute(emu::EmuApi& api) {
    RouteTable table =
        spf(db_, self_, api.network().node_count(), api.network(), proto_,
            preference_);
    if (last_installed_ && *last_installed_ == table) return;
    last_installed_ = table;
    api.install_table(self_, proto_, std::move(table));
  }

  NodeId self_;
  ProtocolKind proto_;
  int preference_;
  SimTime hello_interval_;
  SimTime refresh_interval_;
  SimTime neighbor_hold_;
  SimTime db_hold_;

  LinkStateDb db_;
  std::map<NodeId, SimTime> neighbors_;  // -> last heard
  std::uint64_t seq_ = 0;
  bool lsa_pending_ = false;
  std::optional<RouteTable> last_installed_;
};

}  // namespace

std::vector<std::unique_ptr<emu::RoutingAgent>> make_agents(
    const std::vector<RoutingRule>& rules, std::uint32_t node_count) {
  std::vector<std::unique_ptr<emu::RoutingAgent>> agents;
  for (const auto& rule : rules) {
    auto members = resolve_members(rule.group, node_count);
    int pref = rule.preference.value_or(default_preference(rule.protocol));
    switch (rule.protocol) {
      case ProtocolKind::static_route:
        agents.push_back(std::make_unique<StaticAgent>(members, pref));
        break;
      case ProtocolKind::centralized:
        agents.push_back(std::make_unique<CentralizedAgent>(members, pref));
        break;
      case ProtocolKind::ospf_like:
      case ProtocolKind::olsr_like:
        for (NodeId n : members) {
          agents.push_back(
              std::make_unique<LinkStateAgent>(n, rule.protocol, rule));
        }
        break;
    }
  }
  return agents;
}

}  // namespace menes::routing
