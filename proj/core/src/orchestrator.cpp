#include "menes/orchestrator.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>

#include <nlohmann/json.hpp>

#include "menes/emucore.hpp"
#include "menes/error.hpp"
#include "menes/metrics.hpp"
#include "menes/protocols.hpp"
#include "menes/routing.hpp"
#include "menes/sha256.hpp"
#include "menes/strfmt.hpp"
#include "menes/traffic.hpp"

namespace menes::orch {

using json = nlohmann::ordered_json;

// ---------------------------------------------------------------------------
// Deployment planning

std::string_view host_model_name(HostModel model) {
  switch (model) {
    case HostModel::vm_per_core: return "vm-per-core";
    case HostModel::container_per_core: return "container-per-core";
    case HostModel::container_dense: return "container-dense";
    case HostModel::private_cloud: return "private-cloud";
  }
  return "?";
}

std::optional<HostModel> host_model_from_name(std::string_view name) {
  if (name == "vm-per-core") return HostModel::vm_per_core;
  if (name == "container-per-core") return HostModel::container_per_core;
  if (name == "container-dense") return HostModel::container_dense;
  if (name == "private-cloud") return HostModel::private_cloud;
  return std::nullopt;
}

int host_capacity(HostModel model) {
  switch (model) {
    case HostModel::vm_per_core: return 24;         // one VM per core
    case HostModel::container_per_core: return 24;  // one container per core
    case HostModel::container_dense: return 88;     // packed containers
    case HostModel::private_cloud: return 24;
  }
  return 24;
}

int overhead_hosts(HostModel model) {
  // Private cloud keeps 3 controller + 3 storage hosts aside.
  return model == HostModel::private_cloud ? 6 : 0;
}

DeploymentPlan plan_deployment(std::uint32_t n_nodes, HostModel model) {
  if (n_nodes < 1) {
    throw RunError(stage::orchestrator, errc::nonpositive_node_count,
                   "deployment needs at least one node");
  }
  DeploymentPlan plan;
  plan.n_nodes = n_nodes;
  plan.host_model = model;
  plan.overhead = overhead_hosts(model);
  plan.capacity_per_host = host_capacity(model);
  int workers = static_cast<int>(
      (n_nodes + plan.capacity_per_host - 1) / plan.capacity_per_host);
  plan.hosts = plan.overhead + workers;
  plan.placement.resize(n_nodes);
  for (std::uint32_t i = 0; i < n_nodes; ++i) {
    plan.placement[i] = plan.overhead + static_cast<int>(i % workers);
  }
  return plan;
}

std::string DeploymentPlan::to_json() const {
  json j;
  j["host_model"] = std::string(host_model_name(host_model));
  j["n_nodes"] = n_nodes;
  j["hosts"] = hosts;
  j["overhead_hosts"] = overhead;
  j["capacity_per_host"] = capacity_per_host;
  j["placement"] = placement;
  // per-host manifest: which emulated nodes each host carries
  json host_nodes = json::array();
  for (int h = 0; h < hosts; ++h) host_nodes.push_back(json::array());
  for (std::uint32_t node = 0; node < placement.size(); ++node) {
    host_nodes[placement[node]].push_back(node);
  }
  j["host_nodes"] = std::move(host_nodes);
  // Published reference bootstrap times for a 30-node scenario, for
  // context next to the plan; this tool does not measure cloud bootstrap.
  j["reference_bootstrap_s"] = {{"vm_cluster", 123}, {"container_swarm", 29}};
  return j.dump(2) + "\n";
}

// ---------------------------------------------------------------------------
// Cost model

std::string_view environment_name(Environment env) {
  return env == Environment::in_house ? "in-house" : "cloud";
}

CostEstimate estimate_cost(const DeploymentPlan& plan, const Pricing& pricing,
                           double horizon_months) {
  if (pricing.server_unit_usd < 0 || pricing.cloud_vm_hourly_usd < 0 ||
      pricing.mgmt_usd_per_host_month < 0 || horizon_months < 0) {
    throw RunError(stage::orchestrator, errc::bad_pricing,
                   "pricing and horizon must be non-negative");
  }
  CostEstimate est;
  est.hosts = plan.hosts;
  est.horizon_months = horizon_months;
  const double hours = horizon_months * 730.0;
  const double mgmt =
      pricing.mgmt_usd_per_host_month * plan.hosts * horizon_months;
  if (pricing.environment == Environment::in_house) {
    est.capex_usd = pricing.server_unit_usd * plan.hosts;
    est.opex_usd = mgmt;
  } else {
    est.capex_usd = 0.0;
    est.opex_usd = pricing.cloud_vm_hourly_usd * plan.hosts * hours + mgmt;
  }
  est.total_usd = est.capex_usd + est.opex_usd;
  return est;
}

std::string CostEstimate::to_json(const DeploymentPlan& plan,
                                  const Pricing& pricing) const {
  json j;
  j["host_model"] = std::string(host_model_name(plan.host_model));
  j["environment"] = std::string(environment_name(pricing.environment));
  j["hosts"] = hosts;
  j["horizon_months"] = horizon_months;
  j["capex_usd"] = capex_usd;
  j["opex_usd"] = opex_usd;
  j["total_usd"] = total_usd;
  j["pricing"] = {{"server_unit_usd", pricing.server_unit_usd},
                  {"cloud_vm_hourly_usd", pricing.cloud_vm_hourly_usd},
                  {"mgmt_usd_per_host_month", pricing.mgmt_usd_per_host_month},
                  {"source", pricing.builtin_defaults ? "built-in-reference-defaults"
                                                      : "user"}};
  return j.dump(2) + "\n";
}

// ---------------------------------------------------------------------------
// Artifact bundle

namespace {

std::string nem_document(const emu::NemStack& stack) {
  std::string out;
  out += "<nem id=\"" + std::to_string(stack.node) + "\" data-address=\"" +
         data_address(stack.node) + "\" mgmt-address=\"" +
         mgmt_address(stack.node) + "\">\n";
  out += "  <transport unicast=\"true\" broadcast=\"true\" multicast=\"true\"/>\n";
  if (const auto* pipe = std::get_if<emu::RfPipe>(&stack.mac)) {
    out += "  <mac model=\"rf-pipe\" datarate-bps=\"" +
           fmt_double(pipe->datarate_bps) + "\" fixed-delay-s=\"" +
           fmt_double(pipe->fixed_delay_s) + "\" queue-limit=\"" +
           std::to_string(pipe->queue_limit) + "\"/>\n";
  } else if (const auto* csma = std::get_if<emu::Csma>(&stack.mac)) {
    out += "  <mac model=\"csma\" rate-class=\"" +
           std::string(rate_class_name(csma->rate_class_bps)) +
           "\" datarate-bps=\"" + fmt_double(csma->rate_class_bps) +
           "\" queue-limit=\"" + std::to_string(csma->queue_limit) + "\"/>\n";
  } else {
    const auto& tdma = std::get<emu::Tdma>(stack.mac);
    std::string slots;
    for (size_t i = 0; i < tdma.owned_slots.size(); ++i) {
      if (i) slots += ',';
      slots += std::to_string(tdma.owned_slots[i]);
    }
    out += "  <mac model=\"tdma\" slot-len-s=\"" + fmt_double(tdma.slot_len_s) +
           "\" slots-per-frame=\"" + std::to_string(tdma.slots_per_frame) +
           "\" owned-slots=\"" + slots + "\" datarate-bps=\"" +
           fmt_double(tdma.datarate_bps) + "\" queue-limit=\"" +
           std::to_string(tdma.queue_limit) + "\"/>\n";
  }
  out += "  <phy rx-threshold-db=\"" + fmt_double(stack.rx_threshold_db) + "\"/>\n";
  out += "</nem>\n";
  return out;
}

std::string routing_stub(NodeId node, const std::vector<RoutingRule>& rules) {
  std::string out = "# node " + std::to_string(node) + " (" +
                    data_address(node) + ")\n";
  bool any = false;
  for (const auto& rule : rules) {
    if (!rule.group.contains(node)) continue;
    any = true;
    out += "protocol " + std::string(protocol_name(rule.protocol)) + "\n";
    out += "preference " +
           std::to_string(rule.preference.value_or(default_preference(rule.protocol))) +
           "\n";
    if (rule.protocol == ProtocolKind::ospf_like ||
        rule.protocol == ProtocolKind::olsr_like) {
      out += "hello-interval " + fmt_double(rule.hello_interval_s) + "\n";
      out += "refresh-interval " + fmt_double(rule.refresh_interval_s) + "\n";
      out += "hold-time " + fmt_double(rule.hold_time_s) + "\n";
    }
  }
  if (!any) out += "# no routing protocol assigned\n";
  return out;
}

std::string base_recipe() {
  return
      "# layer 1: base OS + emulator core\n"
      "from ubuntu:16.04\n"
      "install emane emane-transportd\n"
      "expose bridge emane0\n";
}

std::string routing_recipe(const std::vector<RoutingRule>& rules) {
  std::set<std::string> daemons;
  for (const auto& rule : rules) {
    switch (rule.protocol) {
      case ProtocolKind::olsr_like: daemons.insert("olsrd"); break;
      case ProtocolKind::ospf_like: daemons.insert("quagga"); break;
      case ProtocolKind::centralized: daemons.insert("openvswitch"); break;
      case ProtocolKind::static_route: daemons.insert("iproute2"); break;
    }
  }
  std::string out =
      "# layer 2: routing software\n"
      "from menes/base\n";
  for (const auto& d : daemons) out += "install " + d + "\n";
  return out;
}

std::string apps_recipe(const std::vector<TrafficRule>& flows) {
  std::set<std::string> apps;
  for (const auto& f : flows) apps.insert(std::string(traffic_app_name(f.app)));
  std::string out =
      "# layer 3: measurement and monitoring apps\n"
      "from menes/routing\n";
  for (const auto& a : apps) out += "install " + a + "\n";
  out += "install telegraf\n";
  return out;
}

}  // namespace

ArtifactBundle compile_external(const config::ConcreteScenario& scenario) {
  ArtifactBundle bundle;
  auto stacks = emu::nem_stacks(scenario.network);
  for (const auto& stack : stacks) {
    std::string dir = std::to_string(stack.node) + "/";
    bundle.files[dir + "nem.xmlish"] = nem_document(stack);
    bundle.files[dir + "routing.conf"] = routing_stub(stack.node, scenario.routing);
  }
  bundle.files["recipes/base.recipe"] = base_recipe();
  bundle.files["recipes/routing.recipe"] = routing_recipe(scenario.routing);
  bundle.files["recipes/apps.recipe"] = apps_recipe(scenario.flows);

  auto eventlog = events::generate_events(scenario.spec.links, scenario.network,
                                          scenario.spec.duration_s,
                                          scenario.spec.seed);
  bundle.files["events.eel"] = events::serialize_eel(eventlog);

  json manifest;
  manifest["nodes"] = scenario.node_count;
  json files = json::object();
  std::string rollup;
  for (const auto& [path, content] : bundle.files) {
    std::string digest = sha256_hex(content);
    files[path] = digest;
    rollup += path + "\n" + digest + "\n";
  }
  bundle.bundle_hash = sha256_hex(rollup);
  manifest["files"] = std::move(files);
  manifest["bundle_hash"] = bundle.bundle_hash;
  bundle.manifest_json = manifest.dump(2) + "\n";
  return bundle;
}

namespace {

void write_text(const std::filesystem::path& path, const std::string& content) {
  std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << content;
  if (!out) throw IoError("short write to " + path.string());
}

}  // namespace

void write_bundle(const ArtifactBundle& bundle, const std::string& out_dir) {
  std::filesystem::path root(out_dir);
  for (const auto& [rel, content] : bundle.files) {
    write_text(root / rel, content);
  }
  write_text(root / "manifest.json", bundle.manifest_json);
}

// ---------------------------------------------------------------------------
// End-to-end pipeline

namespace {

template <typename Fn>
auto run_stage(stage st, Fn&& fn) {
  try {
    return fn();
  } catch (const MenesError&) {
    throw;  // already labeled
  } catch (const std::exception& e) {
    throw RunError(st, errc::bad_value, e.what());
  }
}

}  // namespace

ReportBundle run_scenario(const std::string& spec_path,
                          const std::string& out_dir,
                          const RunOverrides& overrides) {
  namespace fs = std::filesystem;
  ReportBundle report;
  report.out_dir = out_dir;

  ScenarioSpec spec =
      run_stage(stage::config, [&] { return config::parse_file(spec_path); });
  if (overrides.seed) spec.seed = *overrides.seed;
  if (overrides.duration_s) {
    spec.duration_s = *overrides.duration_s;
    for (auto& t : spec.traffic) {
      if (t.stop_s > spec.duration_s) {
        throw RunError(stage::config, errc::traffic_exceeds_duration,
                       "duration override cuts into a traffic window");
      }
    }
  }

  std::string base_dir = fs::path(spec_path).parent_path().string();
  if (base_dir.empty()) base_dir = ".";
  config::ConcreteScenario scenario = run_stage(
      stage::config, [&] { return config::expand(spec, base_dir); });
  report.node_count = scenario.node_count;
  report.flows = static_cast<int>(scenario.flows.size());

  HostModel model = overrides.host_model.value_or(HostModel::container_dense);
  DeploymentPlan plan = run_stage(stage::orchestrator, [&] {
    return plan_deployment(scenario.node_count, model);
  });
  CostEstimate cost = run_stage(stage::orchestrator, [&] {
    return estimate_cost(plan, overrides.pricing, overrides.horizon_months);
  });

  fs::path root(out_dir);
  fs::create_directories(root / "report");
  auto emit = [&](const fs::path& rel, const std::string& content) {
    write_text(root / rel, content);
    report.files_written.push_back(rel.string());
  };

  emit("report/plan.json", plan.to_json());
  emit("report/cost.json", cost.to_json(plan, overrides.pricing));

  if (spec.backend == Backend::compile_only) {
    ArtifactBundle bundle = run_stage(stage::orchestrator,
                                      [&] { return compile_external(scenario); });
    run_stage(stage::io, [&] {
      write_bundle(bundle, (root / "bundle").string());
      return 0;
    });
    for (const auto& [rel, _] : bundle.files) {
      report.files_written.push_back("bundle/" + rel);
    }
    report.files_written.push_back("bundle/manifest.json");
    return report;
  }

  events::EventLog eventlog = run_stage(stage::linkevents, [&] {
    return events::generate_events(spec.links, scenario.network,
                                   spec.duration_s, spec.seed);
  });

  emu::RunTrace trace = run_stage(stage::emulation, [&] {
    emu::Emulator emulator(scenario.network, eventlog,
                           emu::EmulatorConfig{spec.duration_s, spec.seed,
                                               spec.monitoring_period_s});
    for (auto& agent :
         routing::make_agents(scenario.routing, scenario.node_count)) {
      emulator.add_agent(std::move(agent));
    }
    auto sources = traffic::make_flow_sources(scenario.flows, spec.seed);
    for (size_t i = 0; i < sources.size(); ++i) {
      emulator.add_flow(static_cast<int>(i), std::move(sources[i]));
    }
    return emulator.run();
  });

  auto records = run_stage(stage::traffic, [&] {
    return traffic::collect_flows(trace, scenario.flows);
  });
  std::vector<traffic::MetricSummary> summaries;
  for (const auto& rec : records) summaries.push_back(traffic::summarize(rec));

  metrics::MetricStore store;
  metrics::record_run(store, trace);

  emit("trace.json", trace.to_json());
  emit("trace.csv", trace.to_csv());
  emit("report/summary.csv", traffic::summaries_csv(summaries));
  emit("report/summary.json", traffic::summaries_json(summaries));
  emit("report/routes.txt", routing::dump_routes(trace.final_tables));
  emit("report/metrics.csv", store.export_csv());
  report.emulated = true;
  return report;
}

}  // namespace menes::orch
