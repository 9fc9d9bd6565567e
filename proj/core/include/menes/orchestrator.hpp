#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "menes/config.hpp"
#include "menes/linkevents.hpp"

namespace menes::orch {

// ---------------------------------------------------------------------------
// Deployment planning

enum class HostModel { vm_per_core, container_per_core, container_dense, private_cloud };
std::string_view host_model_name(HostModel model);
std::optional<HostModel> host_model_from_name(std::string_view name);

// Per-host node capacity and fixed overhead hosts (controller/storage).
int host_capacity(HostModel model);
int overhead_hosts(HostModel model);

struct DeploymentPlan {
  std::uint32_t n_nodes = 0;
  HostModel host_model = HostModel::container_dense;
  int hosts = 0;           // overhead + workers
  int overhead = 0;
  int capacity_per_host = 0;
  std::vector<int> placement;  // node index -> host index

  std::string to_json() const;
};

// hosts = overhead + ceil(n / capacity); round-robin placement over the
// worker hosts, overhead hosts carry no emulated nodes.
DeploymentPlan plan_deployment(std::uint32_t n_nodes, HostModel model);

// ---------------------------------------------------------------------------
// Cost model

enum class Environment { in_house, cloud };
std::string_view environment_name(Environment env);

struct Pricing {
  Environment environment = Environment::cloud;
  double server_unit_usd = 10000.0;       // in-house capex per host
  double cloud_vm_hourly_usd = 24.67;     // built-in reference default
  double mgmt_usd_per_host_month = 0.0;
  bool builtin_defaults = true;           // flagged in the report
};

struct CostEstimate {
  double capex_usd = 0.0;
  double opex_usd = 0.0;
  double total_usd = 0.0;
  double horizon_months = 0.0;
  int hosts = 0;

  std::string to_json(const DeploymentPlan& plan, const Pricing& pricing) const;
};

// in-house: capex = hosts * unit cost, opex = management over the horizon.
// cloud:    capex = 0, opex = hosts * hourly rate * hours + management.
// hours(horizon) = months * 730. Negative pricing is rejected.
CostEstimate estimate_cost(const DeploymentPlan& plan, const Pricing& pricing,
                           double horizon_months);

// ---------------------------------------------------------------------------
// External-tool artifact bundle

struct ArtifactBundle {
  // Relative path -> file bytes; deterministic for a given scenario.
  std::map<std::string, std::string> files;
  std::string manifest_json;
  std::string bundle_hash;
};

// Per-node NEM document (transport/MAC/PHY), per-node routing stub, the
// three-layer image recipes, the EEL file, and a manifest of content
// hashes.
ArtifactBundle compile_external(const config::ConcreteScenario& scenario);

void write_bundle(const ArtifactBundle& bundle, const std::string& out_dir);

// ---------------------------------------------------------------------------
// End-to-end pipeline

struct RunOverrides {
  std::optional<std::uint64_t> seed;
  std::optional<int> duration_s;
  std::optional<HostModel> host_model;
  Pricing pricing;
  double horizon_months = 24.0;
};

struct ReportBundle {
  std::string out_dir;
  std::uint32_t node_count = 0;
  int flows = 0;
  bool emulated = false;
  std::vector<std::string> files_written;
};

// parse -> expand -> events -> run -> summarize -> export. Writes
// report/{summary.csv,summary.json,routes.txt,metrics.csv,plan.json,
// cost.json} plus trace.{json,csv} under out_dir; a compile-only backend
// writes bundle/ instead of running. Errors carry their pipeline stage.
ReportBundle run_scenario(const std::string& spec_path,
                          const std::string& out_dir,
                          const RunOverrides& overrides = {});

}  // namespace menes::orch
