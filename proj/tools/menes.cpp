// menes: desk-scale wireless network test and validation pipeline.
//
// Subcommands: validate, plan, compile, run, report, cost, sweep.
// Exit codes: 0 ok, 2 configuration error, 3 runtime error, 4 I/O error.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "menes/config.hpp"
#include "menes/error.hpp"
#include "menes/orchestrator.hpp"
#include "menes/strfmt.hpp"

namespace fs = std::filesystem;
using namespace menes;

namespace {

struct GlobalOpts {
  std::string out_dir;
  bool quiet = false;
  std::string format = "csv";
};

std::string resolve_out_dir(const std::string& flag_value) {
  if (!flag_value.empty()) return flag_value;
  if (const char* env = std::getenv("MENES_OUT"); env && *env) return env;
  return "menes-out";
}

void write_file(const fs::path& path, const std::string& content) {
  fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << content;
}

int exit_code_for(const MenesError& e) {
  switch (e.where()) {
    case stage::config:
    case stage::topology:
      return 2;
    case stage::io:
      return 4;
    default:
      return 3;
  }
}

void print_error(const MenesError& e) {
  std::cerr << "error [stage=" << stage_name(e.where()) << "] ";
  if (const auto* ce = dynamic_cast<const ConfigError*>(&e);
      ce && ce->has_position()) {
    std::cerr << "line " << ce->line() << " col " << ce->column() << ": ";
  }
  std::cerr << e.what() << " (" << errc_name(e.code()) << ")\n";
}

struct SweepRange {
  std::uint32_t begin = 50, end = 1000, step = 50;
};

SweepRange parse_range(const std::string& text) {
  SweepRange r;
  std::istringstream in(text);
  char c1, c2;
  if (!(in >> r.begin >> c1 >> r.end >> c2 >> r.step) || c1 != ':' ||
      c2 != ':' || r.step == 0 || r.begin == 0 || r.end < r.begin) {
    throw ConfigError(errc::bad_value,
                      "--nodes expects start:stop:step with start >= 1");
  }
  return r;
}

std::vector<orch::HostModel> parse_models(const std::string& text) {
  std::vector<orch::HostModel> models;
  std::istringstream in(text);
  std::string tok;
  while (std::getline(in, tok, ',')) {
    auto m = orch::host_model_from_name(tok);
    if (!m) {
      throw ConfigError(errc::bad_host_model, "unknown host model '" + tok + "'");
    }
    models.push_back(*m);
  }
  if (models.empty()) {
    throw ConfigError(errc::bad_host_model, "--models expects a host model list");
  }
  return models;
}

// ---------------------------------------------------------------------------

int cmd_validate(const std::string& config_path, const GlobalOpts& g) {
  auto spec = config::parse_file(config_path);
  auto scenario =
      config::expand(spec, fs::path(config_path).parent_path().string());
  if (!g.quiet) {
    std::cout << "nodes=" << scenario.node_count
              << " links=" << scenario.network.links().size()
              << " flows=" << scenario.flows.size() << "\n";
  }
  return 0;
}

int cmd_plan(const std::string& config_path, const std::string& model_name,
             const GlobalOpts& g) {
  auto spec = config::parse_file(config_path);
  auto scenario =
      config::expand(spec, fs::path(config_path).parent_path().string());
  auto model = orch::host_model_from_name(model_name);
  if (!model) throw ConfigError(errc::bad_host_model, "unknown host model");
  auto plan = orch::plan_deployment(scenario.node_count, *model);
  write_file(fs::path(g.out_dir) / "plan.json", plan.to_json());
  if (!g.quiet) {
    std::cout << "nodes=" << plan.n_nodes << " model="
              << orch::host_model_name(plan.host_model)
              << " hosts=" << plan.hosts << "\n";
  }
  return 0;
}

int cmd_compile(const std::string& config_path, const orch::RunOverrides& ov,
                const GlobalOpts& g) {
  auto spec = config::parse_file(config_path);
  if (ov.seed) spec.seed = *ov.seed;
  if (ov.duration_s) spec.duration_s = *ov.duration_s;
  auto scenario =
      config::expand(spec, fs::path(config_path).parent_path().string());
  auto bundle = orch::compile_external(scenario);
  orch::write_bundle(bundle, (fs::path(g.out_dir) / "bundle").string());
  if (!g.quiet) {
    std::cout << "bundle files=" << bundle.files.size() + 1
              << " hash=" << bundle.bundle_hash << "\n";
  }
  return 0;
}

int cmd_run(const std::string& config_path, const orch::RunOverrides& ov,
            const GlobalOpts& g) {
  auto report = orch::run_scenario(config_path, g.out_dir, ov);
  if (!g.quiet) {
    std::cout << "nodes=" << report.node_count << " flows=" << report.flows
              << (report.emulated ? " emulated" : " compiled")
              << " out=" << report.out_dir << "\n";
  }
  return 0;
}

int cmd_report(const GlobalOpts& g) {
  fs::path root(g.out_dir);
  bool any = false;
  for (const char* rel :
       {"report/summary.csv", "report/plan.json", "report/cost.json"}) {
    fs::path p = root / rel;
    if (!fs::exists(p)) continue;
    any = true;
    if (!g.quiet) {
      std::ifstream in(p, std::ios::binary);
      std::cout << "== " << rel << "\n" << in.rdbuf() << "\n";
    }
  }
  if (!any) throw IoError("no report found under " + root.string());
  return 0;
}

int cmd_cost(const std::string& config_path, const std::string& model_name,
             const orch::RunOverrides& ov, const GlobalOpts& g) {
  auto spec = config::parse_file(config_path);
  auto scenario =
      config::expand(spec, fs::path(config_path).parent_path().string());
  auto model = orch::host_model_from_name(model_name);
  if (!model) throw ConfigError(errc::bad_host_model, "unknown host model");
  auto plan = orch::plan_deployment(scenario.node_count, *model);
  auto cost = orch::estimate_cost(plan, ov.pricing, ov.horizon_months);
  write_file(fs::path(g.out_dir) / "cost.json", cost.to_json(plan, ov.pricing));
  if (!g.quiet) {
    std::cout << "hosts=" << plan.hosts << " capex=" << fmt_double(cost.capex_usd)
              << " opex=" << fmt_double(cost.opex_usd)
              << " total=" << fmt_double(cost.total_usd) << "\n";
  }
  return 0;
}

int cmd_sweep(const SweepRange& range, const std::vector<orch::HostModel>& models,
              const orch::RunOverrides& ov, const GlobalOpts& g) {
  std::string hosts_csv = "n,model,hosts\n";
  std::string cost_csv = "n,model,environment,capex_usd,opex_usd,total_usd\n";
  std::string hosts_json = "[";
  std::string cost_json = "[";
  bool first_h = true, first_c = true;

  for (std::uint32_t n = range.begin; n <= range.end; n += range.step) {
    for (auto model : models) {
      auto plan = orch::plan_deployment(n, model);
      hosts_csv += std::to_string(n) + ',' +
                   std::string(orch::host_model_name(model)) + ',' +
                   std::to_string(plan.hosts) + '\n';
      if (!first_h) hosts_json += ",";
      first_h = false;
      hosts_json += "\n  {\"n\": " + std::to_string(n) + ", \"model\": \"" +
                    std::string(orch::host_model_name(model)) +
                    "\", \"hosts\": " + std::to_string(plan.hosts) + "}";
      for (auto env : {orch::Environment::in_house, orch::Environment::cloud}) {
        orch::Pricing pricing = ov.pricing;
        pricing.environment = env;
        auto cost = orch::estimate_cost(plan, pricing, ov.horizon_months);
        cost_csv += std::to_string(n) + ',' +
                    std::string(orch::host_model_name(model)) + ',' +
                    std::string(orch::environment_name(env)) + ',' +
                    fmt_double(cost.capex_usd) + ',' + fmt_double(cost.opex_usd) +
                    ',' + fmt_double(cost.total_usd) + '\n';
        if (!first_c) cost_json += ",";
        first_c = false;
        cost_json += "\n  {\"n\": " + std::to_string(n) + ", \"model\": \"" +
                     std::string(orch::host_model_name(model)) +
                     "\", \"environment\": \"" +
                     std::string(orch::environment_name(env)) +
                     "\", \"capex_usd\": " + fmt_double(cost.capex_usd) +
                     ", \"opex_usd\": " + fmt_double(cost.opex_usd) +
                     ", \"total_usd\": " + fmt_double(cost.total_usd) + "}";
      }
    }
  }
  hosts_json += "\n]\n";
  cost_json += "\n]\n";

  fs::path root(g.out_dir);
  if (g.format == "json") {
    write_file(root / "sweep_hosts.json", hosts_json);
    write_file(root / "sweep_cost.json", cost_json);
  } else {
    write_file(root / "sweep_hosts.csv", hosts_csv);
    write_file(root / "sweep_cost.csv", cost_csv);
  }
  if (!g.quiet) {
    std::cout << "sweep n=" << range.begin << ".." << range.end << " step "
              << range.step << " models=" << models.size() << " out=" << g.out_dir
              << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"wireless network scenario pipeline"};
  app.require_subcommand(1);

  GlobalOpts g;
  std::string config_path;
  std::string model_name = "container-dense";
  std::string nodes_range = "50:1000:50";
  std::string models_list = "private-cloud,container-per-core,container-dense";
  std::string environment = "cloud";
  orch::RunOverrides ov;
  long long seed_flag = -1;
  int duration_flag = 0;

  auto add_common = [&](CLI::App* cmd, bool needs_config) {
    if (needs_config) {
      cmd->add_option("config", config_path, "scenario YAML file")->required();
    }
    cmd->add_option("--out", g.out_dir, "output directory (or $MENES_OUT)");
    cmd->add_flag("--quiet", g.quiet, "no stdout; files only");
    cmd->add_option("--format", g.format, "csv or json")
        ->check(CLI::IsMember({"csv", "json"}));
  };

  auto* validate = app.add_subcommand("validate", "parse and expand a scenario");
  add_common(validate, true);

  auto* plan = app.add_subcommand("plan", "compute a deployment plan");
  add_common(plan, true);
  plan->add_option("--host-model", model_name, "host capacity model");

  auto* compile = app.add_subcommand("compile", "emit the external-tool bundle");
  add_common(compile, true);
  compile->add_option("--seed", seed_flag, "override scenario seed");
  compile->add_option("--duration", duration_flag, "override duration (s)");

  auto* run = app.add_subcommand("run", "execute the full pipeline");
  add_common(run, true);
  run->add_option("--seed", seed_flag, "override scenario seed");
  run->add_option("--duration", duration_flag, "override duration (s)");
  run->add_option("--host-model", model_name, "host model for plan/cost");
  run->add_option("--horizon-months", ov.horizon_months, "cost horizon");

  auto* report = app.add_subcommand("report", "print a previous run's report");
  add_common(report, false);

  auto* cost = app.add_subcommand("cost", "estimate deployment cost");
  add_common(cost, true);
  cost->add_option("--host-model", model_name, "host capacity model");
  cost->add_option("--horizon-months", ov.horizon_months, "cost horizon");
  cost->add_option("--environment", environment, "in-house or cloud")
      ->check(CLI::IsMember({"in-house", "cloud"}));
  cost->add_option("--server-unit-usd", ov.pricing.server_unit_usd,
                   "in-house server price");
  cost->add_option("--vm-hourly-usd", ov.pricing.cloud_vm_hourly_usd,
                   "cloud hourly rate");
  cost->add_option("--mgmt-usd", ov.pricing.mgmt_usd_per_host_month,
                   "management cost per host-month");

  auto* sweep = app.add_subcommand("sweep", "host/cost tables over node counts");
  add_common(sweep, false);
  sweep->add_option("--nodes", nodes_range, "start:stop:step");
  sweep->add_option("--models", models_list, "comma-separated host models");
  sweep->add_option("--horizon-months", ov.horizon_months, "cost horizon");
  sweep->add_option("--server-unit-usd", ov.pricing.server_unit_usd,
                    "in-house server price");
  sweep->add_option("--vm-hourly-usd", ov.pricing.cloud_vm_hourly_usd,
                    "cloud hourly rate");
  sweep->add_option("--mgmt-usd", ov.pricing.mgmt_usd_per_host_month,
                    "management cost per host-month");

  CLI11_PARSE(app, argc, argv);

  g.out_dir = resolve_out_dir(g.out_dir);
  if (seed_flag >= 0) ov.seed = static_cast<std::uint64_t>(seed_flag);
  if (duration_flag > 0) ov.duration_s = duration_flag;
  ov.pricing.environment = environment == "in-house" ? orch::Environment::in_house
                                                     : orch::Environment::cloud;
  bool pricing_touched =
      cost->count("--server-unit-usd") || cost->count("--vm-hourly-usd") ||
      cost->count("--mgmt-usd") || sweep->count("--server-unit-usd") ||
      sweep->count("--vm-hourly-usd") || sweep->count("--mgmt-usd");
  ov.pricing.builtin_defaults = !pricing_touched;
  if (run->parsed() || cost->parsed()) {
    ov.host_model = orch::host_model_from_name(model_name);
  }

  try {
    if (validate->parsed()) return cmd_validate(config_path, g);
    if (plan->parsed()) return cmd_plan(config_path, model_name, g);
    if (compile->parsed()) return cmd_compile(config_path, ov, g);
    if (run->parsed()) return cmd_run(config_path, ov, g);
    if (report->parsed()) return cmd_report(g);
    if (cost->parsed()) return cmd_cost(config_path, model_name, ov, g);
    if (sweep->parsed())
      return cmd_sweep(parse_range(nodes_range), parse_models(models_list), ov, g);
  } catch (const MenesError& e) {
    print_error(e);
    return exit_code_for(e);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  }
  return 0;
}
