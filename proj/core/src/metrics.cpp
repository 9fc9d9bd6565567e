#include "menes/metrics.hpp"

#include <algorithm>
#include <sstream>

#include <nlohmann/json.hpp>

#include "menes/error.hpp"
#include "menes/strfmt.hpp"

namespace menes::metrics {

using json = nlohmann::ordered_json;

void MetricStore::record(MetricPoint point) {
  points_.push_back(std::move(point));
}

std::vector<MetricPoint> MetricStore::query(const std::string& name,
                                            std::optional<int> node, double t0,
                                            double t1) const {
  std::vector<MetricPoint> out;
  for (const auto& p : points_) {
    if (p.name != name) continue;
    if (node && p.node != *node) continue;
    if (p.t_s < t0 || p.t_s > t1) continue;
    out.push_back(p);
  }
  std::stable_sort(out.begin(), out.end(),
                   [](const MetricPoint& a, const MetricPoint& b) {
                     return a.t_s < b.t_s;
                   });
  return out;
}

namespace {

std::string tags_field(const std::map<std::string, std::string>& tags) {
  std::string out;
  for (const auto& [k, v] : tags) {
    if (!out.empty()) out += ';';
    out += k + '=' + v;
  }
  return out;
}

std::string node_field(int node) {
  return node == kControllerNode ? "controller" : std::to_string(node);
}

}  // namespace

std::string MetricStore::export_csv() const {
  std::string out = "t_s,node,name,value,tags\n";
  for (const auto& p : points_) {
    out += fmt_double(p.t_s) + ',';
    out += node_field(p.node) + ',';
    out += p.name + ',';
    out += fmt_double(p.value) + ',';
    out += tags_field(p.tags) + '\n';
  }
  return out;
}

std::string MetricStore::export_jsonl() const {
  std::string out;
  for (const auto& p : points_) {
    json e;
    e["t_s"] = p.t_s;
    e["node"] = node_field(p.node);
    e["name"] = p.name;
    e["value"] = p.value;
    e["tags"] = p.tags;
    out += e.dump() + "\n";
  }
  return out;
}

MetricStore MetricStore::import_csv(const std::string& text) {
  MetricStore store;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (lineno == 1 || line.empty()) continue;  // header
    std::vector<std::string> fields;
    size_t pos = 0;
    for (int i = 0; i < 4; ++i) {
      size_t comma = line.find(',', pos);
      if (comma == std::string::npos) {
        throw RunError(stage::metrics, errc::bad_value,
                       "metrics csv line " + std::to_string(lineno) +
                           ": expected 5 fields");
      }
      fields.push_back(line.substr(pos, comma - pos));
      pos = comma + 1;
    }
    fields.push_back(line.substr(pos));

    MetricPoint p;
    auto t = parse_double(fields[0]);
    auto value = parse_double(fields[3]);
    if (!t || !value) {
      throw RunError(stage::metrics, errc::bad_value,
                     "metrics csv line " + std::to_string(lineno) +
                         ": bad number");
    }
    p.t_s = *t;
    p.node = fields[1] == "controller" ? kControllerNode : std::stoi(fields[1]);
    p.name = fields[2];
    p.value = *value;
    std::string tags = fields[4];
    size_t tp = 0;
    while (tp < tags.size()) {
      size_t semi = tags.find(';', tp);
      std::string kv = semi == std::string::npos ? tags.substr(tp)
                                                 : tags.substr(tp, semi - tp);
      size_t eq = kv.find('=');
      if (eq != std::string::npos) p.tags[kv.substr(0, eq)] = kv.substr(eq + 1);
      if (semi == std::string::npos) break;
      tp = semi + 1;
    }
    store.record(std::move(p));
  }
  return store;
}

void record_run(MetricStore& store, const emu::RunTrace& trace) {
  for (const auto& r : trace.resources) {
    MetricPoint cpu;
    cpu.t_s = r.t_s;
    cpu.node = static_cast<int>(r.node);
    cpu.name = "cpu_proxy";
    cpu.value = static_cast<double>(r.cpu_proxy);
    store.record(std::move(cpu));
    MetricPoint mem;
    mem.t_s = r.t_s;
    mem.node = static_cast<int>(r.node);
    mem.name = "mem_proxy";
    mem.value = static_cast<double>(r.mem_proxy);
    store.record(std::move(mem));
  }
  const auto& c = trace.counters;
  auto total = [&](const std::string& name, double value) {
    MetricPoint p;
    p.t_s = 0.0;
    p.node = kControllerNode;
    p.name = name;
    p.value = value;
    p.tags["scope"] = "run";
    store.record(std::move(p));
  };
  total("packets_sent", static_cast<double>(c.sent));
  total("packets_delivered", static_cast<double>(c.delivered));
  total("packets_dropped", static_cast<double>(c.dropped_total()));
  total("hop_events", static_cast<double>(trace.hop_events));
}

}  // namespace menes::metrics
