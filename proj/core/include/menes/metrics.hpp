#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "menes/emucore.hpp"
#include "menes/types.hpp"

namespace menes::metrics {

inline constexpr int kControllerNode = -1;

struct MetricPoint {
  double t_s = 0.0;
  int node = kControllerNode;
  std::string name;
  double value = 0.0;
  std::map<std::string, std::string> tags;

  bool operator==(const MetricPoint&) const = default;
};

// In-process time-series store; single writer during a run, file export as
// the integration surface.
class MetricStore {
 public:
  void record(MetricPoint point);

  // Points matching name (and node, when given) with t in [t0, t1],
  // sorted by time. Unknown names yield an empty series.
  std::vector<MetricPoint> query(const std::string& name,
                                 std::optional<int> node, double t0,
                                 double t1) const;

  const std::vector<MetricPoint>& points() const { return points_; }

  // CSV: t_s,node,name,value,tags with tags as k=v;k=v. JSON-lines mirror.
  std::string export_csv() const;
  std::string export_jsonl() const;
  static MetricStore import_csv(const std::string& text);

 private:
  std::vector<MetricPoint> points_;
};

// Resource samples and run counters recorded as series (cpu_proxy,
// mem_proxy per node; totals under the controller pseudo-node).
void record_run(MetricStore& store, const emu::RunTrace& trace);

}  // namespace menes::metrics
