#include "menes/types.hpp"

#include <cmath>

namespace menes {

SimTime us_from_s(double seconds) {
  return static_cast<SimTime>(std::llround(seconds * 1e6));
}

double s_from_us(SimTime t) { return static_cast<double>(t) * 1e-6; }

namespace {
std::string addr(unsigned net, NodeId node) {
  unsigned v = node + 1;
  return "10." + std::to_string(net) + "." + std::to_string(v / 256) + "." +
         std::to_string(v % 256);
}
}  // namespace

std::string data_address(NodeId node) { return addr(100, node); }
std::string mgmt_address(NodeId node) { return addr(200, node); }

std::string_view mac_kind_name(MacKind kind) {
  switch (kind) {
    case MacKind::rf_pipe: return "rf-pipe";
    case MacKind::csma: return "csma";
    case MacKind::tdma: return "tdma";
  }
  return "?";
}

namespace {
bool near(double a, double b) { return std::abs(a - b) < 1e-6; }
}  // namespace

bool is_80211b_rate(double bps) {
  for (double mbps : {1.0, 2.0, 5.5, 11.0})
    if (near(bps, mbps * 1e6)) return true;
  return false;
}

bool is_80211g_rate(double bps) {
  for (double mbps : {6.0, 9.0, 12.0, 18.0, 24.0, 36.0, 48.0, 54.0})
    if (near(bps, mbps * 1e6)) return true;
  return false;
}

std::string_view rate_class_name(double bps) {
  if (is_80211b_rate(bps)) return "802.11b";
  if (is_80211g_rate(bps)) return "802.11g";
  return "rf-pipe";
}

}  // namespace menes
