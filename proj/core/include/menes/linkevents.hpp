#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "menes/dist.hpp"
#include "menes/topology.hpp"
#include "menes/types.hpp"

namespace menes::events {

// A timed pathloss update for one directed link. Events set the link's
// current pathloss; the PHY reads the latest value at or before now.
struct LinkEvent {
  SimTime time = 0;
  NodeId src = 0;
  NodeId dst = 0;
  double pathloss_db = 0.0;

  bool operator==(const LinkEvent&) const = default;
};

struct EventLog {
  std::vector<LinkEvent> events;  // non-decreasing by time

  bool operator==(const EventLog&) const = default;
};

// Renewal-process event generation per rule: inter-event gaps are drawn
// from the rule's event_dist (poisson(rate) meaning Poisson arrivals at
// that rate), truncated at duration. Each rule uses its own named RNG
// substream, so rules do not perturb one another. Rules without an
// event_dist contribute nothing.
//
// Magnitudes come from pathloss_dist when present; otherwise events toggle
// between initial_pathloss + 40 dB and initial_pathloss (a link down/up
// proxy), starting with the degraded value.
EventLog generate_events(const std::vector<LinkRule>& rules,
                         const topo::Network& net, int duration_s,
                         std::uint64_t seed);

// Text form, one event per line:
//   <time_s> nem:<src_id> pathloss nem:<dst_id>,<loss_db>
// '#' comments, LF endings, ASCII. Times print as decimal seconds with up
// to six fractional digits.
std::string serialize_eel(const EventLog& log);

// Inverse of serialize_eel. Malformed lines and time regressions raise
// errors carrying the 1-based line number. Order is preserved for equal
// timestamps.
EventLog parse_eel(const std::string& text);

struct ImportResult {
  EventLog log;
  std::vector<std::string> warnings;
};

// parse_eel over a file. When duration_s >= 0, events past the scenario end
// are dropped with a warning.
ImportResult import_precomputed(const std::string& path, int duration_s = -1);

}  // namespace menes::events
