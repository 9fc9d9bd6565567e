#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace menes {

// One code per rejected invariant so callers (and tests) can tell apart
// what was violated without string matching.
enum class errc {
  ok = 0,
  // config / validation
  yaml_syntax,
  unknown_key,
  missing_key,
  bad_value,
  bad_dist_kind,
  bad_dist_params,
  bad_duration,
  bad_seed,
  bad_structure,
  missing_edge_list,
  missing_random_p,
  bad_probability,
  bad_capacity,
  bad_delay,
  bad_packet_size,
  bad_traffic_window,
  traffic_exceeds_duration,
  src_equals_dst,
  app_transport_mismatch,
  unknown_node_ref,
  duplicate_protocol,
  bad_mac_params,
  tdma_missing_params,
  bad_selector,
  // expansion / topology
  nonpositive_node_count,
  ring_too_small,
  duplicate_link,
  dangling_link,
  // event log
  eel_malformed_line,
  eel_unsorted,
  // emulation / orchestration
  capability_missing,
  event_storm,
  bad_pricing,
  bad_host_model,
  // i/o
  io_failure,
};

std::string_view errc_name(errc code);

// Pipeline stage the error came from; the CLI prefixes messages with it.
enum class stage {
  config,
  topology,
  linkevents,
  routing,
  emulation,
  traffic,
  metrics,
  orchestrator,
  io,
};

std::string_view stage_name(stage s);

class MenesError : public std::runtime_error {
 public:
  MenesError(stage st, errc code, std::string message)
      : std::runtime_error(std::move(message)), stage_(st), code_(code) {}

  stage where() const { return stage_; }
  errc code() const { return code_; }

 private:
  stage stage_;
  errc code_;
};

// Configuration problem: carries the source position when one is known.
class ConfigError : public MenesError {
 public:
  ConfigError(errc code, std::string message, int line = -1, int column = -1)
      : MenesError(stage::config, code, std::move(message)),
        line_(line),
        column_(column) {}

  int line() const { return line_; }
  int column() const { return column_; }
  bool has_position() const { return line_ >= 0; }

 private:
  int line_;
  int column_;
};

class RunError : public MenesError {
 public:
  RunError(stage st, errc code, std::string message)
      : MenesError(st, code, std::move(message)) {}
};

class IoError : public MenesError {
 public:
  explicit IoError(std::string message)
      : MenesError(stage::io, errc::io_failure, std::move(message)) {}
};

}  // namespace menes
