#include "menes/linkevents.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "menes/error.hpp"
#include "menes/strfmt.hpp"

namespace menes::events {
namespace {

[[noreturn]] void fail(errc code, const std::string& msg) {
  throw RunError(stage::linkevents, code, msg);
}

constexpr std::uint64_t kMaxEventsPerRule = 10'000'000;

}  // namespace

EventLog generate_events(const std::vector<LinkRule>& rules,
                         const topo::Network& net, int duration_s,
                         std::uint64_t seed) {
  const SimTime duration = static_cast<SimTime>(duration_s) * kUsPerSec;
  EventLog log;
  for (size_t ri = 0; ri < rules.size(); ++ri) {
    const auto& rule = rules[ri];
    if (!rule.event_dist) continue;
    std::vector<const topo::Link*> matched;
    for (const auto& link : net.links()) {
      if (rule.selector.matches(link.src, link.dst)) matched.push_back(&link);
    }
    if (matched.empty()) continue;

    RngStream rng(seed, "linkevents/rule/" + std::to_string(ri));
    SimTime t = 0;
    std::uint64_t count = 0;
    bool degraded = false;
    while (true) {
      double gap_s = sample_gap(*rule.event_dist, rng);
      if (gap_s < 0.0) gap_s = 0.0;
      t += us_from_s(gap_s);
      if (t > duration) break;
      if (++count > kMaxEventsPerRule) {
        fail(errc::event_storm,
             "rule " + std::to_string(ri) + " generated more than " +
                 std::to_string(kMaxEventsPerRule) + " events");
      }
      degraded = !degraded;
      for (const auto* link : matched) {
        double loss;
        if (rule.pathloss_dist) {
          loss = sample(*rule.pathloss_dist, rng);
        } else {
          // Down/up proxy: toggle above and back to the initial loss.
          loss = degraded ? link->params.initial_pathloss_db + 40.0
                          : link->params.initial_pathloss_db;
        }
        log.events.push_back(LinkEvent{t, link->src, link->dst, loss});
      }
    }
  }
  std::stable_sort(log.events.begin(), log.events.end(),
                   [](const LinkEvent& a, const LinkEvent& b) {
                     return std::tie(a.time, a.src, a.dst) <
                            std::tie(b.time, b.src, b.dst);
                   });
  return log;
}

std::string serialize_eel(const EventLog& log) {
  std::string out;
  for (const auto& ev : log.events) {
    out += fmt_us_as_seconds(ev.time);
    out += " nem:";
    out += std::to_string(ev.src);
    out += " pathloss nem:";
    out += std::to_string(ev.dst);
    out += ',';
    out += fmt_double_dotted(ev.pathloss_db);
    out += '\n';
  }
  return out;
}

namespace {

std::optional<LinkEvent> parse_eel_line(const std::string& line) {
  std::istringstream ls(line);
  std::string time_tok, src_tok, verb, dst_tok;
  if (!(ls >> time_tok)) return std::nullopt;  // caller treats as blank
  if (!(ls >> src_tok >> verb >> dst_tok)) throw std::invalid_argument("fields");
  std::string extra;
  if (ls >> extra) throw std::invalid_argument("trailing tokens");

  auto time_s = parse_double(time_tok);
  if (!time_s || *time_s < 0.0) throw std::invalid_argument("time");
  if (src_tok.rfind("nem:", 0) != 0) throw std::invalid_argument("src nem");
  if (verb != "pathloss") throw std::invalid_argument("verb");
  auto comma = dst_tok.find(',');
  if (dst_tok.rfind("nem:", 0) != 0 || comma == std::string::npos)
    throw std::invalid_argument("dst nem");

  auto src = parse_double(src_tok.substr(4));
  auto dst = parse_double(dst_tok.substr(4, comma - 4));
  auto loss = parse_double(dst_tok.substr(comma + 1));
  if (!src || !dst || !loss || *src < 0 || *dst < 0 ||
      *src != static_cast<NodeId>(*src) || *dst != static_cast<NodeId>(*dst) ||
      !std::isfinite(*loss))
    throw std::invalid_argument("ids");

  return LinkEvent{us_from_s(*time_s), static_cast<NodeId>(*src),
                   static_cast<NodeId>(*dst), *loss};
}

}  // namespace

EventLog parse_eel(const std::string& text) {
  EventLog log;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  SimTime prev = -1;
  while (std::getline(in, line)) {
    ++lineno;
    auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::optional<LinkEvent> ev;
    try {
      ev = parse_eel_line(line);
    } catch (const std::invalid_argument&) {
      fail(errc::eel_malformed_line, "line " + std::to_string(lineno) +
                                         ": malformed pathloss event");
    }
    if (!ev) continue;
    if (ev->time < prev) {
      fail(errc::eel_unsorted,
           "line " + std::to_string(lineno) + ": time goes backwards");
    }
    prev = ev->time;
    log.events.push_back(*ev);
  }
  return log;
}

ImportResult import_precomputed(const std::string& path, int duration_s) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open event file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  ImportResult result;
  result.log = parse_eel(buf.str());
  if (duration_s >= 0) {
    const SimTime duration = static_cast<SimTime>(duration_s) * kUsPerSec;
    auto& evs = result.log.events;
    size_t before = evs.size();
    evs.erase(std::remove_if(evs.begin(), evs.end(),
                             [&](const LinkEvent& e) { return e.time > duration; }),
              evs.end());
    if (evs.size() != before) {
      result.warnings.push_back(
          std::to_string(before - evs.size()) +
          " event(s) beyond scenario duration dropped");
    }
  }
  return result;
}

}  // namespace menes::events
