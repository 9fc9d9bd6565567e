#include "menes/dist.hpp"

#include <cmath>

#include "menes/error.hpp"
#include "menes/strfmt.hpp"

namespace menes {
namespace {

std::uint64_t fnv1a(std::string_view text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::uint64_t splitmix64(std::uint64_t& state) {
  state += 0x9e3779b97f4a7c15ULL;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

[[noreturn]] void bad_params(const std::string& msg) {
  throw ConfigError(errc::bad_dist_params, msg);
}

}  // namespace

RngStream::RngStream(std::uint64_t seed, std::string_view name) {
  state_ = seed ^ fnv1a(name);
  // Two warm-up steps decorrelate nearby (seed, name) pairs.
  splitmix64(state_);
  splitmix64(state_);
}

std::uint64_t RngStream::next_u64() { return splitmix64(state_); }

double RngStream::next_unit() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

std::string_view dist_kind_name(DistKind kind) {
  switch (kind) {
    case DistKind::uniform: return "uniform";
    case DistKind::exponential: return "exponential";
    case DistKind::normal: return "normal";
    case DistKind::interval: return "interval";
    case DistKind::poisson: return "poisson";
  }
  return "?";
}

void validate_dist(const DistSpec& dist) {
  const auto& p = dist.params;
  auto want = [&](size_t n) {
    if (p.size() != n) {
      bad_params(std::string(dist_kind_name(dist.kind)) + ": expected " +
                 std::to_string(n) + " parameter(s), got " +
                 std::to_string(p.size()));
    }
  };
  for (double v : p) {
    if (!std::isfinite(v)) bad_params("distribution parameters must be finite");
  }
  switch (dist.kind) {
    case DistKind::uniform:
      want(2);
      if (p[0] > p[1]) bad_params("uniform: lower bound exceeds upper bound");
      break;
    case DistKind::exponential:
      want(1);
      if (p[0] <= 0.0) bad_params("exponential: rate must be positive");
      break;
    case DistKind::normal:
      want(2);
      if (p[1] < 0.0) bad_params("normal: stddev must be non-negative");
      break;
    case DistKind::interval:
      want(1);
      if (p[0] <= 0.0) bad_params("interval: period must be positive");
      break;
    case DistKind::poisson:
      want(1);
      if (p[0] <= 0.0) bad_params("poisson: rate must be positive");
      break;
  }
}

double dist_mean(const DistSpec& dist) {
  const auto& p = dist.params;
  switch (dist.kind) {
    case DistKind::uniform: return (p[0] + p[1]) / 2.0;
    case DistKind::exponential: return 1.0 / p[0];
    case DistKind::normal: return p[0];
    case DistKind::interval: return p[0];
    case DistKind::poisson: return p[0];
  }
  return 0.0;
}

namespace {

double sample_poisson(double rate, RngStream& rng) {
  // Knuth's product method, chunked so exp(-rate) stays representable.
  double count = 0.0;
  while (rate > 500.0) {
    count += sample_poisson(500.0, rng);
    rate -= 500.0;
  }
  const double limit = std::exp(-rate);
  double product = rng.next_unit();
  while (product > limit) {
    count += 1.0;
    product *= rng.next_unit();
  }
  return count;
}

}  // namespace

double sample(const DistSpec& dist, RngStream& rng) {
  const auto& p = dist.params;
  switch (dist.kind) {
    case DistKind::uniform:
      return p[0] + rng.next_unit() * (p[1] - p[0]);
    case DistKind::exponential:
      return -std::log(1.0 - rng.next_unit()) / p[0];
    case DistKind::normal: {
      // Box-Muller; two draws per sample, no caching, to keep the stream
      // position independent of call history.
      double u1 = 1.0 - rng.next_unit();  // (0, 1]
      double u2 = rng.next_unit();
      double z = std::sqrt(-2.0 * std::log(u1)) *
                 std::cos(2.0 * 3.14159265358979323846 * u2);
      return p[0] + p[1] * z;
    }
    case DistKind::interval:
      return p[0];
    case DistKind::poisson:
      return sample_poisson(p[0], rng);
  }
  return 0.0;
}

double sample_gap(const DistSpec& dist, RngStream& rng) {
  if (dist.kind == DistKind::poisson) {
    return -std::log(1.0 - rng.next_unit()) / dist.params[0];
  }
  return sample(dist, rng);
}

DistSpec parse_dist(std::string_view text) {
  while (!text.empty() && (text.front() == ' ' || text.front() == '\t'))
    text.remove_prefix(1);
  while (!text.empty() && (text.back() == ' ' || text.back() == '\t'))
    text.remove_suffix(1);
  // Bare number is shorthand for interval(x).
  if (auto num = parse_double(text)) {
    DistSpec d = DistSpec::interval(*num);
    validate_dist(d);
    return d;
  }
  size_t open = text.find('(');
  size_t close = text.rfind(')');
  if (open == std::string_view::npos || close == std::string_view::npos ||
      close < open) {
    throw ConfigError(errc::bad_dist_kind,
                      "malformed distribution '" + std::string(text) + "'");
  }
  std::string_view name = text.substr(0, open);
  while (!name.empty() && name.back() == ' ') name.remove_suffix(1);
  DistSpec dist;
  if (name == "uniform") dist.kind = DistKind::uniform;
  else if (name == "exponential") dist.kind = DistKind::exponential;
  else if (name == "normal") dist.kind = DistKind::normal;
  else if (name == "interval") dist.kind = DistKind::interval;
  else if (name == "poisson") dist.kind = DistKind::poisson;
  else
    throw ConfigError(errc::bad_dist_kind,
                      "unknown distribution '" + std::string(name) + "'");
  std::string_view args = text.substr(open + 1, close - open - 1);
  size_t pos = 0;
  while (pos <= args.size()) {
    size_t comma = args.find(',', pos);
    std::string_view tok = comma == std::string_view::npos
                               ? args.substr(pos)
                               : args.substr(pos, comma - pos);
    if (auto v = parse_double(tok)) {
      dist.params.push_back(*v);
    } else {
      throw ConfigError(errc::bad_dist_params,
                        "bad distribution parameter '" + std::string(tok) + "'");
    }
    if (comma == std::string_view::npos) break;
    pos = comma + 1;
  }
  validate_dist(dist);
  return dist;
}

std::string print_dist(const DistSpec& dist) {
  if (dist.kind == DistKind::interval) return fmt_double(dist.params[0]);
  std::string out(dist_kind_name(dist.kind));
  out += '(';
  for (size_t i = 0; i < dist.params.size(); ++i) {
    if (i) out += ',';
    out += fmt_double(dist.params[i]);
  }
  out += ')';
  return out;
}

}  // namespace menes
