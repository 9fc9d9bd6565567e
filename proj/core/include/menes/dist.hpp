#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace menes {

// Seeded, named random substream. Streams derived from the same scenario
// seed but different names are independent, so adding or reordering one
// consumer does not perturb another's draws. The generator is a splitmix64
// chain, fully specified here so sequences are stable across platforms.
class RngStream {
 public:
  RngStream(std::uint64_t seed, std::string_view name);

  std::uint64_t next_u64();
  // Uniform in [0, 1) with 53 random bits.
  double next_unit();

 private:
  std::uint64_t state_;
};

enum class DistKind { uniform, exponential, normal, interval, poisson };

std::string_view dist_kind_name(DistKind kind);

// A stochastic (or degenerate) quantity from the scenario grammar:
//   uniform(lo, hi) | exponential(rate) | normal(mean, stddev) |
//   interval(period) | poisson(rate)
struct DistSpec {
  DistKind kind = DistKind::interval;
  std::vector<double> params;

  static DistSpec uniform(double lo, double hi) { return {DistKind::uniform, {lo, hi}}; }
  static DistSpec exponential(double rate) { return {DistKind::exponential, {rate}}; }
  static DistSpec normal(double mean, double stddev) { return {DistKind::normal, {mean, stddev}}; }
  static DistSpec interval(double period) { return {DistKind::interval, {period}}; }
  static DistSpec poisson(double rate) { return {DistKind::poisson, {rate}}; }

  bool operator==(const DistSpec&) const = default;
};

// Throws ConfigError (bad_dist_kind / bad_dist_params) on violations:
// wrong arity, non-finite values, or out-of-domain parameters.
void validate_dist(const DistSpec& dist);

// Analytic mean of the distribution.
double dist_mean(const DistSpec& dist);

// One draw. interval(k) always returns k; poisson(rate) returns a
// Poisson-distributed count as a real.
double sample(const DistSpec& dist, RngStream& rng);

// One inter-arrival gap when the distribution drives a renewal process.
// poisson(rate) denotes a Poisson arrival process here, so its gaps are
// exponential with that rate; every other kind is drawn directly.
double sample_gap(const DistSpec& dist, RngStream& rng);

// Text forms used by the config grammar: "uniform(5,15)" or a bare number,
// which is shorthand for interval(x). print is the canonical inverse.
DistSpec parse_dist(std::string_view text);
std::string print_dist(const DistSpec& dist);

}  // namespace menes
