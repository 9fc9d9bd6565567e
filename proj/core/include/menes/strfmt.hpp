#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace menes {

// Shortest round-trip decimal form of a double ("1.5", "5.4e+07", "100").
std::string fmt_double(double value);

// Like fmt_double but guarantees a decimal point ("95.0", not "95").
std::string fmt_double_dotted(double value);

// Microsecond fixed-point time as decimal seconds, trailing zeros trimmed
// but at least one fractional digit ("5.0", "0.000001", "1.5").
std::string fmt_us_as_seconds(std::int64_t time_us);

std::optional<double> parse_double(std::string_view text);

}  // namespace menes
