#include "menes/strfmt.hpp"

#include <charconv>
#include <cstdio>

namespace menes {

std::string fmt_double(double value) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
  if (ec != std::errc{}) return "0";
  return std::string(buf, ptr);
}

std::string fmt_double_dotted(double value) {
  std::string s = fmt_double(value);
  if (s.find('.') == std::string::npos && s.find('e') == std::string::npos &&
      s.find("inf") == std::string::npos && s.find("nan") == std::string::npos) {
    s += ".0";
  }
  return s;
}

std::string fmt_us_as_seconds(std::int64_t time_us) {
  bool neg = time_us < 0;
  std::uint64_t abs_us = neg ? static_cast<std::uint64_t>(-time_us)
                             : static_cast<std::uint64_t>(time_us);
  std::uint64_t secs = abs_us / 1'000'000;
  std::uint64_t frac = abs_us % 1'000'000;
  char fbuf[8];
  std::snprintf(fbuf, sizeof fbuf, "%06llu",
                static_cast<unsigned long long>(frac));
  std::string fs(fbuf);
  while (fs.size() > 1 && fs.back() == '0') fs.pop_back();
  std::string out = neg ? "-" : "";
  out += std::to_string(secs);
  out += '.';
  out += fs;
  return out;
}

std::optional<double> parse_double(std::string_view text) {
  // Trim ASCII whitespace; from_chars does not skip it.
  size_t b = text.find_first_not_of(" \t");
  size_t e = text.find_last_not_of(" \t");
  if (b == std::string_view::npos) return std::nullopt;
  text = text.substr(b, e - b + 1);
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size()) return std::nullopt;
  return value;
}

}  // namespace menes
