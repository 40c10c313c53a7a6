#ifndef BSUB_TEXT_HPP
#define BSUB_TEXT_HPP

#include <charconv>
#include <cstdlib>
#include <string>
#include <string_view>

#include "bsub/image.hpp"

namespace bsub::detail {

// Shortest decimal text that parses back to exactly the same double.
inline std::string format_double(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, end);
}

inline double parse_double(std::string_view text, const std::string& what) {
  const std::string owned(text);
  char* end = nullptr;
  const double v = std::strtod(owned.c_str(), &end);
  if (end != owned.c_str() + owned.size() || owned.empty())
    throw ConfigError("bad numeric value '" + owned + "' for " + what);
  return v;
}

inline long parse_int(std::string_view text, const std::string& what) {
  long v = 0;
  auto [p, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc{} || p != text.data() + text.size())
    throw ConfigError("bad integer value '" + std::string(text) + "' for " + what);
  return v;
}

inline std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r'))
    s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
    s.remove_suffix(1);
  return s;
}

}  // namespace bsub::detail

#endif  // BSUB_TEXT_HPP
