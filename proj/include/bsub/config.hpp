#ifndef BSUB_CONFIG_HPP
#define BSUB_CONFIG_HPP

#include <cmath>
#include <fstream>
#include <string>
#include <string_view>
#include <vector>

#include "bsub/components.hpp"
#include "bsub/event.hpp"
#include "bsub/image.hpp"
#include "bsub/text.hpp"

namespace bsub {

enum class SurrogateKind : std::uint8_t { max = 0, mean = 1 };

inline const char* to_string(SurrogateKind k) {
  return k == SurrogateKind::max ? "max" : "mean";
}

// Every tunable of the processing chain, with the defaults used throughout.
struct Config {
  double tau = 40.0;
  double rho = 0.005;
  int descriptor_window = 9;
  Connectivity connectivity = Connectivity::eight;
  EventParams event;  // w = 100, a1 = 0, a2 = 0, a3 = 1
  double theta = 0.6;
  SurrogateKind surrogate = SurrogateKind::max;
};

// Collects every violation before failing, so a bad file is fixed in one go.
inline void validate(const Config& c) {
  std::vector<std::string> bad;
  if (!(c.tau >= 0.0) || !std::isfinite(c.tau))
    bad.push_back("tau must be >= 0, got " + detail::format_double(c.tau));
  if (!(c.rho > 0.0 && c.rho < 1.0))
    bad.push_back("rho must be in (0,1), got " + detail::format_double(c.rho));
  if (c.descriptor_window < 1 || c.descriptor_window % 2 == 0 ||
      c.descriptor_window > 255)
    bad.push_back("descriptor window must be odd, in [1, 255], got " +
                  std::to_string(c.descriptor_window));
  if (c.connectivity != Connectivity::four &&
      c.connectivity != Connectivity::eight)
    bad.push_back("connectivity must be 4 or 8");
  if (c.event.w < 1 || c.event.w > 65535)
    bad.push_back("w must be in [1, 65535], got " + std::to_string(c.event.w));
  for (auto [name, v] : {std::pair<const char*, double>{"a1", c.event.a1},
                         {"a2", c.event.a2},
                         {"a3", c.event.a3}})
    if (!std::isfinite(v))
      bad.push_back(std::string(name) + " must be finite");
  if (!std::isfinite(c.theta))
    bad.push_back("theta must be finite");
  if (!bad.empty()) {
    std::string msg = "invalid config:";
    for (const auto& b : bad) msg += "\n  " + b;
    throw ConfigError(msg);
  }
}

namespace detail {

inline bool parse_config_key(Config& c, std::string_view section,
                             std::string_view key, std::string_view value) {
  const std::string what = std::string(section.empty() ? "" : std::string(section) + ".") +
                           std::string(key);
  auto is = [&](std::string_view sec, std::string_view k) {
    return section == sec && key == k;
  };
  if (is("motion", "tau")) c.tau = parse_double(value, what);
  else if (is("motion", "rho")) c.rho = parse_double(value, what);
  else if (is("descriptor", "n")) c.descriptor_window = int(parse_int(value, what));
  else if (is("descriptor", "connectivity")) {
    const long v = parse_int(value, what);
    if (v != 4 && v != 8) throw ConfigError("connectivity must be 4 or 8, got " + std::string(value));
    c.connectivity = v == 4 ? Connectivity::four : Connectivity::eight;
  } else if (is("event", "w")) c.event.w = int(parse_int(value, what));
  else if (is("event", "a1")) c.event.a1 = parse_double(value, what);
  else if (is("event", "a2")) c.event.a2 = parse_double(value, what);
  else if (is("event", "a3")) c.event.a3 = parse_double(value, what);
  else if (is("detect", "theta")) c.theta = parse_double(value, what);
  else if ((section.empty() || section == "train") && key == "surrogate") {
    if (value == "max") c.surrogate = SurrogateKind::max;
    else if (value == "mean") c.surrogate = SurrogateKind::mean;
    else throw ConfigError("surrogate must be max or mean, got " + std::string(value));
  } else {
    return false;
  }
  return true;
}

}  // namespace detail

// Sectioned key=value text. '#' starts a comment; keys outside a known
// section (or unknown keys) are rejected. Values later override earlier ones.
inline Config load_config(const std::string& path, Config base = Config{}) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path);
  std::string line, section;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string_view s = detail::trim(line);
    if (const auto hash = s.find('#'); hash != std::string_view::npos)
      s = detail::trim(s.substr(0, hash));
    if (s.empty()) continue;
    const std::string where = path + ":" + std::to_string(lineno);
    if (s.front() == '[') {
      if (s.back() != ']') throw ConfigError(where + ": unterminated section");
      section = std::string(detail::trim(s.substr(1, s.size() - 2)));
      if (section != "motion" && section != "descriptor" && section != "event" &&
          section != "detect" && section != "train")
        throw ConfigError(where + ": unknown section [" + section + "]");
      continue;
    }
    const auto eq = s.find('=');
    if (eq == std::string_view::npos)
      throw ConfigError(where + ": expected key=value, got '" + std::string(s) + "'");
    const auto key = detail::trim(s.substr(0, eq));
    const auto value = detail::trim(s.substr(eq + 1));
    if (!detail::parse_config_key(base, section, key, value))
      throw ConfigError(where + ": unknown key '" + std::string(key) +
                        (section.empty() ? std::string("'")
                                         : "' in section [" + section + "]"));
  }
  return base;
}

// One-line effective settings, printed by every command.
inline std::string config_echo(const Config& c) {
  using detail::format_double;
  return "config: tau=" + format_double(c.tau) + " rho=" + format_double(c.rho) +
         " n=" + std::to_string(c.descriptor_window) +
         " connectivity=" + std::to_string(int(c.connectivity)) +
         " w=" + std::to_string(c.event.w) + " a1=" + format_double(c.event.a1) +
         " a2=" + format_double(c.event.a2) + " a3=" + format_double(c.event.a3) +
         " theta=" + format_double(c.theta) +
         " surrogate=" + to_string(c.surrogate);
}

}  // namespace bsub

#endif  // BSUB_CONFIG_HPP
