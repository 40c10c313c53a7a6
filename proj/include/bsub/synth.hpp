#ifndef BSUB_SYNTH_HPP
#define BSUB_SYNTH_HPP

#include <cmath>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "bsub/image.hpp"
#include "bsub/io.hpp"
#include "bsub/text.hpp"

namespace bsub {

// Scripted scene element. Position is a straight line from (x, y) at
// (vx, vy) per frame; "loop" re-enters across the frame edge, "bounce"
// reflects off it. Active on frames [enter, exit].
struct ActorSpec {
  enum class Shape : std::uint8_t { rect, ellipse };
  enum class Path : std::uint8_t { linear, loop, bounce };

  Shape shape = Shape::rect;
  int width = 0, height = 0;
  int intensity = 255;
  double x = 0.0, y = 0.0;
  double vx = 0.0, vy = 0.0;
  Path path = Path::linear;
  std::int64_t enter = 0;
  std::int64_t exit = -1;  // -1: last frame
  bool anomalous = false;
};

// Per-pixel intensity noise inside a region. "flicker" jumps each pixel by
// +/- amplitude with the given probability per frame; "shimmer" offsets every
// pixel every frame by a uniform draw from [-amplitude, amplitude].
struct NoiseSpec {
  enum class Mode : std::uint8_t { flicker, shimmer };

  Mode mode = Mode::flicker;
  int x = 0, y = 0, width = 0, height = 0;
  double prob = 1.0;
  int amplitude = 0;
};

struct SceneScript {
  int width = 0, height = 0;
  std::int64_t frames = 0;
  int background = 0;
  std::uint64_t seed = 0;
  std::vector<ActorSpec> actors;
  std::vector<NoiseSpec> noise;
};

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t& state) {
  state += 0x9E3779B97F4A7C15ull;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

inline double unit_double(std::uint64_t bits) {
  return double(bits >> 11) * 0x1.0p-53;  // uniform in [0, 1)
}

inline std::uint8_t clamp_intensity(double v) {
  return std::uint8_t(v < 0.0 ? 0.0 : (v > 255.0 ? 255.0 : v));
}

// Wraps u into [0, span); span > 0.
inline double wrap(double u, double span) {
  const double m = std::fmod(u, span);
  return m < 0.0 ? m + span : m;
}

}  // namespace detail

// Frame and annotation for one timestep; mask marks the visible pixels of
// anomalous actors, so mask pixels are always a subset of painted actor pixels.
struct RenderedFrame {
  Frame frame;
  Image<std::uint8_t> mask;
};

// Deterministic scene renderer: every frame is a pure function of the script
// and seed, so frames can be regenerated in any order without storing them.
class SyntheticSource final : public FrameSource {
 public:
  explicit SyntheticSource(SceneScript script) : script_(std::move(script)) {
    if (script_.width < 1 || script_.height < 1)
      throw ConfigError("scene needs positive geometry");
    if (script_.frames < 1) throw ConfigError("scene needs at least one frame");
  }

  int width() const override { return script_.width; }
  int height() const override { return script_.height; }
  std::size_t count() const override { return std::size_t(script_.frames); }

  Frame frame(std::size_t t) override { return render(t).frame; }
  Image<std::uint8_t> mask(std::size_t t) { return render(t).mask; }
  const SceneScript& script() const { return script_; }

  RenderedFrame render(std::size_t t) const {
    if (std::int64_t(t) >= script_.frames)
      throw DataError("frame " + std::to_string(t) + " past scripted end");
    RenderedFrame out;
    out.frame = Frame(script_.width, script_.height,
                      std::uint8_t(script_.background));
    out.frame.t = std::int64_t(t);
    out.mask = Image<std::uint8_t>(script_.width, script_.height, 0);
    out.mask.t = std::int64_t(t);

    std::uint64_t rng = script_.seed ^ (0xA0761D6478BD642Full * (t + 1));
    for (const auto& noise : script_.noise) paint_noise(noise, rng, out.frame);
    for (const auto& actor : script_.actors)
      paint_actor(actor, std::int64_t(t), out);
    return out;
  }

 private:
  void paint_noise(const NoiseSpec& noise, std::uint64_t& rng,
                   Frame& frame) const {
    for (int y = noise.y; y < noise.y + noise.height; ++y)
      for (int x = noise.x; x < noise.x + noise.width; ++x) {
        const std::uint64_t draw = detail::splitmix64(rng);
        if (noise.mode == NoiseSpec::Mode::flicker) {
          if (detail::unit_double(draw) >= noise.prob) continue;
          const double sign = (draw & 1) ? 1.0 : -1.0;
          frame(x, y) = detail::clamp_intensity(double(frame(x, y)) +
                                                sign * noise.amplitude);
        } else {
          const int span = 2 * noise.amplitude + 1;
          const int offset = int(draw % std::uint64_t(span)) - noise.amplitude;
          frame(x, y) = detail::clamp_intensity(double(frame(x, y)) + offset);
        }
      }
  }

  void paint_actor(const ActorSpec& actor, std::int64_t t,
                   RenderedFrame& out) const {
    const std::int64_t exit =
        actor.exit < 0 ? script_.frames - 1 : actor.exit;
    if (t < actor.enter || t > exit) return;
    const double dt = double(t - actor.enter);

    auto position = [&](double start, double v, int frame_span,
                        int actor_span) {
      const double raw = start + v * dt;
      if (actor.path == ActorSpec::Path::linear) return raw;
      if (actor.path == ActorSpec::Path::loop) {
        const double span = double(frame_span + actor_span);
        return detail::wrap(raw + actor_span, span) - actor_span;
      }
      const double limit = double(frame_span - actor_span);
      if (limit <= 0.0) return 0.0;
      const double u = detail::wrap(raw, 2.0 * limit);
      return u <= limit ? u : 2.0 * limit - u;
    };
    const double fx = position(actor.x, actor.vx, script_.width, actor.width);
    const double fy = position(actor.y, actor.vy, script_.height, actor.height);
    const int x0 = int(std::llround(fx));
    const int y0 = int(std::llround(fy));

    const double cx = x0 + actor.width / 2.0;
    const double cy = y0 + actor.height / 2.0;
    const double ax = actor.width / 2.0;
    const double ay = actor.height / 2.0;
    for (int y = y0; y < y0 + actor.height; ++y)
      for (int x = x0; x < x0 + actor.width; ++x) {
        if (!out.frame.contains(x, y)) continue;
        if (actor.shape == ActorSpec::Shape::ellipse) {
          const double dx = (x + 0.5 - cx) / ax;
          const double dy = (y + 0.5 - cy) / ay;
          if (dx * dx + dy * dy > 1.0) continue;
        }
        out.frame(x, y) = std::uint8_t(actor.intensity);
        out.mask(x, y) = actor.anomalous ? 1 : 0;
      }
  }

  SceneScript script_;
};

// ============================================================
// script parsing: [scene] / [actor] / [noise] sections of key=value
// ============================================================

namespace detail {

struct ScriptParser {
  SceneScript script;
  std::string section;
  bool scene_seen = false;
  ActorSpec actor;
  NoiseSpec noise;

  void close_section(const std::string& where) {
    if (section == "actor") {
      if (actor.width < 1 || actor.height < 1)
        throw ConfigError(where + ": actor needs positive width and height");
      if (actor.intensity < 0 || actor.intensity > 255)
        throw ConfigError(where + ": actor intensity outside [0, 255]");
      script.actors.push_back(actor);
    } else if (section == "noise") {
      if (noise.width < 1 || noise.height < 1)
        throw ConfigError(where + ": noise region needs positive size");
      if (noise.prob < 0.0 || noise.prob > 1.0)
        throw ConfigError(where + ": noise prob outside [0, 1]");
      if (noise.amplitude < 0)
        throw ConfigError(where + ": noise amplitude must be >= 0");
      script.noise.push_back(noise);
    }
  }

  void open_section(const std::string& name, const std::string& where) {
    close_section(where);
    section = name;
    if (name == "scene") {
      if (scene_seen) throw ConfigError(where + ": duplicate [scene] section");
      scene_seen = true;
    } else if (name == "actor") {
      actor = ActorSpec{};
    } else if (name == "noise") {
      noise = NoiseSpec{};
    } else {
      throw ConfigError(where + ": unknown section [" + name + "]");
    }
  }

  void key_value(std::string_view key, std::string_view value,
                 const std::string& where) {
    const std::string what = section + "." + std::string(key);
    auto bad_key = [&]() -> ConfigError {
      return ConfigError(where + ": unknown key '" + std::string(key) +
                         "' in [" + section + "]");
    };
    if (section == "scene") {
      if (key == "width") script.width = int(parse_int(value, what));
      else if (key == "height") script.height = int(parse_int(value, what));
      else if (key == "frames") script.frames = parse_int(value, what);
      else if (key == "background") script.background = int(parse_int(value, what));
      else if (key == "seed") script.seed = std::uint64_t(parse_int(value, what));
      else throw bad_key();
    } else if (section == "actor") {
      if (key == "shape") {
        if (value == "rect") actor.shape = ActorSpec::Shape::rect;
        else if (value == "ellipse") actor.shape = ActorSpec::Shape::ellipse;
        else throw ConfigError(where + ": shape must be rect or ellipse");
      } else if (key == "width") actor.width = int(parse_int(value, what));
      else if (key == "height") actor.height = int(parse_int(value, what));
      else if (key == "intensity") actor.intensity = int(parse_int(value, what));
      else if (key == "x") actor.x = parse_double(value, what);
      else if (key == "y") actor.y = parse_double(value, what);
      else if (key == "vx") actor.vx = parse_double(value, what);
      else if (key == "vy") actor.vy = parse_double(value, what);
      else if (key == "path") {
        if (value == "linear") actor.path = ActorSpec::Path::linear;
        else if (value == "loop") actor.path = ActorSpec::Path::loop;
        else if (value == "bounce") actor.path = ActorSpec::Path::bounce;
        else throw ConfigError(where + ": path must be linear, loop or bounce");
      } else if (key == "enter") actor.enter = parse_int(value, what);
      else if (key == "exit") actor.exit = parse_int(value, what);
      else if (key == "anomalous") actor.anomalous = parse_int(value, what) != 0;
      else throw bad_key();
    } else if (section == "noise") {
      if (key == "mode") {
        if (value == "flicker") noise.mode = NoiseSpec::Mode::flicker;
        else if (value == "shimmer") noise.mode = NoiseSpec::Mode::shimmer;
        else throw ConfigError(where + ": mode must be flicker or shimmer");
      } else if (key == "x") noise.x = int(parse_int(value, what));
      else if (key == "y") noise.y = int(parse_int(value, what));
      else if (key == "width") noise.width = int(parse_int(value, what));
      else if (key == "height") noise.height = int(parse_int(value, what));
      else if (key == "prob") noise.prob = parse_double(value, what);
      else if (key == "amplitude") noise.amplitude = int(parse_int(value, what));
      else throw bad_key();
    } else {
      throw ConfigError(where + ": key '" + std::string(key) +
                        "' outside any section");
    }
  }
};

}  // namespace detail

inline SceneScript parse_script(const std::string& text,
                                const std::string& name = "script") {
  detail::ScriptParser parser;
  std::size_t pos = 0;
  int lineno = 0;
  while (pos <= text.size()) {
    auto nl = text.find('\n', pos);
    if (nl == std::string::npos) nl = text.size();
    std::string_view line(text.data() + pos, nl - pos);
    pos = nl + 1;
    ++lineno;
    const std::string where = name + ":" + std::to_string(lineno);
    std::string_view s = detail::trim(line);
    if (const auto hash = s.find('#'); hash != std::string_view::npos)
      s = detail::trim(s.substr(0, hash));
    if (s.empty()) continue;
    if (s.front() == '[') {
      if (s.back() != ']') throw ConfigError(where + ": unterminated section");
      parser.open_section(std::string(detail::trim(s.substr(1, s.size() - 2))),
                          where);
      continue;
    }
    const auto eq = s.find('=');
    if (eq == std::string_view::npos)
      throw ConfigError(where + ": expected key=value, got '" + std::string(s) + "'");
    parser.key_value(detail::trim(s.substr(0, eq)), detail::trim(s.substr(eq + 1)),
                     where);
  }
  const std::string where = name + ":" + std::to_string(lineno);
  parser.close_section(where);
  if (!parser.scene_seen) throw ConfigError(name + ": missing [scene] section");
  if (parser.script.width < 1 || parser.script.height < 1)
    throw ConfigError(name + ": scene needs positive width and height");
  if (parser.script.frames < 1)
    throw ConfigError(name + ": scene needs at least one frame");
  if (parser.script.background < 0 || parser.script.background > 255)
    throw ConfigError(name + ": background outside [0, 255]");
  for (const auto& noise : parser.script.noise)
    if (noise.x < 0 || noise.y < 0 ||
        noise.x + noise.width > parser.script.width ||
        noise.y + noise.height > parser.script.height)
      throw ConfigError(name + ": noise region leaves the frame");
  return parser.script;
}

inline SyntheticSource render(const SceneScript& script) {
  return SyntheticSource(script);
}

inline SyntheticSource render(const SceneScript& script, std::uint64_t seed) {
  SceneScript s = script;
  s.seed = seed;
  return SyntheticSource(std::move(s));
}

}  // namespace bsub

#endif  // BSUB_SYNTH_HPP
