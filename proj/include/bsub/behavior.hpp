#ifndef BSUB_BEHAVIOR_HPP
#define BSUB_BEHAVIOR_HPP

#include <array>
#include <cstdint>
#include <cstring>
#include <string>
#include <vector>

#include "bsub/config.hpp"
#include "bsub/image.hpp"
#include "bsub/io.hpp"
#include "bsub/pipeline.hpp"
#include "bsub/text.hpp"

namespace bsub {

namespace detail {

inline std::uint32_t crc32(const std::uint8_t* data, std::size_t size,
                           std::uint32_t crc = 0) {
  static const auto table = [] {
    std::array<std::uint32_t, 256> t{};
    for (std::uint32_t i = 0; i < 256; ++i) {
      std::uint32_t c = i;
      for (int k = 0; k < 8; ++k)
        c = (c & 1) ? 0xEDB88320u ^ (c >> 1) : c >> 1;
      t[i] = c;
    }
    return t;
  }();
  crc ^= 0xFFFFFFFFu;
  for (std::size_t i = 0; i < size; ++i)
    crc = table[(crc ^ data[i]) & 0xFFu] ^ (crc >> 8);
  return crc ^ 0xFFFFFFFFu;
}

inline void put_u16(std::vector<std::uint8_t>& out, std::uint16_t v) {
  out.push_back(std::uint8_t(v));
  out.push_back(std::uint8_t(v >> 8));
}

inline void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  out.push_back(std::uint8_t(v));
  out.push_back(std::uint8_t(v >> 8));
  out.push_back(std::uint8_t(v >> 16));
  out.push_back(std::uint8_t(v >> 24));
}

class ByteReader {
 public:
  ByteReader(const std::vector<std::uint8_t>& bytes, const std::string& path)
      : bytes_(bytes), path_(path) {}

  const std::uint8_t* take(std::size_t n) {
    if (pos_ + n > bytes_.size())
      throw DataError("checksum-mismatch: " + path_ + " is truncated");
    const std::uint8_t* p = bytes_.data() + pos_;
    pos_ += n;
    return p;
  }
  std::uint16_t u16() {
    const auto* p = take(2);
    return std::uint16_t(p[0] | (p[1] << 8));
  }
  std::uint32_t u32() {
    const auto* p = take(4);
    return std::uint32_t(p[0]) | (std::uint32_t(p[1]) << 8) |
           (std::uint32_t(p[2]) << 16) | (std::uint32_t(p[3]) << 24);
  }
  std::size_t pos() const { return pos_; }

 private:
  const std::vector<std::uint8_t>& bytes_;
  std::string path_;
  std::size_t pos_ = 0;
};

}  // namespace detail

// Settings a behavior image was trained under; compared before detection.
struct BehaviorMeta {
  std::int64_t frames = 0;  // training length M
  int w = 0;
  int descriptor_window = 0;
  double tau = 0.0, rho = 0.0;
  double a1 = 0.0, a2 = 0.0, a3 = 0.0;
};

// Per-pixel reduction of training events: the background behavior B(x).
struct BehaviorImage {
  Image<float> values;
  SurrogateKind kind = SurrogateKind::max;
  BehaviorMeta meta;
};

// Reduces the training video's event fields pixelwise (max or mean over all
// full-window frames; warm-up events are left out of the reduction).
inline BehaviorImage train(FrameSource& source, const Config& cfg) {
  validate(cfg);
  const std::size_t frames = source.count();
  if (frames < std::size_t(cfg.event.w))
    throw DataError("training video shorter than event window (M=" +
                    std::to_string(frames) + ", w=" +
                    std::to_string(cfg.event.w) + ")");

  Pipeline pipeline(source.width(), source.height(), cfg);
  BehaviorImage behavior;
  behavior.kind = cfg.surrogate;
  behavior.values = Image<float>(source.width(), source.height(), 0.0f);
  std::vector<double> mean_acc;
  if (cfg.surrogate == SurrogateKind::mean)
    mean_acc.assign(behavior.values.size(), 0.0);
  std::size_t reduced = 0;

  for (std::size_t t = 0; t < frames; ++t) {
    const FrameAnalysis fa = pipeline.process(source.frame(t));
    if (!fa.warm) continue;
    ++reduced;
    if (cfg.surrogate == SurrogateKind::max) {
      for (std::size_t i = 0; i < behavior.values.size(); ++i)
        if (fa.events[i] > behavior.values[i]) behavior.values[i] = fa.events[i];
    } else {
      for (std::size_t i = 0; i < behavior.values.size(); ++i)
        mean_acc[i] += double(fa.events[i]);
    }
  }
  if (cfg.surrogate == SurrogateKind::mean)
    for (std::size_t i = 0; i < behavior.values.size(); ++i)
      behavior.values[i] = float(mean_acc[i] / double(reduced));

  behavior.meta = BehaviorMeta{std::int64_t(frames), cfg.event.w,
                               cfg.descriptor_window, cfg.tau, cfg.rho,
                               cfg.event.a1, cfg.event.a2, cfg.event.a3};
  return behavior;
}

// ============================================================
// B file: "BSUB", version u16, kind u8, width u32, height u32,
// length-prefixed key=value metadata, f32 values, CRC32 of all
// bytes after the magic. Everything little-endian.
// ============================================================

inline void save(const BehaviorImage& b, const std::string& path) {
  using detail::put_u16;
  using detail::put_u32;
  std::vector<std::uint8_t> out = {'B', 'S', 'U', 'B'};
  put_u16(out, 1);
  out.push_back(b.kind == SurrogateKind::max ? 0 : 1);
  put_u32(out, std::uint32_t(b.values.width()));
  put_u32(out, std::uint32_t(b.values.height()));

  std::string meta;
  meta += "M=" + std::to_string(b.meta.frames) + "\n";
  meta += "w=" + std::to_string(b.meta.w) + "\n";
  meta += "N=" + std::to_string(b.meta.descriptor_window) + "\n";
  meta += "tau=" + detail::format_double(b.meta.tau) + "\n";
  meta += "rho=" + detail::format_double(b.meta.rho) + "\n";
  meta += "A1=" + detail::format_double(b.meta.a1) + "\n";
  meta += "A2=" + detail::format_double(b.meta.a2) + "\n";
  meta += "A3=" + detail::format_double(b.meta.a3) + "\n";
  put_u32(out, std::uint32_t(meta.size()));
  out.insert(out.end(), meta.begin(), meta.end());

  for (std::size_t i = 0; i < b.values.size(); ++i) {
    std::uint32_t bits;
    std::memcpy(&bits, &b.values[i], 4);
    put_u32(out, bits);
  }
  put_u32(out, detail::crc32(out.data() + 4, out.size() - 4));
  write_file(path, out.data(), out.size());
}

inline BehaviorImage load(const std::string& path) {
  const auto bytes = read_file(path);
  detail::ByteReader in(bytes, path);
  const std::uint8_t* magic = in.take(4);
  if (std::memcmp(magic, "BSUB", 4) != 0)
    throw DataError(path + " is not a behavior image (magic 'BSUB' missing)");
  const std::uint16_t version = in.u16();
  if (version != 1)
    throw DataError(path + ": unsupported version " + std::to_string(version) +
                    " (this build reads version 1)");

  BehaviorImage b;
  const std::uint8_t kind = *in.take(1);
  if (kind > 1)
    throw DataError(path + ": unknown surrogate kind " + std::to_string(kind));
  b.kind = kind == 0 ? SurrogateKind::max : SurrogateKind::mean;
  const std::uint32_t width = in.u32();
  const std::uint32_t height = in.u32();
  if (width == 0 || height == 0 || width > 1u << 20 || height > 1u << 20)
    throw DataError(path + ": implausible geometry");

  const std::uint32_t meta_len = in.u32();
  const std::uint8_t* meta_bytes = in.take(meta_len);
  const std::string meta_text(meta_bytes, meta_bytes + meta_len);
  std::size_t pos = 0;
  while (pos < meta_text.size()) {
    auto nl = meta_text.find('\n', pos);
    if (nl == std::string::npos) nl = meta_text.size();
    const std::string line = meta_text.substr(pos, nl - pos);
    pos = nl + 1;
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw DataError(path + ": malformed metadata line '" + line + "'");
    const std::string key = line.substr(0, eq);
    const std::string value = line.substr(eq + 1);
    if (key == "M") b.meta.frames = detail::parse_int(value, key);
    else if (key == "w") b.meta.w = int(detail::parse_int(value, key));
    else if (key == "N") b.meta.descriptor_window = int(detail::parse_int(value, key));
    else if (key == "tau") b.meta.tau = detail::parse_double(value, key);
    else if (key == "rho") b.meta.rho = detail::parse_double(value, key);
    else if (key == "A1") b.meta.a1 = detail::parse_double(value, key);
    else if (key == "A2") b.meta.a2 = detail::parse_double(value, key);
    else if (key == "A3") b.meta.a3 = detail::parse_double(value, key);
    else throw DataError(path + ": unknown metadata key '" + key + "'");
  }

  b.values = Image<float>(int(width), int(height));
  for (std::size_t i = 0; i < b.values.size(); ++i) {
    const std::uint32_t bits = in.u32();
    std::memcpy(&b.values[i], &bits, 4);
  }

  const std::size_t payload_end = in.pos();
  const std::uint32_t stored = in.u32();
  const std::uint32_t computed = detail::crc32(bytes.data() + 4, payload_end - 4);
  if (stored != computed)
    throw DataError("checksum-mismatch in " + path);
  return b;
}

// Differences between the settings B was trained under and the current
// config; empty means compatible. Training length M is informational only.
inline std::vector<std::string> metadata_mismatches(const BehaviorMeta& meta,
                                                    const Config& cfg) {
  using detail::format_double;
  std::vector<std::string> diffs;
  auto check = [&diffs](const std::string& name, const std::string& was,
                        const std::string& now) {
    if (was != now)
      diffs.push_back(name + ": trained with " + was + ", configured " + now);
  };
  check("w", std::to_string(meta.w), std::to_string(cfg.event.w));
  check("N", std::to_string(meta.descriptor_window),
        std::to_string(cfg.descriptor_window));
  check("tau", format_double(meta.tau), format_double(cfg.tau));
  check("rho", format_double(meta.rho), format_double(cfg.rho));
  check("A1", format_double(meta.a1), format_double(cfg.event.a1));
  check("A2", format_double(meta.a2), format_double(cfg.event.a2));
  check("A3", format_double(meta.a3), format_double(cfg.event.a3));
  return diffs;
}

}  // namespace bsub

#endif  // BSUB_BEHAVIOR_HPP
