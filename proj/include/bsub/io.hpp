#ifndef BSUB_IO_HPP
#define BSUB_IO_HPP

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <memory>
#include <string>
#include <vector>

#include "bsub/image.hpp"

namespace bsub {

// ============================================================
// low-level file helpers
// ============================================================

inline std::vector<std::uint8_t> read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path);
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  return bytes;
}

inline void write_file(const std::string& path,
                       const std::uint8_t* data, std::size_t size) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot write " + path);
  out.write(reinterpret_cast<const char*>(data), std::streamsize(size));
  if (!out) throw DataError("short write to " + path);
}

inline void write_file(const std::string& path, const std::string& text) {
  write_file(path, reinterpret_cast<const std::uint8_t*>(text.data()),
             text.size());
}

// ============================================================
// PNM (PGM P5 / PPM P6) decode, PGM/PBM encode
// ============================================================

namespace detail {

// Reads the next header token, skipping whitespace and '#' comments.
inline std::string pnm_token(const std::vector<std::uint8_t>& b,
                             std::size_t& pos, const std::string& path) {
  while (pos < b.size()) {
    if (std::isspace(b[pos])) {
      ++pos;
    } else if (b[pos] == '#') {
      while (pos < b.size() && b[pos] != '\n') ++pos;
    } else {
      break;
    }
  }
  std::size_t start = pos;
  while (pos < b.size() && !std::isspace(b[pos]) && b[pos] != '#') ++pos;
  if (start == pos) throw DataError("truncated header in " + path);
  return std::string(b.begin() + start, b.begin() + pos);
}

inline int pnm_int(const std::vector<std::uint8_t>& b, std::size_t& pos,
                   const std::string& path) {
  const std::string tok = pnm_token(b, pos, path);
  int value = 0;
  auto [p, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), value);
  if (ec != std::errc{} || p != tok.data() + tok.size())
    throw DataError("bad numeric field '" + tok + "' in " + path);
  return value;
}

}  // namespace detail

// Decodes binary PGM (P5) or PPM (P6, converted to luminance). 8-bit only.
inline Frame read_pnm(const std::string& path) {
  const auto bytes = read_file(path);
  std::size_t pos = 0;
  const std::string magic = detail::pnm_token(bytes, pos, path);
  if (magic != "P5" && magic != "P6")
    throw DataError("undecodable image " + path + ": magic '" + magic +
                    "' (want P5 or P6)");
  const int width = detail::pnm_int(bytes, pos, path);
  const int height = detail::pnm_int(bytes, pos, path);
  const int maxval = detail::pnm_int(bytes, pos, path);
  if (width <= 0 || height <= 0)
    throw DataError("undecodable image " + path + ": bad dimensions");
  if (maxval <= 0 || maxval > 255)
    throw DataError("undecodable image " + path + ": maxval " +
                    std::to_string(maxval) + " unsupported");
  ++pos;  // single whitespace after maxval
  const std::size_t pixels = std::size_t(width) * height;
  const std::size_t need = magic == "P5" ? pixels : 3 * pixels;
  if (bytes.size() < pos + need)
    throw DataError("undecodable image " + path + ": truncated pixel data");
  if (magic == "P5") {
    Frame out(width, height);
    std::memcpy(out.data(), bytes.data() + pos, pixels);
    return out;
  }
  return to_luminance(bytes.data() + pos, width, height);
}

inline void write_pgm(const std::string& path, const Frame& img) {
  std::string header = "P5\n" + std::to_string(img.width()) + " " +
                       std::to_string(img.height()) + "\n255\n";
  std::vector<std::uint8_t> out(header.begin(), header.end());
  out.insert(out.end(), img.data(), img.data() + img.size());
  write_file(path, out.data(), out.size());
}

// Real-valued field quantized to 8 bits: round(clamp(v, 0, 1) * 255).
inline void write_pgm_quantized(const std::string& path,
                                const Image<float>& img) {
  Frame q(img.width(), img.height());
  q.t = img.t;
  for (std::size_t i = 0; i < img.size(); ++i) {
    float v = img[i];
    v = v < 0.0f ? 0.0f : (v > 1.0f ? 1.0f : v);
    q[i] = static_cast<std::uint8_t>(v * 255.0f + 0.5f);
  }
  write_pgm(path, q);
}

// Bitmap PBM (P4); nonzero pixels are written as 1 (black).
inline void write_pbm(const std::string& path, const Image<std::uint8_t>& img) {
  std::string header = "P4\n" + std::to_string(img.width()) + " " +
                       std::to_string(img.height()) + "\n";
  std::vector<std::uint8_t> out(header.begin(), header.end());
  const int stride = (img.width() + 7) / 8;
  for (int y = 0; y < img.height(); ++y) {
    std::size_t row = out.size();
    out.resize(row + stride, 0);
    for (int x = 0; x < img.width(); ++x)
      if (img(x, y)) out[row + x / 8] |= std::uint8_t(0x80u >> (x % 8));
  }
  write_file(path, out.data(), out.size());
}

// ============================================================
// raw-gray8 video and f32 map files, each with a <name>.meta sidecar
// ============================================================

struct RawMeta {
  int width = 0;
  int height = 0;
};

inline RawMeta read_meta(const std::string& raw_path) {
  const std::string meta_path = raw_path + ".meta";
  if (!std::filesystem::exists(meta_path))
    throw DataError("missing sidecar " + meta_path);
  std::ifstream in(meta_path);
  if (!in) throw DataError("cannot open " + meta_path);
  RawMeta meta;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw DataError("malformed sidecar " + meta_path + ": '" + line + "'");
    const std::string key = line.substr(0, eq);
    const std::string val = line.substr(eq + 1);
    int number = 0;
    auto [p, ec] = std::from_chars(val.data(), val.data() + val.size(), number);
    const bool numeric = ec == std::errc{} && p == val.data() + val.size();
    if (key == "width") {
      if (!numeric) throw DataError("malformed sidecar " + meta_path);
      meta.width = number;
    } else if (key == "height") {
      if (!numeric) throw DataError("malformed sidecar " + meta_path);
      meta.height = number;
    }
    // unknown keys are ignored
  }
  if (meta.width <= 0 || meta.height <= 0)
    throw DataError("sidecar " + meta_path + " lacks positive width/height");
  return meta;
}

inline void write_meta(const std::string& raw_path, int width, int height) {
  const std::string text =
      "width=" + std::to_string(width) + "\nheight=" + std::to_string(height) + "\n";
  write_file(raw_path + ".meta",
             reinterpret_cast<const std::uint8_t*>(text.data()), text.size());
}

// Appends frames to an open raw-gray8 file; pairs with write_meta.
class RawGray8Writer {
 public:
  RawGray8Writer(const std::string& path, int width, int height)
      : width_(width), height_(height),
        out_(path, std::ios::binary | std::ios::trunc) {
    if (!out_) throw DataError("cannot write " + path);
    write_meta(path, width, height);
  }

  void append(const Frame& frame) {
    if (frame.width() != width_ || frame.height() != height_)
      throw DataError("geometry-mismatch: frame " +
                      std::to_string(frame.width()) + "x" +
                      std::to_string(frame.height()) + " in " +
                      std::to_string(width_) + "x" + std::to_string(height_) +
                      " stream");
    out_.write(reinterpret_cast<const char*>(frame.data()),
               std::streamsize(frame.size()));
  }

 private:
  int width_, height_;
  std::ofstream out_;
};

// One little-endian f32 plane per frame, same sidecar convention.
class F32MapWriter {
 public:
  F32MapWriter(const std::string& path, int width, int height)
      : width_(width), height_(height),
        out_(path, std::ios::binary | std::ios::trunc) {
    if (!out_) throw DataError("cannot write " + path);
    write_meta(path, width, height);
  }

  void append(const Image<float>& map) {
    if (map.width() != width_ || map.height() != height_)
      throw DataError("geometry-mismatch in f32 map stream");
    static_assert(sizeof(float) == 4);
    for (std::size_t i = 0; i < map.size(); ++i) {
      std::uint32_t bits;
      std::memcpy(&bits, &map[i], 4);
      const std::uint8_t le[4] = {
          std::uint8_t(bits), std::uint8_t(bits >> 8),
          std::uint8_t(bits >> 16), std::uint8_t(bits >> 24)};
      out_.write(reinterpret_cast<const char*>(le), 4);
    }
  }

 private:
  int width_, height_;
  std::ofstream out_;
};

// ============================================================
// frame sources
// ============================================================

// A finite video: fixed geometry, frames addressed by index t.
class FrameSource {
 public:
  virtual ~FrameSource() = default;
  virtual int width() const = 0;
  virtual int height() const = 0;
  virtual std::size_t count() const = 0;
  virtual Frame frame(std::size_t t) = 0;
};

class MemorySource final : public FrameSource {
 public:
  explicit MemorySource(std::vector<Frame> frames) : frames_(std::move(frames)) {
    if (frames_.empty()) throw DataError("empty frame sequence");
    for (std::size_t i = 1; i < frames_.size(); ++i)
      if (!frames_[i].same_geometry(frames_[0]))
        throw DataError("geometry-mismatch at frame " + std::to_string(i));
  }
  int width() const override { return frames_[0].width(); }
  int height() const override { return frames_[0].height(); }
  std::size_t count() const override { return frames_.size(); }
  Frame frame(std::size_t t) override {
    Frame f = frames_.at(t);
    f.t = std::int64_t(t);
    return f;
  }

 private:
  std::vector<Frame> frames_;
};

class RawGray8Source final : public FrameSource {
 public:
  explicit RawGray8Source(const std::string& path) : path_(path) {
    const RawMeta meta = read_meta(path);
    width_ = meta.width;
    height_ = meta.height;
    std::error_code ec;
    const auto bytes = std::filesystem::file_size(path, ec);
    if (ec) throw DataError("cannot open " + path);
    const std::size_t frame_bytes = std::size_t(width_) * height_;
    if (bytes == 0 || bytes % frame_bytes != 0)
      throw DataError("geometry-mismatch: " + path + " holds " +
                      std::to_string(bytes) + " bytes, not a multiple of " +
                      std::to_string(frame_bytes) + " (" +
                      std::to_string(width_) + "x" + std::to_string(height_) + ")");
    count_ = bytes / frame_bytes;
    in_.open(path, std::ios::binary);
    if (!in_) throw DataError("cannot open " + path);
  }

  int width() const override { return width_; }
  int height() const override { return height_; }
  std::size_t count() const override { return count_; }

  Frame frame(std::size_t t) override {
    if (t >= count_)
      throw DataError("frame " + std::to_string(t) + " past end of " + path_);
    Frame f(width_, height_);
    f.t = std::int64_t(t);
    in_.seekg(std::streamoff(t * f.size()));
    in_.read(reinterpret_cast<char*>(f.data()), std::streamsize(f.size()));
    if (!in_) throw DataError("short read from " + path_);
    return f;
  }

 private:
  std::string path_;
  std::ifstream in_;
  int width_ = 0, height_ = 0;
  std::size_t count_ = 0;
};

// Directory of stills, ordered lexicographically by filename.
class ImageDirSource final : public FrameSource {
 public:
  explicit ImageDirSource(const std::string& dir) {
    std::error_code ec;
    for (const auto& entry : std::filesystem::directory_iterator(dir, ec)) {
      if (!entry.is_regular_file()) continue;
      std::string ext = entry.path().extension().string();
      std::transform(ext.begin(), ext.end(), ext.begin(),
                     [](unsigned char c) { return std::tolower(c); });
      if (ext == ".pgm" || ext == ".ppm")
        paths_.push_back(entry.path().string());
    }
    if (ec) throw DataError("cannot open directory " + dir);
    std::sort(paths_.begin(), paths_.end());
    if (paths_.empty())
      throw DataError("no decodable images (*.pgm, *.ppm) in " + dir);
    const Frame first = read_pnm(paths_[0]);
    width_ = first.width();
    height_ = first.height();
  }

  int width() const override { return width_; }
  int height() const override { return height_; }
  std::size_t count() const override { return paths_.size(); }

  Frame frame(std::size_t t) override {
    Frame f = read_pnm(paths_.at(t));
    if (f.width() != width_ || f.height() != height_)
      throw DataError("geometry-mismatch: " + paths_[t] + " is " +
                      std::to_string(f.width()) + "x" +
                      std::to_string(f.height()) + ", stream is " +
                      std::to_string(width_) + "x" + std::to_string(height_));
    f.t = std::int64_t(t);
    return f;
  }

 private:
  std::vector<std::string> paths_;
  int width_ = 0, height_ = 0;
};

// Directory -> image sequence; file -> raw-gray8 with sidecar.
inline std::unique_ptr<FrameSource> open_source(const std::string& path) {
  if (std::filesystem::is_directory(path))
    return std::make_unique<ImageDirSource>(path);
  if (std::filesystem::exists(path))
    return std::make_unique<RawGray8Source>(path);
  throw DataError("path not found: " + path);
}

}  // namespace bsub

#endif  // BSUB_IO_HPP
