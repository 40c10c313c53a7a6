#ifndef BSUB_IMAGE_HPP
#define BSUB_IMAGE_HPP

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace bsub {

// Bad parameters or malformed configuration; the CLI exits 1 on these.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Unreadable, corrupt, or geometrically inconsistent data; the CLI exits 2.
struct DataError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Dense row-major grid with a frame timestamp.
template <typename T>
class Image {
 public:
  Image() = default;

  Image(int width, int height, T fill = T{})
      : width_(width), height_(height) {
    if (width <= 0 || height <= 0)
      throw ConfigError("image dimensions must be positive, got " +
                        std::to_string(width) + "x" + std::to_string(height));
    data_.assign(static_cast<std::size_t>(width) * height, fill);
  }

  int width() const { return width_; }
  int height() const { return height_; }
  std::size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }

  std::size_t index(int x, int y) const {
    return static_cast<std::size_t>(y) * width_ + x;
  }
  bool contains(int x, int y) const {
    return x >= 0 && x < width_ && y >= 0 && y < height_;
  }

  T& operator()(int x, int y) { return data_[index(x, y)]; }
  const T& operator()(int x, int y) const { return data_[index(x, y)]; }
  T& operator[](std::size_t i) { return data_[i]; }
  const T& operator[](std::size_t i) const { return data_[i]; }

  T& at(int x, int y) {
    check(x, y);
    return data_[index(x, y)];
  }
  const T& at(int x, int y) const {
    check(x, y);
    return data_[index(x, y)];
  }

  T* data() { return data_.data(); }
  const T* data() const { return data_.data(); }
  auto begin() { return data_.begin(); }
  auto end() { return data_.end(); }
  auto begin() const { return data_.begin(); }
  auto end() const { return data_.end(); }

  template <typename U>
  bool same_geometry(const Image<U>& other) const {
    return width_ == other.width() && height_ == other.height();
  }

  // Frame index within the source video.
  std::int64_t t = 0;

 private:
  void check(int x, int y) const {
    if (!contains(x, y))
      throw ConfigError("pixel (" + std::to_string(x) + "," +
                        std::to_string(y) + ") outside " +
                        std::to_string(width_) + "x" + std::to_string(height_));
  }

  int width_ = 0;
  int height_ = 0;
  std::vector<T> data_;
};

using Frame = Image<std::uint8_t>;       // 8-bit luminance
using LabelField = Image<std::uint8_t>;  // values 0 (static) or 1 (moving)
using EventField = Image<float>;

// BT.601 luma, rounded to nearest.
inline std::uint8_t luminance(std::uint8_t r, std::uint8_t g, std::uint8_t b) {
  return static_cast<std::uint8_t>((299 * r + 587 * g + 114 * b + 500) / 1000);
}

// Interleaved RGB buffer of width*height*3 bytes to a luminance frame.
inline Frame to_luminance(const std::uint8_t* rgb, int width, int height) {
  Frame out(width, height);
  const std::size_t n = out.size();
  for (std::size_t i = 0; i < n; ++i)
    out[i] = luminance(rgb[3 * i], rgb[3 * i + 1], rgb[3 * i + 2]);
  return out;
}

}  // namespace bsub

#endif  // BSUB_IMAGE_HPP
