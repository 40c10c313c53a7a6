#ifndef BSUB_DESCRIPTOR_HPP
#define BSUB_DESCRIPTOR_HPP

#include <cstdint>
#include <vector>

#include "bsub/components.hpp"
#include "bsub/image.hpp"

namespace bsub {

// Object-size descriptor field. Values are kept as integer window hits;
// f(x) = hits(x) / N^2 in [0, 1], exactly 0 on static pixels.
class DescriptorField {
 public:
  DescriptorField() = default;
  DescriptorField(int width, int height, int window)
      : window_(window), hits_(width, height, 0) {}

  int width() const { return hits_.width(); }
  int height() const { return hits_.height(); }
  std::size_t size() const { return hits_.size(); }
  int window() const { return window_; }

  std::uint16_t hits(std::size_t i) const { return hits_[i]; }
  std::uint16_t& hits(std::size_t i) { return hits_[i]; }
  float value(std::size_t i) const {
    return float(hits_[i]) / float(window_ * window_);
  }
  float value(int x, int y) const { return value(hits_.index(x, y)); }

  Image<float> values() const {
    Image<float> out(width(), height());
    out.t = t;
    for (std::size_t i = 0; i < size(); ++i) out[i] = value(i);
    return out;
  }

  std::int64_t t = 0;

 private:
  int window_ = 0;
  Image<std::uint16_t> hits_;
};

inline void validate_descriptor_window(int window) {
  if (window < 1 || window % 2 == 0 || window > 255)
    throw ConfigError("descriptor window must be odd, in [1, 255], got " +
                      std::to_string(window));
}

// Fraction of the N x N window around each moving pixel that belongs to the
// same connected component (the pixel counts itself; the window is clipped at
// the borders but the denominator stays N^2, so border activity reads small).
//
// Sliding column histogram: per output row, component-id counts over the
// window are maintained while x advances, so each pixel costs O(N), not O(N^2).
inline DescriptorField size_descriptor(const LabelField& labels,
                                       const ComponentMap& comps,
                                       int window) {
  validate_descriptor_window(window);
  if (!labels.same_geometry(comps.ids))
    throw DataError("geometry-mismatch between labels and component map");
  const int w = labels.width();
  const int h = labels.height();
  const int r = window / 2;

  DescriptorField out(w, h, window);
  out.t = labels.t;

  std::vector<std::uint32_t> in_window(comps.count + 1, 0);
  auto column = [&](int cx, int y0, int y1, std::int32_t delta) {
    for (int yy = y0; yy <= y1; ++yy) {
      const std::uint32_t id = comps.ids(cx, yy);
      if (id) in_window[id] += std::uint32_t(delta);
    }
  };

  for (int y = 0; y < h; ++y) {
    const int y0 = y - r < 0 ? 0 : y - r;
    const int y1 = y + r >= h ? h - 1 : y + r;
    const int lead = r < w - 1 ? r : w - 1;
    for (int cx = 0; cx <= lead; ++cx) column(cx, y0, y1, +1);
    for (int x = 0; x < w; ++x) {
      if (x > 0) {
        if (x + r < w) column(x + r, y0, y1, +1);
        if (x - r - 1 >= 0) column(x - r - 1, y0, y1, -1);
      }
      const std::size_t i = labels.index(x, y);
      if (labels[i])
        out.hits(i) = std::uint16_t(in_window[comps.ids[i]]);
    }
    const int tail = w - 1 - r < 0 ? 0 : w - 1 - r;
    for (int cx = tail; cx <= w - 1; ++cx) column(cx, y0, y1, -1);
  }
  return out;
}

}  // namespace bsub

#endif  // BSUB_DESCRIPTOR_HPP
