#ifndef BSUB_EVENT_HPP
#define BSUB_EVENT_HPP

#include <cstdint>
#include <vector>

#include "bsub/components.hpp"
#include "bsub/descriptor.hpp"
#include "bsub/image.hpp"

namespace bsub {

// Weights and window length of the per-pixel event statistic
//   e_t = (A1 * S_L + A3 * S_F + A2 * kappa) / min(frames_seen, w)
// where over the last w frames S_L sums labels, S_F sums f*l, and kappa
// counts label flips between consecutive frames.
struct EventParams {
  int w = 100;
  double a1 = 0.0;
  double a2 = 0.0;
  double a3 = 1.0;
};

// Sliding-window state behind the statistic.
//
// Labels are retained as w packed bit-planes; running sums are integers, so
// every update is exact. The f*l sum is kept in descriptor hit units (f =
// hits/N^2), and the term leaving the window is recomputed from the evicted
// label plane instead of being stored, which keeps the steady state near the
// w/8 bytes per pixel the label ring itself costs. The S_L and kappa buffers
// exist only when A1 or A2 use them; the accessors fall back to scanning the
// ring. Pushed descriptors must come from size_descriptor(labels) with this
// state's window and connectivity, or add/subtract symmetry breaks.
class EventState {
 public:
  EventState(int width, int height, EventParams params,
             int descriptor_window, Connectivity conn = Connectivity::eight)
      : params_(params), desc_window_(descriptor_window), conn_(conn),
        width_(width), height_(height) {
    if (params.w < 1 || params.w > 65535)
      throw ConfigError("event window w must be in [1, 65535], got " +
                        std::to_string(params.w));
    validate_descriptor_window(descriptor_window);
    if (width < 1 || height < 1)
      throw ConfigError("event state needs positive geometry");
    pixels_ = std::size_t(width) * height;
    words_ = (pixels_ + 63) / 64;
    planes_.assign(std::size_t(params.w) * words_, 0);
    sum_hits_.assign(pixels_, 0);
    if (params.a1 != 0.0) sum_labels_.assign(pixels_, 0);
    if (params.a2 != 0.0) flips_.assign(pixels_, 0);
  }

  const EventParams& params() const { return params_; }
  int width() const { return width_; }
  int height() const { return height_; }
  std::int64_t frames_seen() const { return frames_seen_; }
  bool warm() const { return frames_seen_ >= params_.w; }

  void push(const LabelField& labels, const DescriptorField& desc) {
    if (labels.width() != width_ || labels.height() != height_ ||
        desc.width() != width_ || desc.height() != height_)
      throw DataError("geometry-mismatch pushed into event state");
    if (desc.window() != desc_window_)
      throw ConfigError("descriptor window " + std::to_string(desc.window()) +
                        " pushed into event state built for " +
                        std::to_string(desc_window_));

    const int w = params_.w;
    const std::size_t slot = std::size_t(frames_seen_ % w);
    const bool full = frames_seen_ >= w;

    if (full) retire_oldest(slot);

    if (w >= 2 && frames_seen_ >= 1 && !flips_.empty()) {
      const std::uint64_t* newest = plane(std::size_t((frames_seen_ - 1) % w));
      for (std::size_t i = 0; i < pixels_; ++i)
        flips_[i] = std::uint16_t(flips_[i] + (bit(newest, i) != (labels[i] != 0)));
    }
    if (!sum_labels_.empty())
      for (std::size_t i = 0; i < pixels_; ++i)
        sum_labels_[i] = std::uint16_t(sum_labels_[i] + (labels[i] ? 1 : 0));
    for (std::size_t i = 0; i < pixels_; ++i)
      sum_hits_[i] += desc.hits(i);

    std::uint64_t* dst = plane(slot);
    for (std::size_t word = 0; word < words_; ++word) dst[word] = 0;
    for (std::size_t i = 0; i < pixels_; ++i)
      if (labels[i]) dst[i / 64] |= std::uint64_t(1) << (i % 64);

    t_ = labels.t;
    ++frames_seen_;
  }

  EventField statistic() const {
    if (frames_seen_ == 0) throw ConfigError("statistic before any frame");
    EventField e(width_, height_);
    e.t = t_;
    const double frames =
        double(frames_seen_ < params_.w ? frames_seen_ : params_.w);
    const double n2 = double(desc_window_) * desc_window_;
    for (std::size_t i = 0; i < pixels_; ++i) {
      double v = params_.a3 * (double(sum_hits_[i]) / n2);
      if (!sum_labels_.empty()) v += params_.a1 * double(sum_labels_[i]);
      if (!flips_.empty()) v += params_.a2 * double(flips_[i]);
      e[i] = float(v / frames);
    }
    return e;
  }

  // Batch-checkable views of the running sums. S_L and kappa are recomputed
  // from the label ring when their buffers are not materialized.
  std::uint32_t label_sum(std::size_t i) const {
    if (!sum_labels_.empty()) return sum_labels_[i];
    const std::int64_t held = frames_seen_ < params_.w ? frames_seen_ : params_.w;
    std::uint32_t sum = 0;
    for (std::int64_t k = frames_seen_ - held; k < frames_seen_; ++k)
      sum += bit(plane(std::size_t(k % params_.w)), i) ? 1 : 0;
    return sum;
  }

  std::uint64_t descriptor_hit_sum(std::size_t i) const { return sum_hits_[i]; }

  std::uint32_t transition_count(std::size_t i) const {
    if (!flips_.empty()) return flips_[i];
    const std::int64_t held = frames_seen_ < params_.w ? frames_seen_ : params_.w;
    std::uint32_t count = 0;
    for (std::int64_t k = frames_seen_ - held + 1; k < frames_seen_; ++k) {
      const bool prev = bit(plane(std::size_t((k - 1) % params_.w)), i);
      const bool cur = bit(plane(std::size_t(k % params_.w)), i);
      count += prev != cur ? 1 : 0;
    }
    return count;
  }

  // Oldest retained label plane reconstructed as a field (testing hook).
  LabelField held_labels(std::int64_t t) const {
    const std::int64_t held = frames_seen_ < params_.w ? frames_seen_ : params_.w;
    if (t < frames_seen_ - held || t >= frames_seen_)
      throw ConfigError("frame " + std::to_string(t) + " not retained");
    return unpack(plane(std::size_t(t % params_.w)));
  }

  double state_bytes_per_pixel() const {
    const std::size_t bytes = planes_.size() * sizeof(std::uint64_t) +
                              sum_hits_.size() * sizeof(std::uint32_t) +
                              sum_labels_.size() * sizeof(std::uint16_t) +
                              flips_.size() * sizeof(std::uint16_t);
    return double(bytes) / double(pixels_);
  }

 private:
  const std::uint64_t* plane(std::size_t slot) const {
    return planes_.data() + slot * words_;
  }
  std::uint64_t* plane(std::size_t slot) {
    return planes_.data() + slot * words_;
  }
  static bool bit(const std::uint64_t* plane, std::size_t i) {
    return (plane[i / 64] >> (i % 64)) & 1;
  }

  LabelField unpack(const std::uint64_t* plane) const {
    LabelField out(width_, height_);
    for (std::size_t i = 0; i < pixels_; ++i)
      out[i] = bit(plane, i) ? 1 : 0;
    return out;
  }

  // Removes the window's oldest frame from every running sum. The f*l terms
  // are recomputed from the stored label plane; kappa loses the transition
  // between the two oldest frames, never one across the evicted edge.
  void retire_oldest(std::size_t slot) {
    const std::uint64_t* oldest = plane(slot);
    if (!flips_.empty()) {
      const std::uint64_t* second = plane((slot + 1) % std::size_t(params_.w));
      for (std::size_t i = 0; i < pixels_; ++i)
        flips_[i] = std::uint16_t(flips_[i] - (bit(oldest, i) != bit(second, i)));
    }
    if (!sum_labels_.empty())
      for (std::size_t i = 0; i < pixels_; ++i)
        sum_labels_[i] = std::uint16_t(sum_labels_[i] - (bit(oldest, i) ? 1 : 0));
    const LabelField old_labels = unpack(oldest);
    const ComponentMap comps = label_components(old_labels, conn_);
    const DescriptorField old_desc =
        size_descriptor(old_labels, comps, desc_window_);
    for (std::size_t i = 0; i < pixels_; ++i)
      sum_hits_[i] -= old_desc.hits(i);
  }

  EventParams params_;
  int desc_window_;
  Connectivity conn_;
  int width_, height_;
  std::size_t pixels_ = 0, words_ = 0;
  std::int64_t frames_seen_ = 0;
  std::int64_t t_ = 0;
  std::vector<std::uint64_t> planes_;
  std::vector<std::uint32_t> sum_hits_;
  std::vector<std::uint16_t> sum_labels_;
  std::vector<std::uint16_t> flips_;
};

}  // namespace bsub

#endif  // BSUB_EVENT_HPP
