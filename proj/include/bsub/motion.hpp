#ifndef BSUB_MOTION_HPP
#define BSUB_MOTION_HPP

#include <cmath>
#include <cstdint>
#include <vector>

#include "bsub/image.hpp"

namespace bsub {

// Exponential background estimate with threshold labeling.
//
// Labels are decided against the background as it stood before the frame,
// then every pixel is blended unconditionally:
//   l_t(x) = |I_t(x) - b_t(x)| > tau
//   b_{t+1}(x) = (1 - rho) * b_t(x) + rho * I_t(x)
class BackgroundModel {
 public:
  BackgroundModel(double tau, double rho) : tau_(tau), rho_(rho) {
    if (!(tau >= 0.0)) throw ConfigError("tau must be >= 0");
    if (!(rho > 0.0 && rho < 1.0)) throw ConfigError("rho must be in (0,1)");
  }

  // Seeds the estimate with the first frame; resets any prior state.
  void init(const Frame& first) {
    width_ = first.width();
    height_ = first.height();
    b_.assign(first.size(), 0.0f);
    for (std::size_t i = 0; i < first.size(); ++i)
      b_[i] = float(first[i]);
  }

  bool initialized() const { return !b_.empty(); }

  LabelField step(const Frame& frame) {
    if (!initialized()) throw ConfigError("step before init");
    if (frame.width() != width_ || frame.height() != height_)
      throw DataError("geometry-mismatch: frame " +
                      std::to_string(frame.width()) + "x" +
                      std::to_string(frame.height()) + " against model " +
                      std::to_string(width_) + "x" + std::to_string(height_));
    LabelField labels(width_, height_);
    labels.t = frame.t;
    for (std::size_t i = 0; i < b_.size(); ++i) {
      const double intensity = double(frame[i]);
      const double b = double(b_[i]);
      labels[i] = std::fabs(intensity - b) > tau_ ? 1 : 0;
      b_[i] = float((1.0 - rho_) * b + rho_ * intensity);
    }
    return labels;
  }

  double tau() const { return tau_; }
  double rho() const { return rho_; }
  const std::vector<float>& background() const { return b_; }
  std::size_t state_bytes() const { return b_.size() * sizeof(float); }

 private:
  double tau_, rho_;
  int width_ = 0, height_ = 0;
  std::vector<float> b_;
};

}  // namespace bsub

#endif  // BSUB_MOTION_HPP
