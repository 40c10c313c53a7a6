#ifndef BSUB_PIPELINE_HPP
#define BSUB_PIPELINE_HPP

#include <cstdint>

#include "bsub/components.hpp"
#include "bsub/config.hpp"
#include "bsub/descriptor.hpp"
#include "bsub/event.hpp"
#include "bsub/image.hpp"
#include "bsub/motion.hpp"

namespace bsub {

// Per-frame results of the full processing chain.
struct FrameAnalysis {
  LabelField labels;
  ComponentMap components;
  DescriptorField descriptor;
  EventField events;
  bool warm = false;  // event window held w frames when events was computed
};

// Streams frames through motion labeling, component-aware size descriptors
// and the sliding event statistic. The background model seeds itself from the
// first frame, which therefore yields an all-static label field.
class Pipeline {
 public:
  Pipeline(int width, int height, const Config& cfg)
      : background_(cfg.tau, cfg.rho),
        events_(width, height, cfg.event, cfg.descriptor_window,
                cfg.connectivity),
        connectivity_(cfg.connectivity),
        descriptor_window_(cfg.descriptor_window) {
    validate(cfg);
  }

  FrameAnalysis process(const Frame& frame) {
    if (!background_.initialized()) background_.init(frame);
    FrameAnalysis fa;
    fa.labels = background_.step(frame);
    fa.components = label_components(fa.labels, connectivity_);
    fa.descriptor = size_descriptor(fa.labels, fa.components, descriptor_window_);
    events_.push(fa.labels, fa.descriptor);
    fa.events = events_.statistic();
    fa.warm = events_.warm();
    return fa;
  }

  const EventState& events() const { return events_; }
  const BackgroundModel& background() const { return background_; }
  std::int64_t frames_seen() const { return events_.frames_seen(); }

  // Steady-state footprint: the background plane is lazily allocated but
  // always one float per pixel once frames stream.
  double state_bytes_per_pixel() const {
    return events_.state_bytes_per_pixel() + double(sizeof(float));
  }

 private:
  BackgroundModel background_;
  EventState events_;
  Connectivity connectivity_;
  int descriptor_window_;
};

}  // namespace bsub

#endif  // BSUB_PIPELINE_HPP
