#ifndef BSUB_DETECT_HPP
#define BSUB_DETECT_HPP

#include <cstdint>
#include <vector>

#include "bsub/behavior.hpp"
#include "bsub/components.hpp"
#include "bsub/image.hpp"

namespace bsub {

// Decision and score planes for one frame: anomalous iff e(x) - B(x) > theta.
struct AnomalyMap {
  Image<std::uint8_t> mask;  // 1 = anomalous
  Image<float> scores;       // e - B, kept for export
  std::int64_t t = 0;
};

inline AnomalyMap subtract(const EventField& events, const BehaviorImage& b,
                           double theta) {
  if (!events.same_geometry(b.values))
    throw DataError("geometry-mismatch: events " +
                    std::to_string(events.width()) + "x" +
                    std::to_string(events.height()) + ", behavior image " +
                    std::to_string(b.values.width()) + "x" +
                    std::to_string(b.values.height()));
  AnomalyMap out;
  out.t = events.t;
  out.mask = Image<std::uint8_t>(events.width(), events.height());
  out.mask.t = events.t;
  out.scores = Image<float>(events.width(), events.height());
  out.scores.t = events.t;
  for (std::size_t i = 0; i < events.size(); ++i) {
    // widen before subtracting so the strict comparison is not perturbed
    // by rounding the margin itself
    const double margin = double(events[i]) - double(b.values[i]);
    out.scores[i] = float(margin);
    out.mask[i] = margin > theta ? 1 : 0;
  }
  return out;
}

struct ComponentBox {
  int x = 0, y = 0, width = 0, height = 0;
  std::int64_t area = 0;
};

struct DetectionSummary {
  std::int64_t anomalous_pixels = 0;
  std::vector<ComponentBox> boxes;  // one per connected anomalous region
};

inline DetectionSummary summarize(const AnomalyMap& map,
                                  Connectivity conn = Connectivity::eight) {
  const ComponentMap comps = label_components(map.mask, conn);
  DetectionSummary summary;
  summary.boxes.resize(comps.count);
  std::vector<int> min_x(comps.count, map.mask.width());
  std::vector<int> min_y(comps.count, map.mask.height());
  std::vector<int> max_x(comps.count, -1), max_y(comps.count, -1);
  for (int y = 0; y < map.mask.height(); ++y)
    for (int x = 0; x < map.mask.width(); ++x) {
      const std::uint32_t id = comps.ids(x, y);
      if (!id) continue;
      ++summary.anomalous_pixels;
      auto& box = summary.boxes[id - 1];
      ++box.area;
      if (x < min_x[id - 1]) min_x[id - 1] = x;
      if (y < min_y[id - 1]) min_y[id - 1] = y;
      if (x > max_x[id - 1]) max_x[id - 1] = x;
      if (y > max_y[id - 1]) max_y[id - 1] = y;
    }
  for (std::uint32_t c = 0; c < comps.count; ++c) {
    summary.boxes[c].x = min_x[c];
    summary.boxes[c].y = min_y[c];
    summary.boxes[c].width = max_x[c] - min_x[c] + 1;
    summary.boxes[c].height = max_y[c] - min_y[c] + 1;
  }
  return summary;
}

}  // namespace bsub

#endif  // BSUB_DETECT_HPP
