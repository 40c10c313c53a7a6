#ifndef BSUB_COMPONENTS_HPP
#define BSUB_COMPONENTS_HPP

#include <cstdint>
#include <vector>

#include "bsub/image.hpp"

namespace bsub {

enum class Connectivity : std::uint8_t { four = 4, eight = 8 };

// Component ids per pixel; 0 is background, moving pixels get 1..count.
struct ComponentMap {
  Image<std::uint32_t> ids;
  std::uint32_t count = 0;
};

namespace detail {

// Union-find over provisional labels, path-halving on find.
class LabelMerger {
 public:
  std::uint32_t fresh() {
    parent_.push_back(std::uint32_t(parent_.size()));
    return std::uint32_t(parent_.size() - 1);
  }

  std::uint32_t find(std::uint32_t a) {
    while (parent_[a] != a) {
      parent_[a] = parent_[parent_[a]];
      a = parent_[a];
    }
    return a;
  }

  void merge(std::uint32_t a, std::uint32_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return;
    if (a < b) parent_[b] = a; else parent_[a] = b;
  }

  std::size_t size() const { return parent_.size(); }

 private:
  std::vector<std::uint32_t> parent_;
};

}  // namespace detail

// Two-pass connected component labeling of the moving pixels.
// Ids are assigned in raster order of each component's first pixel.
inline ComponentMap label_components(const LabelField& labels,
                                     Connectivity conn = Connectivity::eight) {
  const int w = labels.width();
  const int h = labels.height();
  ComponentMap map;
  map.ids = Image<std::uint32_t>(w, h, 0);
  map.ids.t = labels.t;

  detail::LabelMerger merger;
  merger.fresh();  // slot 0 reserved for background
  std::vector<std::uint32_t> provisional(labels.size(), 0);

  // first pass: provisional labels from already-visited neighbors
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const std::size_t i = labels.index(x, y);
      if (!labels[i]) continue;
      std::uint32_t neighbor = 0;
      auto take = [&](int nx, int ny) {
        if (nx < 0 || nx >= w || ny < 0) return;
        const std::uint32_t p = provisional[labels.index(nx, ny)];
        if (!p) return;
        if (!neighbor) neighbor = p; else merger.merge(neighbor, p);
      };
      take(x - 1, y);
      take(x, y - 1);
      if (conn == Connectivity::eight) {
        take(x - 1, y - 1);
        take(x + 1, y - 1);
      }
      provisional[i] = neighbor ? neighbor : merger.fresh();
    }
  }

  // second pass: compact roots to consecutive ids in raster order
  std::vector<std::uint32_t> compact(merger.size(), 0);
  std::uint32_t next = 0;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (!provisional[i]) continue;
    const std::uint32_t root = merger.find(provisional[i]);
    if (!compact[root]) compact[root] = ++next;
    map.ids[i] = compact[root];
  }
  map.count = next;
  return map;
}

}  // namespace bsub

#endif  // BSUB_COMPONENTS_HPP
