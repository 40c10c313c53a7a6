#include <catch2/catch_amalgamated.hpp>

#include <cstdint>
#include <vector>

#include "bsub/detect.hpp"
#include "support.hpp"

using namespace bsub;

namespace {
BehaviorImage flat_behavior(int w, int h, float level) {
  BehaviorImage b;
  b.values = Image<float>(w, h, level);
  return b;
}
}  // namespace

TEST_CASE("subtraction flags strictly above the margin") {
  EventField e(3, 1);
  e[0] = 0.50f;  // equals B + theta exactly
  e[1] = 0.51f;  // past it
  e[2] = 0.20f;  // below
  e.t = 42;
  BehaviorImage b = flat_behavior(3, 1, 0.2f);

  AnomalyMap map = subtract(e, b, 0.3);
  REQUIRE(map.t == 42);
  REQUIRE(map.mask.t == 42);
  REQUIRE(map.mask[0] == 0);
  REQUIRE(map.mask[1] == 1);
  REQUIRE(map.mask[2] == 0);
  REQUIRE(map.scores[0] == 0.50f - 0.2f);
  REQUIRE(map.scores[1] == 0.51f - 0.2f);
  REQUIRE(map.scores[2] == 0.0f);
}

TEST_CASE("zero margin still requires strict excess") {
  EventField e(2, 1);
  e[0] = 0.4f;
  e[1] = 0.4000001f;
  BehaviorImage b = flat_behavior(2, 1, 0.4f);
  AnomalyMap map = subtract(e, b, 0.0);
  REQUIRE(map.mask[0] == 0);  // e == B is not anomalous
  REQUIRE(map.mask[1] == 1);
}

TEST_CASE("negative margin flags activity at the learned level") {
  EventField e(1, 1, 0.4f);
  BehaviorImage b = flat_behavior(1, 1, 0.4f);
  REQUIRE(subtract(e, b, -0.01).mask[0] == 1);
}

TEST_CASE("subtraction checks geometry") {
  EventField e(4, 3, 0.0f);
  BehaviorImage b = flat_behavior(3, 4, 0.0f);
  REQUIRE_THROWS_AS(subtract(e, b, 0.5), DataError);
}

TEST_CASE("summary boxes two separated regions") {
  AnomalyMap map;
  map.mask = Image<std::uint8_t>(8, 6, 0);
  map.scores = Image<float>(8, 6, 0.0f);
  // 2x2 block at (1,1) and a 3x1 line at (5,4)
  map.mask(1, 1) = map.mask(2, 1) = map.mask(1, 2) = map.mask(2, 2) = 1;
  map.mask(5, 4) = map.mask(6, 4) = map.mask(7, 4) = 1;

  DetectionSummary s = summarize(map);
  REQUIRE(s.anomalous_pixels == 7);
  REQUIRE(s.boxes.size() == 2);
  REQUIRE(s.boxes[0].x == 1);
  REQUIRE(s.boxes[0].y == 1);
  REQUIRE(s.boxes[0].width == 2);
  REQUIRE(s.boxes[0].height == 2);
  REQUIRE(s.boxes[0].area == 4);
  REQUIRE(s.boxes[1].x == 5);
  REQUIRE(s.boxes[1].y == 4);
  REQUIRE(s.boxes[1].width == 3);
  REQUIRE(s.boxes[1].height == 1);
  REQUIRE(s.boxes[1].area == 3);
}

TEST_CASE("summary respects connectivity at diagonal contact") {
  AnomalyMap map;
  map.mask = Image<std::uint8_t>(4, 4, 0);
  map.scores = Image<float>(4, 4, 0.0f);
  map.mask(0, 0) = map.mask(1, 1) = 1;
  REQUIRE(summarize(map, Connectivity::eight).boxes.size() == 1);
  REQUIRE(summarize(map, Connectivity::four).boxes.size() == 2);
}

TEST_CASE("empty mask summarizes to nothing") {
  AnomalyMap map;
  map.mask = Image<std::uint8_t>(5, 5, 0);
  map.scores = Image<float>(5, 5, 0.0f);
  DetectionSummary s = summarize(map);
  REQUIRE(s.anomalous_pixels == 0);
  REQUIRE(s.boxes.empty());
}

TEST_CASE("summary boxes agree with a direct scan on random masks") {
  std::mt19937_64 rng(61);
  for (int trial = 0; trial < 12; ++trial) {
    AnomalyMap map;
    map.mask = testutil::random_labels(rng, 30, 22, 0.35);
    map.scores = Image<float>(30, 22, 0.0f);
    const auto conn =
        trial % 2 ? Connectivity::four : Connectivity::eight;
    DetectionSummary s = summarize(map, conn);

    // oracle: flood fill, then per-id extents; discovery order matches the
    // production raster ordering, so boxes align index for index
    testutil::FloodFill ff = testutil::flood_fill(map.mask, conn);
    REQUIRE(s.boxes.size() == ff.count);
    std::int64_t ones = 0;
    for (auto v : map.mask) ones += v ? 1 : 0;
    REQUIRE(s.anomalous_pixels == ones);

    std::vector<ComponentBox> want(ff.count);
    std::vector<bool> seen(ff.count, false);
    for (int y = 0; y < 22; ++y)
      for (int x = 0; x < 30; ++x) {
        const std::uint32_t id = ff.ids(x, y);
        if (!id) continue;
        ComponentBox& box = want[id - 1];
        if (!seen[id - 1]) {
          box = ComponentBox{x, y, 1, 1, 0};
          seen[id - 1] = true;
        }
        if (x < box.x) { box.width += box.x - x; box.x = x; }
        if (x >= box.x + box.width) box.width = x - box.x + 1;
        if (y >= box.y + box.height) box.height = y - box.y + 1;
        ++box.area;
      }
    for (std::size_t k = 0; k < want.size(); ++k) {
      REQUIRE(s.boxes[k].x == want[k].x);
      REQUIRE(s.boxes[k].y == want[k].y);
      REQUIRE(s.boxes[k].width == want[k].width);
      REQUIRE(s.boxes[k].height == want[k].height);
      REQUIRE(s.boxes[k].area == want[k].area);
    }
  }
}
