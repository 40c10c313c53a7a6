#ifndef BSUB_TESTS_SUPPORT_HPP
#define BSUB_TESTS_SUPPORT_HPP

// Independent reference implementations (oracles) and small fixtures.
// Everything here favors obviousness over speed: flood fill instead of
// union-find, per-pixel window scans, whole-buffer recomputation.

#include <unistd.h>

#include <cmath>
#include <cstdint>
#include <deque>
#include <filesystem>
#include <queue>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "bsub/bsub.hpp"

namespace testutil {

// ------------------------------------------------------------
// randomness helpers (raw engine draws, no distribution objects)
// ------------------------------------------------------------

inline double unit(std::mt19937_64& rng) {
  return double(rng() >> 11) * 0x1.0p-53;
}

inline bool chance(std::mt19937_64& rng, double p) { return unit(rng) < p; }

inline int uniform_int(std::mt19937_64& rng, int lo, int hi) {
  return lo + int(rng() % std::uint64_t(hi - lo + 1));
}

inline bsub::LabelField random_labels(std::mt19937_64& rng, int w, int h,
                                      double density) {
  bsub::LabelField out(w, h);
  for (auto& v : out) v = chance(rng, density) ? 1 : 0;
  return out;
}

// ------------------------------------------------------------
// connected components oracle: BFS flood fill
// ------------------------------------------------------------

struct FloodFill {
  bsub::Image<std::uint32_t> ids;
  std::uint32_t count = 0;
};

inline FloodFill flood_fill(const bsub::LabelField& labels,
                            bsub::Connectivity conn) {
  const int w = labels.width(), h = labels.height();
  FloodFill out;
  out.ids = bsub::Image<std::uint32_t>(w, h, 0);
  for (int sy = 0; sy < h; ++sy)
    for (int sx = 0; sx < w; ++sx) {
      if (!labels(sx, sy) || out.ids(sx, sy)) continue;
      const std::uint32_t id = ++out.count;
      std::queue<std::pair<int, int>> frontier;
      out.ids(sx, sy) = id;
      frontier.emplace(sx, sy);
      while (!frontier.empty()) {
        const auto [x, y] = frontier.front();
        frontier.pop();
        for (int dy = -1; dy <= 1; ++dy)
          for (int dx = -1; dx <= 1; ++dx) {
            if (dx == 0 && dy == 0) continue;
            if (conn == bsub::Connectivity::four && dx != 0 && dy != 0) continue;
            const int nx = x + dx, ny = y + dy;
            if (nx < 0 || nx >= w || ny < 0 || ny >= h) continue;
            if (!labels(nx, ny) || out.ids(nx, ny)) continue;
            out.ids(nx, ny) = id;
            frontier.emplace(nx, ny);
          }
      }
    }
  return out;
}

// True when the two id images induce the same partition of nonzero pixels.
inline bool same_partition(const bsub::Image<std::uint32_t>& a,
                           const bsub::Image<std::uint32_t>& b) {
  if (!a.same_geometry(b)) return false;
  std::vector<std::uint32_t> a_to_b, b_to_a;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if ((a[i] == 0) != (b[i] == 0)) return false;
    if (a[i] == 0) continue;
    if (a[i] >= a_to_b.size()) a_to_b.resize(a[i] + 1, 0);
    if (b[i] >= b_to_a.size()) b_to_a.resize(b[i] + 1, 0);
    if (a_to_b[a[i]] == 0) a_to_b[a[i]] = b[i];
    if (b_to_a[b[i]] == 0) b_to_a[b[i]] = a[i];
    if (a_to_b[a[i]] != b[i] || b_to_a[b[i]] != a[i]) return false;
  }
  return true;
}

// ------------------------------------------------------------
// descriptor oracle: per-pixel window scan
// ------------------------------------------------------------

inline std::uint32_t window_hits(const bsub::LabelField& labels,
                                 const bsub::ComponentMap& comps, int window,
                                 int x, int y) {
  if (!labels(x, y)) return 0;
  const int r = window / 2;
  const std::uint32_t id = comps.ids(x, y);
  std::uint32_t hits = 0;
  for (int dy = -r; dy <= r; ++dy)
    for (int dx = -r; dx <= r; ++dx) {
      const int nx = x + dx, ny = y + dy;
      if (nx < 0 || nx >= labels.width() || ny < 0 || ny >= labels.height())
        continue;
      if (comps.ids(nx, ny) == id) ++hits;
    }
  return hits;
}

// ------------------------------------------------------------
// event statistic oracle: keep the window, recompute from scratch
// ------------------------------------------------------------

class EventOracle {
 public:
  explicit EventOracle(int w) : w_(w) {}

  void push(const bsub::LabelField& labels, const bsub::DescriptorField& desc) {
    window_.emplace_back(labels, desc);
    if (int(window_.size()) > w_) window_.pop_front();
  }

  std::uint32_t label_sum(std::size_t i) const {
    std::uint32_t sum = 0;
    for (const auto& [labels, desc] : window_) sum += labels[i] ? 1 : 0;
    return sum;
  }

  std::uint64_t hit_sum(std::size_t i) const {
    std::uint64_t sum = 0;
    for (const auto& [labels, desc] : window_) sum += desc.hits(i);
    return sum;
  }

  std::uint32_t flips(std::size_t i) const {
    std::uint32_t count = 0;
    for (std::size_t k = 1; k < window_.size(); ++k)
      count += (window_[k - 1].first[i] != 0) != (window_[k].first[i] != 0);
    return count;
  }

  std::size_t held() const { return window_.size(); }

 private:
  int w_;
  std::deque<std::pair<bsub::LabelField, bsub::DescriptorField>> window_;
};

// ------------------------------------------------------------
// Markov chain oracles
// ------------------------------------------------------------

// Step-by-step chain product: start probability, then one transition factor
// per consecutive pair. Returns the negative log.
inline double stepwise_chain_nll(const std::vector<std::uint8_t>& labels,
                                 const bsub::ChainParams& c) {
  long double log_p =
      std::log((long double)(labels[0] ? c.pi : 1.0 - c.pi));
  for (std::size_t k = 1; k < labels.size(); ++k) {
    const bool prev = labels[k - 1] != 0, cur = labels[k] != 0;
    const long double prob = prev ? (cur ? c.q : 1.0 - c.q)
                                  : (cur ? 1.0 - c.p : c.p);
    log_p += std::log(prob);
  }
  return double(-log_p);
}

inline std::vector<std::uint8_t> simulate_chain(std::mt19937_64& rng,
                                                const bsub::ChainParams& c,
                                                std::size_t length) {
  std::vector<std::uint8_t> out(length);
  bool busy = chance(rng, c.pi);
  out[0] = busy ? 1 : 0;
  for (std::size_t k = 1; k < length; ++k) {
    busy = busy ? chance(rng, c.q) : !chance(rng, c.p);
    out[k] = busy ? 1 : 0;
  }
  return out;
}

// ------------------------------------------------------------
// bitwise CRC32 reference (no table; checks the production table)
// ------------------------------------------------------------

inline std::uint32_t crc32_reference(const std::uint8_t* data,
                                     std::size_t size) {
  std::uint32_t crc = 0xFFFFFFFFu;
  for (std::size_t i = 0; i < size; ++i) {
    crc ^= data[i];
    for (int k = 0; k < 8; ++k)
      crc = (crc & 1) ? 0xEDB88320u ^ (crc >> 1) : crc >> 1;
  }
  return crc ^ 0xFFFFFFFFu;
}

// ------------------------------------------------------------
// filesystem fixture
// ------------------------------------------------------------

class TempDir {
 public:
  TempDir() {
    static int counter = 0;
    path_ = std::filesystem::temp_directory_path() /
            ("bsub_test_" + std::to_string(::getpid()) + "_" +
             std::to_string(counter++));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  const std::filesystem::path& path() const { return path_; }
  std::string file(const std::string& name) const {
    return (path_ / name).string();
  }

 private:
  std::filesystem::path path_;
};

}  // namespace testutil

#endif  // BSUB_TESTS_SUPPORT_HPP
