#ifndef BSUB_MARKOV_HPP
#define BSUB_MARKOV_HPP

#include <cmath>
#include <cstdint>
#include <limits>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "bsub/image.hpp"
#include "bsub/text.hpp"

namespace bsub {

// Two-state chain over per-pixel label sequences: pi is the probability of
// starting busy, q the busy self-transition, p the idle self-transition.
struct ChainParams {
  double pi = 0.5;
  double q = 0.5;
  double p = 0.5;
};

inline void validate_chain(const ChainParams& c) {
  auto in01 = [](double v) { return v >= 0.0 && v <= 1.0; };
  if (!in01(c.pi) || !in01(c.q) || !in01(c.p))
    throw ConfigError("chain parameters must lie in [0, 1]");
}

// Alternating run lengths, first run in the initial state.
// busy_to_idle and idle_to_busy are the boundary counts (m and n).
struct RunLengthEncoding {
  bool starts_busy = false;
  std::vector<std::uint32_t> runs;
  std::uint32_t busy_to_idle = 0;
  std::uint32_t idle_to_busy = 0;

  std::size_t length() const {
    std::size_t sum = 0;
    for (auto r : runs) sum += r;
    return sum;
  }
};

inline RunLengthEncoding encode_runs(std::span<const std::uint8_t> labels) {
  if (labels.empty()) throw ConfigError("empty label sequence");
  RunLengthEncoding rle;
  rle.starts_busy = labels[0] != 0;
  std::uint32_t run = 1;
  bool state = rle.starts_busy;
  for (std::size_t k = 1; k < labels.size(); ++k) {
    const bool busy = labels[k] != 0;
    if (busy == state) {
      ++run;
      continue;
    }
    rle.runs.push_back(run);
    if (state) ++rle.busy_to_idle; else ++rle.idle_to_busy;
    state = busy;
    run = 1;
  }
  rle.runs.push_back(run);
  return rle;
}

// Negative log probability of the label sequence under the chain, in the log
// domain throughout. A run of length r in a state costs r-1 factors of that
// state's self-transition; each boundary costs one (1 - self) factor; the
// first state costs pi or 1-pi. Factors with zero probability and a positive
// count make the result +infinity.
inline double sequence_neg_log_prob(const RunLengthEncoding& rle,
                                    const ChainParams& chain) {
  validate_chain(chain);
  if (rle.runs.empty()) throw ConfigError("empty run-length encoding");

  std::uint64_t stay_busy = 0, stay_idle = 0;
  bool state = rle.starts_busy;
  for (auto r : rle.runs) {
    if (r == 0) throw ConfigError("zero-length run");
    if (state) stay_busy += r - 1; else stay_idle += r - 1;
    state = !state;
  }

  const double pi0 = rle.starts_busy ? chain.pi : 1.0 - chain.pi;
  double nll = 0.0;
  auto add = [&nll](double prob, double count) {
    if (count == 0.0) return;
    if (prob == 0.0) {
      nll = std::numeric_limits<double>::infinity();
      return;
    }
    nll -= count * std::log(prob);
  };
  add(pi0, 1.0);
  add(chain.q, double(stay_busy));
  add(1.0 - chain.q, double(rle.busy_to_idle));
  add(chain.p, double(stay_idle));
  add(1.0 - chain.p, double(rle.idle_to_busy));
  return nll;
}

// Joint negative log likelihood of labels and descriptor samples.
// value = sequence term + A3 * sum of f*l. The normalizer of the busy-state
// descriptor density (1/Z1) e^{-A3 f} on [0,1] contributes busy_count*log(Z1),
// reported separately so callers may drop it as a constant.
struct JointNegLog {
  double value = 0.0;
  double z1_constant = 0.0;
  bool idle_violation = false;  // some f > 0 where l = 0

  double total() const { return value + z1_constant; }
};

inline JointNegLog joint_neg_log_likelihood(std::span<const std::uint8_t> labels,
                                            std::span<const double> f,
                                            const ChainParams& chain,
                                            double a3) {
  if (labels.size() != f.size())
    throw ConfigError("label and descriptor sequences differ in length");
  if (!std::isfinite(a3)) throw ConfigError("A3 must be finite");

  JointNegLog out;
  double fl_sum = 0.0;
  std::uint64_t busy = 0;
  for (std::size_t k = 0; k < labels.size(); ++k) {
    if (labels[k]) {
      ++busy;
      fl_sum += f[k];
    } else if (f[k] != 0.0) {
      out.idle_violation = true;
    }
  }
  out.value = sequence_neg_log_prob(encode_runs(labels), chain) + a3 * fl_sum;
  if (out.idle_violation)
    out.value = std::numeric_limits<double>::infinity();
  const double log_z1 = a3 == 0.0 ? 0.0 : std::log(-std::expm1(-a3) / a3);
  out.z1_constant = double(busy) * log_z1;
  return out;
}

// Maximum-likelihood fit with Laplace +1 smoothing over pooled transition
// counts; pi comes from the fraction of sequences that start busy.
inline ChainParams fit_chain(std::span<const std::vector<std::uint8_t>> sequences) {
  if (sequences.empty()) throw ConfigError("no label sequences to fit");
  std::uint64_t starts_busy = 0, starts = 0;
  std::uint64_t n11 = 0, n10 = 0, n00 = 0, n01 = 0;
  for (const auto& seq : sequences) {
    if (seq.empty()) throw ConfigError("empty label sequence in fit");
    ++starts;
    if (seq[0]) ++starts_busy;
    for (std::size_t k = 1; k < seq.size(); ++k) {
      const bool prev = seq[k - 1] != 0;
      const bool cur = seq[k] != 0;
      if (prev) (cur ? n11 : n10)++;
      else (cur ? n01 : n00)++;
    }
  }
  if (n11 + n10 + n00 + n01 == 0)
    throw ConfigError("need at least two consecutive labels to fit a chain");
  ChainParams c;
  c.pi = double(starts_busy + 1) / double(starts + 2);
  c.q = double(n11 + 1) / double(n11 + n10 + 2);
  c.p = double(n00 + 1) / double(n00 + n01 + 2);
  return c;
}

inline ChainParams fit_chain(const std::vector<std::uint8_t>& sequence) {
  return fit_chain(std::span<const std::vector<std::uint8_t>>(&sequence, 1));
}

// Fraction of samples at or above eta: the complementary empirical CDF.
inline double empirical_cdf(std::span<const double> samples, double eta) {
  if (samples.empty()) throw ConfigError("empty sample set");
  std::size_t at_or_above = 0;
  for (double v : samples)
    if (v >= eta) ++at_or_above;
  return double(at_or_above) / double(samples.size());
}

// Fixed-range histogram of event samples; out-of-range values fall into the
// edge bins so totals always match the sample count.
class EventHistogram {
 public:
  EventHistogram(double lo, double hi, int bins) : lo_(lo), hi_(hi) {
    if (bins < 1) throw ConfigError("histogram needs at least one bin");
    if (!(hi > lo)) throw ConfigError("histogram range must be nonempty");
    counts_.assign(std::size_t(bins), 0);
  }

  void add(double v) {
    const int bins = int(counts_.size());
    int idx = int((v - lo_) / (hi_ - lo_) * bins);
    if (idx < 0) idx = 0;
    if (idx >= bins) idx = bins - 1;
    ++counts_[std::size_t(idx)];
    ++total_;
  }

  void add(std::span<const double> samples) {
    for (double v : samples) add(v);
  }

  int bins() const { return int(counts_.size()); }
  std::uint64_t total() const { return total_; }
  std::uint64_t count(int bin) const { return counts_.at(std::size_t(bin)); }
  double fraction(int bin) const {
    if (total_ == 0) throw ConfigError("empty sample set");
    return double(counts_.at(std::size_t(bin))) / double(total_);
  }
  double bin_lo(int bin) const {
    return lo_ + (hi_ - lo_) * bin / double(counts_.size());
  }
  double bin_hi(int bin) const {
    return lo_ + (hi_ - lo_) * (bin + 1) / double(counts_.size());
  }

  void write_csv(std::ostream& out) const {
    out << "bin_lo,bin_hi,count\n";
    for (int b = 0; b < bins(); ++b)
      out << detail::format_double(bin_lo(b)) << ','
          << detail::format_double(bin_hi(b)) << ',' << counts_[std::size_t(b)]
          << '\n';
  }

 private:
  double lo_, hi_;
  std::vector<std::uint64_t> counts_;
  std::uint64_t total_ = 0;
};

}  // namespace bsub

#endif  // BSUB_MARKOV_HPP
