#pragma once

#include <atomic>
#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "rwrs/error.hpp"
#include "rwrs/lattice_model.hpp"
#include "rwrs/rng.hpp"
#include "rwrs/stats.hpp"

namespace rwrs {

/// Visit counts N_n(y) of S_0..S_{n-1}, stored densely from min_site.
struct WalkLocalTimeProfile {
  std::int64_t n = 0;
  std::int64_t final_position = 0;  // S_n
  std::int64_t min_site = 0;
  std::vector<std::int64_t> counts;

  std::int64_t count_at(std::int64_t site) const noexcept;
  std::int64_t total() const noexcept;
};

/// Z_0..Z_n with Z_0 = 0.
struct RwrsTrajectory {
  std::vector<std::int64_t> z;
  StreamId stream;

  std::int64_t steps() const noexcept { return static_cast<std::int64_t>(z.size()) - 1; }
};

/// Level counts of Z_1..Z_n. Z_0 is not counted.
struct RwrsLocalTimeTable {
  std::int64_t n = 0;
  std::map<std::int64_t, std::int64_t> counts;

  std::int64_t at(std::int64_t level) const noexcept;
};

/// Process-wide tally of lattice-congruence checks on sampled Z values.
struct CongruenceAudit {
  std::atomic<std::uint64_t> checked{0};
  std::atomic<std::uint64_t> violations{0};

  void record(std::uint64_t n_checked, std::uint64_t n_violations) noexcept {
    checked += n_checked;
    violations += n_violations;
  }
};

CongruenceAudit& congruence_audit() noexcept;

/// Step source: one bit per step for the simple walk, one word otherwise.
class StepSource {
 public:
  StepSource(const ModelConfig& model, const StreamId& id)
      : rng_(id, Purpose::Steps), pmf_(&model.step), simple_(model.simple_step()) {}

  std::int64_t next() noexcept {
    if (!simple_) return pmf_->sample(rng_());
    if (bits_left_ == 0) {
      bits_ = rng_();
      bits_left_ = 64;
    }
    const std::int64_t step = (bits_ & 1u) ? 1 : -1;
    bits_ >>= 1;
    --bits_left_;
    return step;
  }

  bool simple() const noexcept { return simple_; }

  /// Eight simple-walk steps at once; returns the low byte of the bit stream.
  /// Only valid when simple().
  unsigned next_byte() noexcept {
    if (bits_left_ < 8) {
      // Top up from a fresh word while keeping the pending bits in front.
      const std::uint64_t fresh = rng_();
      const int keep = bits_left_;
      const unsigned byte =
          static_cast<unsigned>((bits_ & ((1ull << keep) - 1)) | ((fresh << keep) & 0xFFu));
      bits_ = fresh >> (8 - keep);
      bits_left_ = 64 - (8 - keep);
      return byte;
    }
    const unsigned byte = static_cast<unsigned>(bits_ & 0xFFu);
    bits_ >>= 8;
    bits_left_ -= 8;
    return byte;
  }

 private:
  CounterRng rng_;
  const LatticePmf* pmf_;
  bool simple_;
  std::uint64_t bits_ = 0;
  int bits_left_ = 0;
};

/// Random-access scenery: xi_y is a pure function of (stream, y), so it is
/// drawn once per site and identical on every revisit.
class SceneryField {
 public:
  SceneryField(const ModelConfig& model, const StreamId& id) : rng_(id, Purpose::Scenery), pmf_(&model.scenery) {}

  std::int64_t operator()(std::int64_t site) const noexcept {
    const auto zigzag = static_cast<std::uint64_t>((site << 1) ^ (site >> 63));
    return pmf_->sample(rng_.at(zigzag));
  }

 private:
  CounterRng rng_;
  const LatticePmf* pmf_;
};

/// Table for advancing the simple walk eight steps per byte of bits.
struct ByteStepTable {
  std::int8_t offsets[256][8];  // S_i - S_0 for i = 0..7
  std::int8_t delta[256];       // S_8 - S_0
};
const ByteStepTable& byte_step_table() noexcept;

/// Per-worker scratch: dense visit counts and a scenery cache, both indexed
/// by site + offset, sized for walks of up to max_steps steps.
class WalkWorkspace {
 public:
  WalkWorkspace() = default;

  void prepare(const ModelConfig& model, std::int64_t max_steps);

  /// Counts S_0..S_{n-1} into the workspace; returns S_n.
  std::int64_t accumulate_counts(const ModelConfig& model, std::int64_t n, StepSource& steps);

  /// Zeroes the visited range.
  void clear_counts() noexcept;

  std::int64_t count(std::int64_t site) const noexcept { return counts_[static_cast<std::size_t>(site + offset_)]; }
  std::int64_t lo() const noexcept { return lo_; }
  std::int64_t hi() const noexcept { return hi_; }

  /// Z_n = sum_y xi_y N_n(y) over the counted profile.
  std::int64_t endpoint(const SceneryField& scenery) const noexcept;

  WalkLocalTimeProfile snapshot(std::int64_t n, std::int64_t final_position) const;

  /// Calls visit(k, Z_k) for k = 0..n. Scenery values are cached per
  /// replicate; the step stream is consumed exactly as accumulate_counts does.
  template <class Visit>
  void trace(const ModelConfig& model, std::int64_t n, StepSource& steps, const SceneryField& scenery,
             Visit&& visit) {
    ++generation_;
    if (generation_ == 0) {
      std::fill(stamp_.begin(), stamp_.end(), 0u);
      generation_ = 1;
    }
    std::int64_t pos = 0;
    std::int64_t z = 0;
    visit(std::int64_t{0}, z);
    for (std::int64_t k = 0; k < n; ++k) {
      const auto idx = static_cast<std::size_t>(pos + offset_);
      if (stamp_[idx] != generation_) {
        stamp_[idx] = generation_;
        xi_[idx] = scenery(pos);
      }
      z += xi_[idx];
      pos += steps.next();
      visit(k + 1, z);
    }
    (void)model;
  }

 private:
  std::int64_t offset_ = 0;
  std::int64_t lo_ = 0;
  std::int64_t hi_ = -1;
  std::vector<std::int64_t> counts_;
  std::vector<std::int64_t> xi_;
  std::vector<std::uint32_t> stamp_;
  std::uint32_t generation_ = 0;
};

/// Throws Overflow when |Z_n| <= n max|xi| could exceed 62 bits.
void check_walk_bounds(const ModelConfig& model, std::int64_t n);

WalkLocalTimeProfile simulate_walk_profile(const ModelConfig& model, std::int64_t n, const StreamId& stream);
RwrsTrajectory rwrs_trajectory(const ModelConfig& model, std::int64_t n, const StreamId& stream);
RwrsLocalTimeTable rwrs_local_time_table(const RwrsTrajectory& trajectory);

enum class StatisticKind {
  LocalTimeAtZero,  // n^{-1/4} N_n(0), levels over k = 1..n
  LlnSum,           // n^{-1/4} sum_{k<n} f(Z_k)
  CltSum,           // n^{-1/8} sum_{k<n} f(Z_k)
  Endpoint,         // n^{-3/4} Z_n
  Indicator,        // 1{Z_n = level}
};

struct Statistic {
  StatisticKind kind = StatisticKind::Endpoint;
  Observable f;
  std::int64_t level = 0;

  std::string name() const;
};

/// Parses "local_time_zero", "lln_sum", "clt_sum", "endpoint" or
/// "indicator:<a>". Observable-based statistics take f separately.
Statistic parse_statistic(std::string_view text, Observable f = {});

struct BatchOptions {
  unsigned workers = 0;
  bool keep_samples = false;
  std::uint64_t experiment = experiment_id("batch");
};

struct BatchReport {
  std::string statistic;
  std::int64_t n = 0;
  std::uint64_t reps = 0;
  std::uint64_t seed = 0;
  PowerSums sums;
  Estimate estimate;  // first moment
  std::vector<double> samples;
};

/// Monte Carlo over independent replicates; replicate r always uses stream
/// (seed, experiment, r), so the report is independent of the worker count.
BatchReport batch_estimate(const ModelConfig& model, std::int64_t n, std::uint64_t reps, const Statistic& statistic,
                           std::uint64_t seed, const BatchOptions& options = {});

/// Evaluates one replicate of a statistic with the given workspace.
double evaluate_statistic(const ModelConfig& model, std::int64_t n, const Statistic& statistic, const StreamId& id,
                          WalkWorkspace& workspace);

/// One CSV row: statistic,n,reps,estimate,stderr,seed.
std::string batch_csv_header();
std::string batch_csv_row(const BatchReport& report);

/// Little-endian IEEE-754 doubles, one per replicate.
void write_raw_samples(const std::string& path, const std::vector<double>& samples);

}  // namespace rwrs
