#include "rwrs/walk_engine.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "rwrs/parallel.hpp"

namespace rwrs {

namespace {

constexpr std::int64_t kMaxRadius = std::int64_t{1} << 28;

ByteStepTable build_byte_table() {
  ByteStepTable t{};
  for (int b = 0; b < 256; ++b) {
    int pos = 0;
    for (int i = 0; i < 8; ++i) {
      t.offsets[b][i] = static_cast<std::int8_t>(pos);
      pos += ((b >> i) & 1) ? 1 : -1;
    }
    t.delta[b] = static_cast<std::int8_t>(pos);
  }
  return t;
}

}  // namespace

CongruenceAudit& congruence_audit() noexcept {
  static CongruenceAudit audit;
  return audit;
}

const ByteStepTable& byte_step_table() noexcept {
  static const ByteStepTable table = build_byte_table();
  return table;
}

std::int64_t WalkLocalTimeProfile::count_at(std::int64_t site) const noexcept {
  const std::int64_t i = site - min_site;
  if (i < 0 || i >= static_cast<std::int64_t>(counts.size())) return 0;
  return counts[static_cast<std::size_t>(i)];
}

std::int64_t WalkLocalTimeProfile::total() const noexcept {
  std::int64_t s = 0;
  for (auto c : counts) s += c;
  return s;
}

std::int64_t RwrsLocalTimeTable::at(std::int64_t level) const noexcept {
  const auto it = counts.find(level);
  return it == counts.end() ? 0 : it->second;
}

void check_walk_bounds(const ModelConfig& model, std::int64_t n) {
  if (n < 0) fail(ErrorCode::InvalidArgument, "number of steps must be non-negative");
  const std::int64_t xi_max = std::max<std::int64_t>(model.scenery.max_abs(), 1);
  if (n > (std::int64_t{1} << 62) / xi_max) fail(ErrorCode::Overflow, "n * max|xi| exceeds 2^62");
  const std::int64_t step_max = std::max<std::int64_t>(model.step.max_abs(), 1);
  if (n > kMaxRadius / step_max) fail(ErrorCode::InvalidArgument, "walk range too large for the dense workspace");
}

void WalkWorkspace::prepare(const ModelConfig& model, std::int64_t max_steps) {
  check_walk_bounds(model, max_steps);
  const std::int64_t radius = max_steps * std::max<std::int64_t>(model.step.max_abs(), 1) + 8;
  if (offset_ >= radius) return;
  offset_ = radius;
  const auto size = static_cast<std::size_t>(2 * radius + 1);
  counts_.assign(size, 0);
  xi_.assign(size, 0);
  stamp_.assign(size, 0u);
  generation_ = 0;
  lo_ = 0;
  hi_ = -1;
}

std::int64_t WalkWorkspace::accumulate_counts(const ModelConfig& model, std::int64_t n, StepSource& steps) {
  (void)model;
  std::int64_t pos = 0;
  std::int64_t lo = 0, hi = 0;
  std::int64_t k = 0;
  std::int64_t* base = counts_.data() + offset_;
  if (steps.simple()) {
    const auto& table = byte_step_table();
    for (; k + 8 <= n; k += 8) {
      const unsigned b = steps.next_byte();
      std::int64_t* at = base + pos;
      for (int i = 0; i < 8; ++i) ++at[table.offsets[b][i]];
      // Extremes inside the byte are within pos +- 7.
      lo = std::min(lo, pos - 7);
      hi = std::max(hi, pos + 7);
      pos += table.delta[b];
    }
  }
  for (; k < n; ++k) {
    ++base[pos];
    lo = std::min(lo, pos);
    hi = std::max(hi, pos);
    pos += steps.next();
  }
  lo_ = std::max(lo, -offset_);
  hi_ = std::min(hi, offset_);
  if (n == 0) {
    lo_ = 0;
    hi_ = -1;
  }
  return pos;
}

void WalkWorkspace::clear_counts() noexcept {
  if (hi_ >= lo_) {
    std::fill(counts_.begin() + (lo_ + offset_), counts_.begin() + (hi_ + offset_ + 1), 0);
  }
  lo_ = 0;
  hi_ = -1;
}

std::int64_t WalkWorkspace::endpoint(const SceneryField& scenery) const noexcept {
  std::int64_t z = 0;
  for (std::int64_t y = lo_; y <= hi_; ++y) {
    const std::int64_t c = count(y);
    if (c != 0) z += c * scenery(y);
  }
  return z;
}

WalkLocalTimeProfile WalkWorkspace::snapshot(std::int64_t n, std::int64_t final_position) const {
  WalkLocalTimeProfile p;
  p.n = n;
  p.final_position = final_position;
  if (hi_ < lo_) return p;
  // Trim the byte-stepping slack to the visited sites.
  std::int64_t a = lo_, b = hi_;
  while (a <= b && count(a) == 0) ++a;
  while (b >= a && count(b) == 0) --b;
  p.min_site = a;
  for (std::int64_t y = a; y <= b; ++y) p.counts.push_back(count(y));
  return p;
}

WalkLocalTimeProfile simulate_walk_profile(const ModelConfig& model, std::int64_t n, const StreamId& stream) {
  WalkWorkspace ws;
  ws.prepare(model, n);
  StepSource steps(model, stream);
  const std::int64_t end = ws.accumulate_counts(model, n, steps);
  return ws.snapshot(n, end);
}

RwrsTrajectory rwrs_trajectory(const ModelConfig& model, std::int64_t n, const StreamId& stream) {
  WalkWorkspace ws;
  ws.prepare(model, n);
  StepSource steps(model, stream);
  SceneryField scenery(model, stream);
  RwrsTrajectory t;
  t.stream = stream;
  t.z.reserve(static_cast<std::size_t>(n) + 1);
  std::uint64_t bad = 0;
  ws.trace(model, n, steps, scenery, [&](std::int64_t k, std::int64_t z) {
    t.z.push_back(z);
    bad += model.congruent(k, z) ? 0 : 1;
  });
  congruence_audit().record(static_cast<std::uint64_t>(n) + 1, bad);
  return t;
}

RwrsLocalTimeTable rwrs_local_time_table(const RwrsTrajectory& trajectory) {
  if (trajectory.z.empty()) fail(ErrorCode::InvalidArgument, "trajectory must contain Z_0");
  RwrsLocalTimeTable table;
  table.n = trajectory.steps();
  for (std::size_t k = 1; k < trajectory.z.size(); ++k) ++table.counts[trajectory.z[k]];
  return table;
}

std::string Statistic::name() const {
  switch (kind) {
    case StatisticKind::LocalTimeAtZero: return "local_time_zero";
    case StatisticKind::LlnSum: return "lln_sum";
    case StatisticKind::CltSum: return "clt_sum";
    case StatisticKind::Endpoint: return "endpoint";
    case StatisticKind::Indicator: return "indicator:" + std::to_string(level);
  }
  return "unknown";
}

Statistic parse_statistic(std::string_view text, Observable f) {
  Statistic s;
  s.f = std::move(f);
  if (text == "local_time_zero") {
    s.kind = StatisticKind::LocalTimeAtZero;
  } else if (text == "lln_sum") {
    s.kind = StatisticKind::LlnSum;
  } else if (text == "clt_sum") {
    s.kind = StatisticKind::CltSum;
  } else if (text == "endpoint") {
    s.kind = StatisticKind::Endpoint;
  } else if (text.starts_with("indicator:")) {
    s.kind = StatisticKind::Indicator;
    const std::string level(text.substr(10));
    try {
      std::size_t used = 0;
      s.level = std::stoll(level, &used);
      if (used != level.size()) throw std::invalid_argument(level);
    } catch (const std::exception&) {
      fail(ErrorCode::UnknownStatistic, "bad indicator level '" + level + "'");
    }
  } else {
    fail(ErrorCode::UnknownStatistic, std::string(text));
  }
  return s;
}

double evaluate_statistic(const ModelConfig& model, std::int64_t n, const Statistic& statistic, const StreamId& id,
                          WalkWorkspace& ws) {
  StepSource steps(model, id);
  SceneryField scenery(model, id);
  const double dn = static_cast<double>(n);
  switch (statistic.kind) {
    case StatisticKind::Endpoint:
    case StatisticKind::Indicator: {
      const std::int64_t end = ws.accumulate_counts(model, n, steps);
      (void)end;
      const std::int64_t z = ws.endpoint(scenery);
      ws.clear_counts();
      congruence_audit().record(1, model.congruent(n, z) ? 0 : 1);
      if (statistic.kind == StatisticKind::Indicator) return z == statistic.level ? 1.0 : 0.0;
      return n == 0 ? 0.0 : static_cast<double>(z) * std::pow(dn, -0.75);
    }
    case StatisticKind::LocalTimeAtZero: {
      std::int64_t hits = 0;
      std::uint64_t bad = 0;
      ws.trace(model, n, steps, scenery, [&](std::int64_t k, std::int64_t z) {
        if (k > 0 && z == 0) ++hits;
        bad += model.congruent(k, z) ? 0 : 1;
      });
      congruence_audit().record(static_cast<std::uint64_t>(n) + 1, bad);
      return n == 0 ? 0.0 : static_cast<double>(hits) * std::pow(dn, -0.25);
    }
    case StatisticKind::LlnSum:
    case StatisticKind::CltSum: {
      // Dense lookup of f over its support window.
      const auto& f = statistic.f;
      const std::int64_t f_lo = f.empty() ? 0 : f.begin()->first;
      const std::int64_t f_hi = f.empty() ? -1 : f.rbegin()->first;
      std::vector<double> dense(static_cast<std::size_t>(std::max<std::int64_t>(f_hi - f_lo + 1, 0)), 0.0);
      for (const auto& [a, v] : f) dense[static_cast<std::size_t>(a - f_lo)] = v;
      double sum = 0.0;
      std::uint64_t bad = 0;
      ws.trace(model, n, steps, scenery, [&](std::int64_t k, std::int64_t z) {
        bad += model.congruent(k, z) ? 0 : 1;
        if (k < n && z >= f_lo && z <= f_hi) sum += dense[static_cast<std::size_t>(z - f_lo)];
      });
      congruence_audit().record(static_cast<std::uint64_t>(n) + 1, bad);
      if (n == 0) return 0.0;
      const double scale = statistic.kind == StatisticKind::LlnSum ? std::pow(dn, -0.25) : std::pow(dn, -0.125);
      return sum * scale;
    }
  }
  return 0.0;
}

BatchReport batch_estimate(const ModelConfig& model, std::int64_t n, std::uint64_t reps, const Statistic& statistic,
                           std::uint64_t seed, const BatchOptions& options) {
  if (reps == 0) fail(ErrorCode::ZeroReps, "batch_estimate needs at least one replicate");
  check_walk_bounds(model, n);
  const std::size_t blocks = block_count(reps);
  const unsigned workers = resolve_workers(options.workers);
  std::vector<WalkWorkspace> spaces(workers);
  std::vector<PowerSums> block_sums(blocks);
  BatchReport report;
  if (options.keep_samples) report.samples.assign(reps, 0.0);
  const StreamId base{seed, options.experiment, 0};
  for_each_block(blocks, workers, [&](std::size_t b, unsigned w) {
    WalkWorkspace& ws = spaces[w];
    ws.prepare(model, n);
    PowerSums local;
    const std::uint64_t first = b * kReplicateBlock;
    const std::uint64_t last = std::min<std::uint64_t>(reps, first + kReplicateBlock);
    for (std::uint64_t r = first; r < last; ++r) {
      const double y = evaluate_statistic(model, n, statistic, base.with_replicate(r), ws);
      local.add(y);
      if (options.keep_samples) report.samples[r] = y;
    }
    block_sums[b] = local;
  });
  report.statistic = statistic.name();
  report.n = n;
  report.reps = reps;
  report.seed = seed;
  report.sums = reduce_pairwise(block_sums);
  report.estimate = moment_estimate(report.sums, 1);
  return report;
}

std::string batch_csv_header() { return "statistic,n,reps,estimate,stderr,seed"; }

std::string batch_csv_row(const BatchReport& r) {
  char buf[128];
  std::snprintf(buf, sizeof buf, ",%.17g,%.17g,", r.estimate.mean, r.estimate.std_error);
  std::ostringstream os;
  os << r.statistic << ',' << r.n << ',' << r.reps << buf << r.seed;
  return os.str();
}

void write_raw_samples(const std::string& path, const std::vector<double>& samples) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorCode::IoFailure, "cannot open " + path);
  for (double v : samples) {
    auto bits = std::bit_cast<std::uint64_t>(v);
    unsigned char bytes[8];
    for (int i = 0; i < 8; ++i) bytes[i] = static_cast<unsigned char>(bits >> (8 * i));
    out.write(reinterpret_cast<const char*>(bytes), 8);
  }
  if (!out) fail(ErrorCode::IoFailure, "write failed for " + path);
}

}  // namespace rwrs
