#include "rwrs/limit_suite.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>
#include <sstream>

#include "rwrs/brownian_lab.hpp"
#include "rwrs/error.hpp"
#include "rwrs/parallel.hpp"
#include "rwrs/walk_engine.hpp"

namespace rwrs {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

void check_n_list(std::span<const std::int64_t> n_list) {
  if (n_list.empty()) fail(ErrorCode::InvalidArgument, "n_list is empty");
  for (auto n : n_list)
    if (n < 1) fail(ErrorCode::InvalidArgument, "every n must be >= 1");
}

std::string moment_name(const char* base, int j) { return std::string(base) + "_m" + std::to_string(j); }

}  // namespace

const ConvergenceRow* ConvergenceTable::find(std::int64_t n, const std::string& statistic) const {
  for (const auto& r : rows)
    if (r.n == n && r.statistic == statistic) return &r;
  return nullptr;
}

std::string convergence_csv(const ConvergenceTable& table) {
  std::ostringstream os;
  os << "n,statistic,value,stderr,reps,target,target_stderr,provenance\n";
  char buf[128];
  for (const auto& r : table.rows) {
    os << r.n << ',' << r.statistic;
    std::snprintf(buf, sizeof buf, ",%.17g,%.17g,", r.value, r.std_error);
    os << buf << r.reps;
    std::snprintf(buf, sizeof buf, ",%.17g,%.17g,", r.target, r.target_std_error);
    os << buf << r.provenance << '\n';
  }
  return os.str();
}

double double_factorial_ratio(int N) {
  double v = 1.0;
  for (int i = 1; i <= N; ++i) v *= 2.0 * i - 1.0;
  return v;
}

ConvergenceTable lln_experiment(const ModelConfig& model, const Observable& f, std::span<const std::int64_t> n_list,
                                std::uint64_t reps, int max_moment, std::uint64_t seed, const LimitTargets& targets,
                                const LimitOptions& options) {
  check_n_list(n_list);
  if (max_moment < 1 || max_moment > 4) fail(ErrorCode::InvalidArgument, "max_moment must be in 1..4");
  ConvergenceTable table{"lln", {}};
  const double mass = observable_sum(f);
  const double sigma = model.sigma_xi();
  Statistic stat;
  stat.kind = StatisticKind::LlnSum;
  stat.f = f;
  for (auto n : n_list) {
    const BatchReport br = batch_estimate(model, n, reps, stat, seed, {options.workers, false, experiment_id("lln")});
    for (int j = 1; j <= max_moment; ++j) {
      const Estimate e = moment_estimate(br.sums, j);
      ConvergenceRow row{n, moment_name("lln", j), e.mean, e.std_error, reps, kNaN, kNaN, "missing", false};
      if (mass == 0.0) {
        row.target = 0.0;
        row.target_std_error = 0.0;
        row.provenance = "limit_suite.centered_observable";
      } else if (static_cast<int>(targets.local_time_moments.size()) >= j) {
        const Estimate& lm = targets.local_time_moments[static_cast<std::size_t>(j - 1)];
        const double scale = std::pow(mass / sigma, j);
        row.target = scale * lm.mean;
        row.target_std_error = std::fabs(scale) * lm.std_error;
        row.provenance = "moment_engine.ks_local_time_moment";
      }
      table.rows.push_back(row);
    }
  }
  return table;
}

ConvergenceTable clt_experiment(const ModelConfig& model, const Observable& f, std::span<const std::int64_t> n_list,
                                std::uint64_t reps, int max_moment, std::uint64_t seed, const LimitTargets& targets,
                                const LimitOptions& options) {
  check_n_list(n_list);
  if (max_moment < 1 || max_moment > 4) fail(ErrorCode::InvalidArgument, "max_moment must be in 1..4");
  const double mass = observable_sum(f);
  if (std::fabs(mass) > 1e-12) fail(ErrorCode::ObservableNotCentered, "clt_experiment needs sum f = 0");
  ConvergenceTable table{"clt", {}};
  const double sigma = model.sigma_xi();
  Statistic stat;
  stat.kind = StatisticKind::CltSum;
  stat.f = f;
  for (auto n : n_list) {
    const BatchReport br = batch_estimate(model, n, reps, stat, seed, {options.workers, false, experiment_id("clt")});
    for (int j = 1; j <= max_moment; ++j) {
      const Estimate e = moment_estimate(br.sums, j);
      ConvergenceRow row{n, moment_name("clt", j), e.mean, e.std_error, reps, kNaN, kNaN, "missing", false};
      if (j % 2 == 1) {
        row.target = 0.0;
        row.target_std_error = 0.0;
        row.provenance = "limit_suite.odd_moment";
      } else {
        const int N = j / 2;
        if (targets.sigma2_f && static_cast<int>(targets.local_time_moments.size()) >= N) {
          const Estimate& lm = targets.local_time_moments[static_cast<std::size_t>(N - 1)];
          const Estimate& s2 = *targets.sigma2_f;
          const double c = double_factorial_ratio(N);
          const double base = s2.mean / sigma;
          row.target = c * std::pow(base, N) * lm.mean;
          // Relative errors in quadrature; sigma2_f enters with power N.
          const double rel_l = lm.mean != 0.0 ? lm.std_error / lm.mean : 0.0;
          const double rel_s = s2.mean != 0.0 ? N * s2.std_error / s2.mean : 0.0;
          row.target_std_error = std::fabs(row.target) * std::hypot(rel_l, rel_s);
          row.provenance = "green_kubo.sigma2_f*moment_engine.ks_local_time_moment";
        }
      }
      table.rows.push_back(row);
    }
  }
  return table;
}

ConvergenceTable local_limit_check(const ModelConfig& model, std::span<const std::int64_t> a_list,
                                   std::span<const std::int64_t> n_list, std::uint64_t reps, std::uint64_t seed,
                                   const LimitTargets& targets, const LimitOptions& options) {
  check_n_list(n_list);
  if (a_list.empty()) fail(ErrorCode::InvalidArgument, "a_list is empty");
  if (reps == 0) fail(ErrorCode::ZeroReps, "local_limit_check needs reps");
  ConvergenceTable table{"local_limit", {}};
  const double d = static_cast<double>(model.periodicity.d);
  const double sigma = model.sigma_xi();
  const StreamId base{seed, experiment_id("local_limit"), 0};
  const unsigned workers = resolve_workers(options.workers);
  const std::size_t na = a_list.size();
  for (auto n : n_list) {
    check_walk_bounds(model, n);
    const std::size_t blocks = block_count(reps);
    std::vector<std::vector<std::uint64_t>> hits(blocks, std::vector<std::uint64_t>(na, 0));
    std::vector<WalkWorkspace> spaces(workers);
    for_each_block(blocks, workers, [&](std::size_t b, unsigned w) {
      WalkWorkspace& ws = spaces[w];
      ws.prepare(model, n);
      std::uint64_t bad = 0;
      const std::uint64_t first = b * kReplicateBlock;
      const std::uint64_t last = std::min<std::uint64_t>(reps, first + kReplicateBlock);
      for (std::uint64_t r = first; r < last; ++r) {
        const StreamId id = base.with_replicate(r);
        StepSource steps(model, id);
        SceneryField scenery(model, id);
        ws.accumulate_counts(model, n, steps);
        const std::int64_t z = ws.endpoint(scenery);
        ws.clear_counts();
        if (!model.congruent(n, z)) ++bad;
        for (std::size_t i = 0; i < na; ++i)
          if (z == a_list[i]) ++hits[b][i];
      }
      congruence_audit().record(last - first, bad);
    });
    const double scale = std::pow(static_cast<double>(n), 0.75);
    for (std::size_t i = 0; i < na; ++i) {
      std::uint64_t h = 0;
      for (const auto& blk : hits) h += blk[i];
      const double p = static_cast<double>(h) / static_cast<double>(reps);
      ConvergenceRow row;
      row.n = n;
      row.statistic = "n34_prob_at:" + std::to_string(a_list[i]);
      row.value = scale * p;
      row.std_error = scale * std::sqrt(p * (1.0 - p) / static_cast<double>(reps));
      row.reps = reps;
      if (!model.congruent(n, a_list[i])) {
        row.congruence_zero = true;
        row.target = 0.0;
        row.target_std_error = 0.0;
        row.provenance = "lattice_model.congruence";
      } else if (targets.l2_inverse) {
        const double c = d / (std::sqrt(2.0 * std::numbers::pi) * sigma);
        row.target = c * targets.l2_inverse->mean;
        row.target_std_error = c * targets.l2_inverse->std_error;
        row.provenance = "brownian_lab.l2_inverse_moment";
      } else {
        row.target = kNaN;
        row.target_std_error = kNaN;
        row.provenance = "missing";
      }
      table.rows.push_back(row);
    }
  }
  return table;
}

Estimate fixed_time_det_moment(std::span<const double> times, std::int64_t n_disc, std::uint64_t paths,
                               std::uint64_t seed, unsigned workers) {
  if (paths == 0) fail(ErrorCode::ZeroReps, "fixed_time_det_moment needs paths");
  std::vector<std::int64_t> bounds;
  std::int64_t prev = 0;
  for (double t : times) {
    const auto b = static_cast<std::int64_t>(std::llround(t * static_cast<double>(n_disc)));
    if (b <= prev || b > n_disc) fail(ErrorCode::InvalidArgument, "times must be increasing in (0, 1]");
    bounds.push_back(b);
    prev = b;
  }
  const std::size_t blocks = block_count(paths);
  std::vector<PowerSums> sums(blocks);
  const StreamId base{seed, experiment_id("fixed_time_det"), 0};
  for_each_block(blocks, resolve_workers(workers), [&](std::size_t b, unsigned) {
    PowerSums local;
    const std::uint64_t first = b * kReplicateBlock;
    const std::uint64_t last = std::min<std::uint64_t>(paths, first + kReplicateBlock);
    for (std::uint64_t r = first; r < last; ++r) {
      const auto path = sample_walk_path(n_disc, base.with_replicate(r));
      const GramSample g = increment_gram(path, bounds, n_disc);
      if (g.degenerate || !(g.det > 0.0)) continue;
      local.add(1.0 / std::sqrt(g.det));
    }
    sums[b] = local;
  });
  return moment_estimate(reduce_pairwise(sums), 1);
}

ConvergenceTable two_time_local_limit(const ModelConfig& model, std::int64_t a1, std::int64_t a2,
                                      std::span<const std::int64_t> n_list, std::uint64_t reps, std::uint64_t seed,
                                      std::optional<Estimate> det_moment, const LimitOptions& options) {
  check_n_list(n_list);
  if (reps == 0) fail(ErrorCode::ZeroReps, "two_time_local_limit needs reps");
  ConvergenceTable table{"local_limit_two_time", {}};
  const double d = static_cast<double>(model.periodicity.d);
  const double sigma2 = model.sigma_xi_sq;
  const StreamId base{seed, experiment_id("local_limit_two_time"), 0};
  const unsigned workers = resolve_workers(options.workers);
  for (auto n : n_list) {
    if (n < 2) fail(ErrorCode::InvalidArgument, "two-time rows need n >= 2");
    check_walk_bounds(model, n);
    const std::int64_t half = n / 2;
    const std::size_t blocks = block_count(reps);
    std::vector<std::uint64_t> hits(blocks, 0);
    std::vector<WalkWorkspace> spaces(workers);
    for_each_block(blocks, workers, [&](std::size_t b, unsigned w) {
      WalkWorkspace& ws = spaces[w];
      ws.prepare(model, n);
      std::uint64_t local = 0;
      const std::uint64_t first = b * kReplicateBlock;
      const std::uint64_t last = std::min<std::uint64_t>(reps, first + kReplicateBlock);
      for (std::uint64_t r = first; r < last; ++r) {
        const StreamId id = base.with_replicate(r);
        StepSource steps(model, id);
        SceneryField scenery(model, id);
        bool first_ok = false, both = false;
        ws.trace(model, n, steps, scenery, [&](std::int64_t k, std::int64_t z) {
          if (k == half) first_ok = (z == a1);
          if (k == n) both = first_ok && z == a2;
        });
        if (both) ++local;
      }
      hits[b] = local;
    });
    std::uint64_t h = 0;
    for (auto v : hits) h += v;
    const double p = static_cast<double>(h) / static_cast<double>(reps);
    const double scale = std::pow(static_cast<double>(n), 1.5);
    ConvergenceRow row;
    row.n = n;
    row.statistic = "n32_joint_prob_at:" + std::to_string(a1) + "," + std::to_string(a2);
    row.value = scale * p;
    row.std_error = scale * std::sqrt(p * (1.0 - p) / static_cast<double>(reps));
    row.reps = reps;
    if (!model.congruent(half, a1) || !model.congruent(n, a2)) {
      row.congruence_zero = true;
      row.target = 0.0;
      row.target_std_error = 0.0;
      row.provenance = "lattice_model.congruence";
    } else if (det_moment) {
      const double c = d * d / (2.0 * std::numbers::pi * sigma2);
      row.target = c * det_moment->mean;
      row.target_std_error = c * det_moment->std_error;
      row.provenance = "brownian_lab.increment_gram";
    } else {
      row.target = kNaN;
      row.target_std_error = kNaN;
      row.provenance = "missing";
    }
    table.rows.push_back(row);
  }
  return table;
}

double RatioObservable::integral(const ModelConfig& model) const {
  double mass = observable_sum(h);
  if (xi_equals) {
    double p = 0.0;
    for (const auto& atom : model.scenery.atoms())
      if (atom.value == *xi_equals) p = atom.mass;
    mass *= p;
  }
  return mass;
}

std::string RatioObservable::name() const {
  std::string s = "ratio";
  if (xi_equals) s += "_xi" + std::to_string(*xi_equals);
  return s;
}

RatioResult ratio_ergodic_experiment(const ModelConfig& model, const RatioObservable& f, std::int64_t n,
                                     std::uint64_t paths, std::uint64_t seed, const LimitOptions& options) {
  if (n < 1) fail(ErrorCode::InvalidArgument, "ratio experiment needs n >= 1");
  if (paths == 0) fail(ErrorCode::ZeroReps, "ratio experiment needs paths");
  check_walk_bounds(model, n);
  RatioResult result;
  for (std::int64_t c = 16; c < n; c *= 4) result.checkpoints.push_back(c);
  result.checkpoints.push_back(n);
  const std::size_t nc = result.checkpoints.size();
  result.paths.resize(paths);

  const Observable& h = f.h;
  const std::int64_t h_lo = h.empty() ? 0 : h.begin()->first;
  const std::int64_t h_hi = h.empty() ? -1 : h.rbegin()->first;
  std::vector<double> dense(static_cast<std::size_t>(std::max<std::int64_t>(h_hi - h_lo + 1, 0)), 0.0);
  for (const auto& [a, v] : h) dense[static_cast<std::size_t>(a - h_lo)] = v;

  const StreamId base{seed, experiment_id("ratio"), 0};
  const std::int64_t radius = n * std::max<std::int64_t>(model.step.max_abs(), 1);
  // One path per replicate; each path runs on its own stream.
  for_each_block(paths, resolve_workers(options.workers), [&](std::size_t r, unsigned) {
    const StreamId id = base.with_replicate(r);
    StepSource steps(model, id);
    SceneryField scenery(model, id);
    std::vector<std::int64_t> cache(static_cast<std::size_t>(2 * radius + 1), std::numeric_limits<std::int64_t>::min());
    RatioPath& out = result.paths[r];
    out.ratios.assign(nc, kNaN);
    std::int64_t pos = 0, z = 0, zeros = 0;
    double sum = 0.0;
    std::uint64_t bad = 0;
    std::size_t next = 0;
    for (std::int64_t k = 0; k < n; ++k) {
      auto& xi = cache[static_cast<std::size_t>(pos + radius)];
      if (xi == std::numeric_limits<std::int64_t>::min()) xi = scenery(pos);
      if (z >= h_lo && z <= h_hi) {
        const double hv = dense[static_cast<std::size_t>(z - h_lo)];
        if (hv != 0.0 && (!f.xi_equals || xi == *f.xi_equals)) sum += hv;
      }
      z += xi;
      pos += steps.next();
      if (!model.congruent(k + 1, z)) ++bad;
      if (z == 0) ++zeros;
      if (k + 1 == result.checkpoints[next]) {
        if (zeros > 0) out.ratios[next] = sum / static_cast<double>(zeros);
        ++next;
      }
    }
    congruence_audit().record(static_cast<std::uint64_t>(n), bad);
  });

  result.table.experiment = "ratio";
  const double target = f.integral(model);
  for (std::size_t c = 0; c < nc; ++c) {
    std::vector<double> defined;
    for (const auto& p : result.paths)
      if (!std::isnan(p.ratios[c])) defined.push_back(p.ratios[c]);
    ConvergenceRow row;
    row.n = result.checkpoints[c];
    row.statistic = "median_" + f.name();
    row.value = defined.empty() ? kNaN : median(defined);
    row.std_error = defined.empty() ? kNaN : estimate_from_samples(defined).std_error * std::sqrt(std::numbers::pi / 2);
    row.reps = defined.size();
    row.target = target;
    row.provenance = "limit_suite.ratio_integral";
    result.table.rows.push_back(row);
  }
  return result;
}

std::vector<double> scaled_endpoint_samples(const ModelConfig& model, std::int64_t n, std::uint64_t reps,
                                            std::uint64_t seed, unsigned workers) {
  Statistic stat;
  stat.kind = StatisticKind::Endpoint;
  BatchReport br = batch_estimate(model, n, reps, stat, seed, {workers, true, experiment_id("functional")});
  const double sigma = model.sigma_xi();
  for (double& v : br.samples) v /= sigma;
  return std::move(br.samples);
}

ConvergenceTable functional_limit_check(const ModelConfig& model, std::span<const std::int64_t> n_list,
                                        std::uint64_t reps, std::int64_t n_disc, std::uint64_t seed,
                                        const LimitOptions& options) {
  check_n_list(n_list);
  if (reps == 0) fail(ErrorCode::ZeroReps, "functional_limit_check needs reps");
  ConvergenceTable table{"functional", {}};
  BrownianOptions bo;
  bo.workers = options.workers;
  const std::vector<double> delta = delta_endpoint_samples(n_disc, reps, seed, bo);
  for (auto n : n_list) {
    const auto z = scaled_endpoint_samples(model, n, reps, seed, options.workers);
    ConvergenceRow row;
    row.n = n;
    row.statistic = "ks_endpoint_vs_delta";
    row.value = ks_two_sample(z, delta);
    row.std_error = std::sqrt(2.0 / static_cast<double>(reps));  // scale of the null fluctuation
    row.reps = reps;
    row.target = 0.0;
    row.target_std_error = 0.0;
    row.provenance = "brownian_lab.simulate_delta_endpoint";
    table.rows.push_back(row);
  }
  return table;
}

}  // namespace rwrs
