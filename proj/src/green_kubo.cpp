#include "rwrs/green_kubo.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

#include "rwrs/error.hpp"
#include "rwrs/parallel.hpp"
#include "rwrs/stats.hpp"
#include "rwrs/walk_engine.hpp"

namespace rwrs {

namespace {

constexpr double kCenterTol = 1e-12;

// 0, -1, 1, -2, 2, ...
std::vector<std::int64_t> summation_order(std::int64_t horizon) {
  std::vector<std::int64_t> ks{0};
  for (std::int64_t j = 1; j <= horizon; ++j) {
    ks.push_back(-j);
    ks.push_back(j);
  }
  return ks;
}

double kernel_at(const Observable& h, std::int64_t x) {
  auto it = h.find(x);
  return it == h.end() ? 0.0 : it->second;
}

std::int64_t max_lag(const ModelConfig& model, std::int64_t k) {
  std::int64_t m = 0;
  for (auto lag : block_lags(model, k)) m = std::max(m, lag);
  return m;
}

struct McBlocks {
  std::vector<Estimate> blocks;
  Estimate total;
};

// All Monte Carlo blocks from one shared set of trajectories.
McBlocks mc_blocks(const ModelConfig& model, const Observable& h, const std::vector<std::int64_t>& ks,
                   const GreenKuboOptions& options) {
  McBlocks out;
  if (ks.empty()) return out;
  if (options.mc_budget == 0) fail(ErrorCode::ZeroReps, "green_kubo: mc_budget must be positive");
  std::vector<std::vector<std::int64_t>> lags;
  std::int64_t horizon = 0;
  for (auto k : ks) {
    lags.push_back(block_lags(model, k));
    horizon = std::max(horizon, max_lag(model, k));
  }
  check_walk_bounds(model, horizon);

  const std::size_t nb = ks.size();
  const std::size_t blocks = block_count(options.mc_budget);
  const unsigned workers = resolve_workers(options.workers);
  // Per replicate block: nb block accumulators followed by the row total.
  std::vector<std::vector<PowerSums>> acc(blocks);
  std::vector<WalkWorkspace> spaces(workers);
  const StreamId base{options.seed, experiment_id("green_kubo"), 0};

  for_each_block(blocks, workers, [&](std::size_t b, unsigned w) {
    WalkWorkspace& ws = spaces[w];
    ws.prepare(model, horizon);
    std::vector<PowerSums> local(nb + 1);
    std::vector<double> hz(static_cast<std::size_t>(horizon) + 1);
    const std::uint64_t first = b * kReplicateBlock;
    const std::uint64_t last = std::min<std::uint64_t>(options.mc_budget, first + kReplicateBlock);
    for (std::uint64_t r = first; r < last; ++r) {
      const StreamId id = base.with_replicate(r);
      StepSource steps(model, id);
      SceneryField scenery(model, id);
      ws.trace(model, horizon, steps, scenery,
               [&](std::int64_t k, std::int64_t z) { hz[static_cast<std::size_t>(k)] = kernel_at(h, z); });
      double row = 0.0;
      for (std::size_t i = 0; i < nb; ++i) {
        double v = 0.0;
        for (auto lag : lags[i]) v += hz[static_cast<std::size_t>(lag)];
        local[i].add(v);
        row += v;
      }
      local[nb].add(row);
    }
    acc[b] = std::move(local);
  });

  std::vector<PowerSums> column(blocks);
  for (std::size_t i = 0; i <= nb; ++i) {
    for (std::size_t b = 0; b < blocks; ++b) column[b] = acc[b][i];
    const Estimate e = moment_estimate(reduce_pairwise(column), 1);
    if (i < nb)
      out.blocks.push_back(e);
    else
      out.total = e;
  }
  return out;
}

// Sum_{j > K} j^{-p}: explicit terms, then the Euler-Maclaurin remainder.
double power_tail(std::int64_t K, double p) {
  const std::int64_t explicit_terms = 100000;
  double s = 0.0;
  const std::int64_t M = K + explicit_terms;
  for (std::int64_t j = M; j > K; --j) s += std::pow(static_cast<double>(j), -p);
  const double Md = static_cast<double>(M);
  s += std::pow(Md, 1.0 - p) / (p - 1.0) - 0.5 * std::pow(Md, -p);
  return s;
}

void fit_tail(GreenKuboResult& result) {
  const std::int64_t K = result.truncation_index;
  result.tail_estimate = std::numeric_limits<double>::quiet_NaN();
  result.tail_exponent = std::numeric_limits<double>::quiet_NaN();
  result.tail_converged = false;
  if (K < 2) return;
  std::vector<double> paired(static_cast<std::size_t>(K) + 1, 0.0);
  for (const auto& bv : result.blocks)
    if (bv.k != 0) paired[static_cast<std::size_t>(std::llabs(bv.k))] += bv.value;
  const std::int64_t start = std::max<std::int64_t>(1, K / 10);
  std::vector<double> lx, ly;
  double signed_sum = 0.0;
  for (std::int64_t j = start; j <= K; ++j) {
    const double v = paired[static_cast<std::size_t>(j)];
    signed_sum += v;
    if (v == 0.0) continue;
    lx.push_back(std::log(static_cast<double>(j)));
    ly.push_back(std::log(std::fabs(v)));
  }
  if (lx.size() < 2) {
    // Every paired block in the window vanished.
    if (lx.empty()) {
      result.tail_estimate = 0.0;
      result.tail_converged = true;
    }
    return;
  }
  const LinearFit fit = least_squares(lx, ly);
  const double p = -fit.slope;
  result.tail_exponent = p;
  if (!(p > 1.0)) return;
  const double c = std::exp(fit.intercept);
  result.tail_estimate = std::copysign(c * power_tail(K, p), signed_sum);
  result.tail_converged = true;
}

}  // namespace

const char* to_string(BlockSource source) noexcept {
  return source == BlockSource::Exact ? "exact" : "mc";
}

Observable lag_kernel(const Observable& f) {
  Observable h;
  for (const auto& [a, fa] : f)
    for (const auto& [b, fb] : f) h[a - b] += fa * fb;
  for (auto it = h.begin(); it != h.end();) it = (it->second == 0.0) ? h.erase(it) : std::next(it);
  return h;
}

std::vector<std::int64_t> block_lags(const ModelConfig& model, std::int64_t k) {
  const std::int64_t d = model.periodicity.d;
  std::vector<std::int64_t> lags;
  for (std::int64_t l = 0; l < d; ++l) lags.push_back(std::llabs(l + d * k));
  return lags;
}

double block_term_exact(const ModelConfig& model, const Observable& f, std::int64_t k,
                        const std::vector<ExactPmf>& laws) {
  const Observable h = lag_kernel(f);
  mpq_class total = 0;
  for (auto lag : block_lags(model, k)) {
    if (lag >= static_cast<std::int64_t>(laws.size()))
      fail(ErrorCode::CapExceeded, "block_term_exact: lag " + std::to_string(lag) + " beyond the supplied laws");
    const ExactPmf& law = laws[static_cast<std::size_t>(lag)];
    for (const auto& [x, w] : h) total += mpq_class(w) * law.at(x);
  }
  return total.get_d();
}

BlockValue block_term(const ModelConfig& model, const Observable& f, std::int64_t k,
                      const GreenKuboOptions& options) {
  BlockValue out;
  out.k = k;
  if (f.empty()) return out;
  const int cap = options.cap < 0 ? default_exact_cap(model) : options.cap;
  const std::int64_t top = max_lag(model, k);
  if (model.is_rational() && top <= cap) {
    out.value = block_term_exact(model, f, k, exact_Z_pmfs_upto(model, top, cap));
    return out;
  }
  const McBlocks mc = mc_blocks(model, lag_kernel(f), {k}, options);
  out.value = mc.blocks[0].mean;
  out.std_error = mc.blocks[0].std_error;
  out.source = BlockSource::MonteCarlo;
  return out;
}

GreenKuboResult sigma2_f(const ModelConfig& model, const Observable& f, const GreenKuboOptions& options) {
  if (options.exact_horizon < 0 || options.mc_horizon < 0)
    fail(ErrorCode::InvalidArgument, "green_kubo: horizons must be non-negative");
  GreenKuboResult result;
  const double mass = observable_sum(f);
  result.centered = std::fabs(mass) <= kCenterTol;
  if (!result.centered && options.enforce_centered)
    fail(ErrorCode::ObservableNotCentered, "green_kubo: sum of f is " + std::to_string(mass));

  const std::int64_t horizon = std::max(options.exact_horizon, options.mc_horizon);
  const std::vector<std::int64_t> order = summation_order(horizon);
  result.truncation_index = horizon;
  const Observable h = lag_kernel(f);

  const int cap = options.cap < 0 ? default_exact_cap(model) : options.cap;
  std::vector<std::int64_t> exact_ks, mc_ks;
  std::int64_t exact_top = 0;
  for (auto k : order) {
    const std::int64_t top = max_lag(model, k);
    if (model.is_rational() && std::llabs(k) <= options.exact_horizon && top <= cap) {
      exact_ks.push_back(k);
      exact_top = std::max(exact_top, top);
    } else {
      mc_ks.push_back(k);
    }
  }

  std::vector<ExactPmf> laws;
  if (!exact_ks.empty() && !h.empty()) laws = exact_Z_pmfs_upto(model, exact_top, cap);
  const McBlocks mc = h.empty() ? McBlocks{} : mc_blocks(model, h, mc_ks, options);

  std::size_t ie = 0, im = 0;
  std::vector<double> values;
  for (auto k : order) {
    BlockValue bv;
    bv.k = k;
    if (ie < exact_ks.size() && exact_ks[ie] == k) {
      ++ie;
      if (!h.empty()) bv.value = block_term_exact(model, f, k, laws);
    } else {
      bv.source = BlockSource::MonteCarlo;
      if (!h.empty()) {
        bv.value = mc.blocks[im].mean;
        bv.std_error = mc.blocks[im].std_error;
      }
      ++im;
    }
    values.push_back(bv.value);
    result.blocks.push_back(bv);
  }
  // Sequential in the block order; pairs of opposite sign must meet early.
  double s = 0.0;
  for (double v : values) s += v;
  result.sigma2 = s;
  result.sigma2_std_error = mc_ks.empty() ? 0.0 : mc.total.std_error;
  fit_tail(result);
  return result;
}

GreenKuboResult sigma2_0a(const ModelConfig& model, std::int64_t a, const GreenKuboOptions& options) {
  if (a == 0) fail(ErrorCode::InvalidArgument, "sigma2_0a: a must be non-zero");
  return sigma2_f(model, indicator_difference(0, a), options);
}

std::string green_kubo_csv(const GreenKuboResult& result) {
  std::ostringstream os;
  os << "k,value,source,stderr\n";
  char buf[96];
  for (const auto& b : result.blocks) {
    std::snprintf(buf, sizeof buf, ",%.17g,%s,%.17g\n", b.value, to_string(b.source), b.std_error);
    os << b.k << buf;
  }
  return os.str();
}

}  // namespace rwrs
