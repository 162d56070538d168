#include "rwrs/moment_engine.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <random>
#include <sstream>

#include "rwrs/brownian_lab.hpp"
#include "rwrs/error.hpp"
#include "rwrs/parallel.hpp"
#include "rwrs/rng.hpp"

namespace rwrs {

namespace {

// log of a Gamma(alpha) variate; the alpha < 1 boost keeps tiny values finite.
double log_gamma_variate(double alpha, CounterRng& rng) {
  std::gamma_distribution<double> g(alpha + 1.0);
  const double big = g(rng);
  double u = rng.uniform();
  while (u == 0.0) u = rng.uniform();
  return std::log(big) + std::log(u) / alpha;
}

// Dirichlet(alpha, ..., alpha; 1): m gaps plus the remainder, as logs. Without
// the remainder the m gaps are symmetric Dirichlet(alpha) and sum to 1.
void dirichlet_log_gaps(int m, double alpha, CounterRng& rng, std::vector<double>& out, bool remainder = true) {
  const std::size_t parts = static_cast<std::size_t>(m) + (remainder ? 1 : 0);
  out.resize(parts);
  for (int i = 0; i < m; ++i) out[static_cast<std::size_t>(i)] = log_gamma_variate(alpha, rng);
  if (remainder) {
    std::exponential_distribution<double> e(1.0);
    out[static_cast<std::size_t>(m)] = std::log(e(rng));
  }
  const double top = *std::max_element(out.begin(), out.end());
  double s = 0.0;
  for (double v : out) s += std::exp(v - top);
  const double log_total = top + std::log(s);
  for (double& v : out) v -= log_total;
}

template <class Sample>
SimplexCheck run_simplex(int m, std::uint64_t samples, std::uint64_t seed, unsigned workers, const char* name,
                         Sample&& sample) {
  if (m < 1) fail(ErrorCode::InvalidArgument, "simplex check needs m >= 1");
  if (samples == 0) fail(ErrorCode::ZeroReps, "simplex check needs samples");
  const std::size_t blocks = block_count(samples);
  std::vector<PowerSums> sums(blocks);
  const StreamId base{seed, experiment_id(name), static_cast<std::uint64_t>(m)};
  for_each_block(blocks, resolve_workers(workers), [&](std::size_t b, unsigned) {
    CounterRng rng(base.with_replicate((static_cast<std::uint64_t>(m) << 40) + b), Purpose::Aux);
    PowerSums local;
    std::vector<double> scratch;
    const std::uint64_t first = b * kReplicateBlock;
    const std::uint64_t last = std::min<std::uint64_t>(samples, first + kReplicateBlock);
    for (std::uint64_t r = first; r < last; ++r) local.add(sample(rng, scratch));
    sums[b] = local;
  });
  const Estimate e = moment_estimate(reduce_pairwise(sums), 1);
  SimplexCheck out;
  out.m = m;
  out.samples = samples;
  out.estimate = e.mean;
  out.std_error = e.std_error;
  return out;
}

double log_factorial(int m) { return std::lgamma(static_cast<double>(m) + 1.0); }

double relative(const Estimate& e) { return e.mean != 0.0 ? e.std_error / std::fabs(e.mean) : 0.0; }

}  // namespace

double simplex_integral(int m) {
  if (m < 0) fail(ErrorCode::InvalidArgument, "simplex_integral: m must be >= 0");
  if (m == 0) return 1.0;
  return std::exp(m * std::log(kGammaQuarter) - std::lgamma(m / 4.0 + 1.0));
}

double simplex_closed_form(int m) {
  if (m < 0) fail(ErrorCode::InvalidArgument, "simplex_closed_form: m must be >= 0");
  if (m == 0) return 1.0;
  if (m == 1) return 4.0;
  return std::exp(log_factorial(m) + m * std::log(kGammaQuarter) - std::lgamma(m / 4.0 + 1.0));
}

double simplex_beta_step(int m) {
  if (m < 0) fail(ErrorCode::InvalidArgument, "simplex_beta_step: m must be >= 0");
  // B(1/4, m/4 + 1)
  return std::exp(std::log(kGammaQuarter) + std::lgamma(m / 4.0 + 1.0) - std::lgamma((m + 1) / 4.0 + 1.0));
}

SimplexCheck simplex_mc_cube(int m, std::uint64_t samples, std::uint64_t seed, unsigned workers) {
  const double scale = std::exp(log_factorial(m) + m * std::log(4.0));
  return run_simplex(m, samples, seed, workers, "simplex_cube", [&](CounterRng& rng, std::vector<double>&) {
    double s = 0.0;
    for (int i = 0; i < m; ++i) {
      const double u = rng.uniform();
      s += (u * u) * (u * u);
    }
    return s < 1.0 ? scale : 0.0;
  });
}

SimplexCheck simplex_mc_dirichlet(int m, std::uint64_t samples, std::uint64_t seed, unsigned workers) {
  constexpr double alpha = 1.0 / 3.0;
  // m! / q(x) * prod x^{-3/4} with q the Dirichlet(1/3; 1) density.
  const double log_norm = log_factorial(m) + m * std::lgamma(alpha) - std::lgamma(m * alpha + 1.0);
  return run_simplex(m, samples, seed, workers, "simplex_dirichlet", [&](CounterRng& rng, std::vector<double>& g) {
    dirichlet_log_gaps(m, alpha, rng, g);
    double log_w = log_norm;
    for (int i = 0; i < m; ++i) log_w += (-0.75 + (1.0 - alpha)) * g[static_cast<std::size_t>(i)];
    return std::exp(log_w);
  });
}

MomentEstimate ks_local_time_moment(int m, double sigma_xi, std::uint64_t simplex_budget, std::uint64_t path_budget,
                                    std::int64_t n_disc, std::uint64_t seed, const MomentOptions& options) {
  if (m < 1) fail(ErrorCode::InvalidArgument, "ks_local_time_moment: m must be >= 1");
  if (!(sigma_xi > 0.0)) fail(ErrorCode::ZeroVariance, "ks_local_time_moment: sigma_xi must be positive");
  if (path_budget == 0) fail(ErrorCode::ZeroReps, "ks_local_time_moment: path_budget must be >= 1");
  if (simplex_budget == 0) fail(ErrorCode::ZeroReps, "ks_local_time_moment: simplex_budget must be >= 1");
  if (n_disc < m) fail(ErrorCode::InvalidArgument, "ks_local_time_moment: n_disc must be >= m");

  const std::size_t blocks = block_count(path_budget);
  std::vector<PowerSums> sums(blocks);
  std::vector<std::uint64_t> degenerate(blocks, 0);
  const StreamId base{seed, experiment_id("ks_moment"), 0};
  const double nd = static_cast<double>(n_disc);
  const auto mm = static_cast<std::size_t>(m);

  for_each_block(blocks, resolve_workers(options.workers), [&](std::size_t b, unsigned) {
    PowerSums local;
    std::uint64_t bad = 0;
    std::vector<double> log_gaps;
    std::vector<std::int64_t> bounds(mm);
    const std::uint64_t first = b * kReplicateBlock;
    const std::uint64_t last = std::min<std::uint64_t>(path_budget, first + kReplicateBlock);
    for (std::uint64_t r = first; r < last; ++r) {
      const StreamId id = base.with_replicate(r);
      const auto path = sample_walk_path(n_disc, id);
      CounterRng rng(id, Purpose::Aux);
      double acc = 0.0;
      std::uint64_t kept = 0;
      for (std::uint64_t s = 0; s < simplex_budget; ++s) {
        // Scaling pins t_m = 1: the t_m integral contributes 4/m, which turns
        // Gamma(1/4)^m / Gamma(m/4) into a_m again.
        dirichlet_log_gaps(m, 0.25, rng, log_gaps, false);
        double t = 0.0;
        std::int64_t prev = 0;
        for (std::size_t j = 0; j < mm; ++j) {
          t += std::exp(log_gaps[j]);
          bounds[j] = j + 1 == mm ? n_disc : std::max(prev + 1, static_cast<std::int64_t>(std::llround(t * nd)));
          prev = bounds[j];
        }
        std::int64_t next = n_disc + 1;
        for (std::size_t j = mm; j-- > 0;) {
          bounds[j] = std::min(bounds[j], next - 1);
          next = bounds[j];
        }
        const GramSample g = increment_gram(path, bounds, n_disc);
        if (g.degenerate || !(g.det > 0.0)) {
          ++bad;
          continue;
        }
        double log_w = -0.5 * std::log(g.det);
        prev = 0;
        for (std::size_t j = 0; j < mm; ++j) {
          log_w += 0.75 * std::log(static_cast<double>(bounds[j] - prev) / nd);
          prev = bounds[j];
        }
        acc += std::exp(log_w);
        ++kept;
      }
      if (kept > 0) local.add(acc / static_cast<double>(kept));
    }
    sums[b] = local;
    degenerate[b] = bad;
  });

  MomentEstimate out;
  out.m = m;
  out.sigma_xi = sigma_xi;
  out.n_disc = n_disc;
  out.paths = path_budget;
  out.tuples_per_path = simplex_budget;
  for (auto d : degenerate) out.degenerate += d;
  const PowerSums total = reduce_pairwise(sums);
  if (total.count == 0) fail(ErrorCode::DegenerateInput, "ks_local_time_moment: every tuple was degenerate");
  const Estimate e = moment_estimate(total, 1);
  const double a_m = simplex_integral(m);
  out.det_moment_factor = a_m * e.mean;
  out.det_moment_std_error = a_m * e.std_error;
  out.simplex_factor = std::exp(log_factorial(m) - 0.5 * m * std::log(2.0 * std::numbers::pi * sigma_xi * sigma_xi));
  out.value = out.simplex_factor * out.det_moment_factor;
  out.std_error = out.simplex_factor * out.det_moment_std_error;
  return out;
}

Sandwich moment_sandwich(int m, double sigma_xi, const SandwichComponents& c) {
  if (m < 1) fail(ErrorCode::InvalidArgument, "moment_sandwich: m must be >= 1");
  if (!c.l2_inverse) fail(ErrorCode::MissingComponents, "moment_sandwich: E[|L_1|^{-1}] missing");
  if (static_cast<int>(c.vk_inverse.size()) < m - 1)
    fail(ErrorCode::MissingComponents, "moment_sandwich: need V_j estimates for j < " + std::to_string(m));
  const double base = simplex_closed_form(m) * std::pow(2.0 * std::numbers::pi * sigma_xi * sigma_xi, -0.5 * m);
  const Estimate& l2 = *c.l2_inverse;
  Sandwich s;
  s.lower = std::pow(l2.mean, m) * base;
  s.lower_std_error = s.lower * m * relative(l2);
  double upper = l2.mean * base;
  double rel_sq = relative(l2) * relative(l2);
  for (int j = 1; j < m; ++j) {
    const Estimate& v = c.vk_inverse[static_cast<std::size_t>(j - 1)];
    upper *= v.mean;
    rel_sq += relative(v) * relative(v);
  }
  s.upper = upper;
  s.upper_std_error = upper * std::sqrt(rel_sq);
  return s;
}

CarlemanSeries carleman_partial(std::span<const double> values, double eta0) {
  CarlemanSeries out;
  double s = 0.0, c = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    const double m = static_cast<double>(i + 1);
    if (!(values[i] > 0.0)) fail(ErrorCode::InvalidArgument, "carleman_partial: values must be positive");
    s += std::exp(-std::log(values[i]) / (2.0 * m));
    c += std::pow(m, -0.625 - eta0);
    out.partial.push_back(s);
    out.companion.push_back(c);
  }
  if (values.size() >= 4) {
    std::vector<double> x, y;
    for (std::size_t i = values.size() / 2; i < values.size(); ++i) {
      x.push_back(std::log(static_cast<double>(i + 1)));
      y.push_back(std::log(out.partial[i]));
    }
    out.growth_exponent = least_squares(x, y).slope;
  }
  return out;
}

double log_moment_upper_bound(int m, double a, double eta0) {
  if (m < 1 || !(a > 0.0)) fail(ErrorCode::InvalidArgument, "log_moment_upper_bound: need m >= 1, a > 0");
  return m * std::log(a) + (1.5 + eta0) * log_factorial(m) - std::lgamma(m / 4.0 + 1.0);
}

double growth_ratio(int m, double value) {
  if (m < 1 || !(value > 0.0)) fail(ErrorCode::InvalidArgument, "growth_ratio: need m >= 1 and value > 0");
  return std::exp(std::log(value) / m - 0.75 * std::log(static_cast<double>(m)));
}

std::string moment_csv(std::span<const MomentEstimate> rows) {
  std::ostringstream os;
  os << "m,closed_form,estimate,stderr,lower,upper\n";
  char buf[192];
  for (const auto& r : rows) {
    const double lo = r.sandwich ? r.sandwich->lower : std::nan("");
    const double hi = r.sandwich ? r.sandwich->upper : std::nan("");
    std::snprintf(buf, sizeof buf, "%d,%.17g,%.17g,%.17g,%.17g,%.17g\n", r.m, simplex_closed_form(r.m), r.value,
                  r.std_error, lo, hi);
    os << buf;
  }
  return os.str();
}

}  // namespace rwrs
