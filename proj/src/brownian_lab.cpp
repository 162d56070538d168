#include "rwrs/brownian_lab.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <sstream>

#include "rwrs/error.hpp"
#include "rwrs/lattice_model.hpp"
#include "rwrs/parallel.hpp"
#include "rwrs/walk_engine.hpp"

namespace rwrs {

namespace {

const ModelConfig& simple_model() {
  static const ModelConfig model = rademacher_model();
  return model;
}

std::uint64_t zigzag(std::int64_t y) noexcept { return static_cast<std::uint64_t>((y << 1) ^ (y >> 63)); }

// First site of cell m: ceil(m sqrt(n) / k).
std::int64_t cell_start(std::int64_t m, std::int64_t k, long double root_n) {
  return static_cast<std::int64_t>(std::ceil(static_cast<long double>(m) * root_n / static_cast<long double>(k)));
}

// Squared distance to V_k in units of counts^2; negative when exactly zero.
template <class CountAt>
long double vk_residual(std::int64_t lo, std::int64_t hi, CountAt&& count_at, std::int64_t n, std::int64_t k) {
  const auto [mlo, mhi] = vk_cell_range(k);
  const long double root_n = std::sqrt(static_cast<long double>(n));
  std::vector<std::int64_t> bounds;
  bounds.reserve(static_cast<std::size_t>(mhi - mlo + 2));
  for (std::int64_t m = mlo; m <= mhi + 1; ++m) bounds.push_back(cell_start(m, k, root_n));
  const std::int64_t cover_lo = bounds.front();
  const std::int64_t cover_hi = bounds.back();  // exclusive

  long double residual = 0.0L;
  bool exact_zero = true;
  // Outside the covered interval the whole mass counts.
  for (std::int64_t y = lo; y <= hi; ++y) {
    if (y >= cover_lo && y < cover_hi) continue;
    const std::int64_t c = count_at(y);
    if (c != 0) {
      exact_zero = false;
      residual += static_cast<long double>(c) * c;
    }
  }
  for (std::size_t cell = 0; cell + 1 < bounds.size(); ++cell) {
    const std::int64_t a = std::max(bounds[cell], lo);
    const std::int64_t b = std::min(bounds[cell + 1], hi + 1);
    const std::int64_t width = bounds[cell + 1] - bounds[cell];
    if (width <= 0 || a >= b) continue;
    __int128 s1 = 0, s2 = 0;
    for (std::int64_t y = a; y < b; ++y) {
      const std::int64_t c = count_at(y);
      s1 += c;
      s2 += static_cast<__int128>(c) * c;
    }
    const __int128 num = static_cast<__int128>(width) * s2 - s1 * s1;
    if (num != 0) {
      exact_zero = false;
      residual += static_cast<long double>(num) / static_cast<long double>(width);
    }
  }
  return exact_zero ? -1.0L : residual;
}

struct SampleColumn {
  std::vector<PowerSums> sums;
  std::vector<std::uint64_t> degenerate;
};

InverseMomentReport finish_report(std::string quantity, std::int64_t n, std::uint64_t budget, std::uint64_t seed,
                                  std::int64_t k, const std::vector<PowerSums>& sums,
                                  const std::vector<std::uint64_t>& degenerate, const std::vector<double>& raw,
                                  const BrownianOptions& options) {
  InverseMomentReport r;
  r.quantity = std::move(quantity);
  r.n_disc = n;
  r.budget = budget;
  r.seed = seed;
  r.k = k;
  const PowerSums total = reduce_pairwise(sums);
  r.degenerate = std::accumulate(degenerate.begin(), degenerate.end(), std::uint64_t{0});
  if (total.count > 0) r.estimate = moment_estimate(total, 1);
  std::vector<double> kept;
  kept.reserve(raw.size());
  for (double v : raw)
    if (!std::isnan(v)) kept.push_back(v);
  if (!kept.empty()) {
    const int groups = static_cast<int>(std::min<std::size_t>(std::max(options.mom_groups, 1), kept.size()));
    r.median_of_means = median_of_means(kept, groups);
  }
  if (options.keep_samples) r.samples = std::move(kept);
  return r;
}

}  // namespace

double LocalTimeGrid::value_at(std::int64_t site) const noexcept {
  return static_cast<double>(count_at(site)) * spacing;
}

std::int64_t LocalTimeGrid::count_at(std::int64_t site) const noexcept {
  if (site < min_site || site > max_site()) return 0;
  return counts[static_cast<std::size_t>(site - min_site)];
}

double LocalTimeGrid::occupation() const noexcept {
  std::int64_t total = 0;
  for (auto c : counts) total += c;
  return static_cast<double>(total) / static_cast<double>(n_disc);
}

double LocalTimeGrid::l2_norm_sq() const noexcept {
  long double s = 0;
  for (auto c : counts) s += static_cast<long double>(c) * c;
  return static_cast<double>(s * std::pow(static_cast<long double>(n_disc), -1.5L));
}

std::vector<std::int32_t> sample_walk_path(std::int64_t n, const StreamId& stream) {
  if (n < 1) fail(ErrorCode::InvalidArgument, "walk path needs n >= 1");
  if (n > (std::int64_t{1} << 31) - 1) fail(ErrorCode::Overflow, "walk path too long for 32-bit sites");
  StepSource steps(simple_model(), stream);
  std::vector<std::int32_t> path(static_cast<std::size_t>(n));
  std::int32_t pos = 0;
  for (std::int64_t k = 0; k < n; ++k) {
    path[static_cast<std::size_t>(k)] = pos;
    pos += static_cast<std::int32_t>(steps.next());
  }
  return path;
}

std::vector<LocalTimeGrid> sample_local_time_grid(std::int64_t n_disc, std::span<const double> times,
                                                  const StreamId& stream) {
  if (n_disc < 1) fail(ErrorCode::InvalidArgument, "sample_local_time_grid: n_disc must be >= 1");
  for (std::size_t i = 0; i < times.size(); ++i) {
    if (!(times[i] > 0.0 && times[i] <= 1.0)) fail(ErrorCode::InvalidArgument, "time fractions must lie in (0, 1]");
    if (i > 0 && times[i] < times[i - 1]) fail(ErrorCode::InvalidArgument, "time fractions must be ascending");
  }
  const auto path = sample_walk_path(n_disc, stream);
  const auto [mn, mx] = std::minmax_element(path.begin(), path.end());
  std::vector<std::int64_t> counts(static_cast<std::size_t>(*mx - *mn + 1), 0);
  std::vector<LocalTimeGrid> out;
  std::int64_t done = 0;
  for (double t : times) {
    const auto upto = static_cast<std::int64_t>(std::floor(t * static_cast<double>(n_disc)));
    for (; done < upto; ++done) ++counts[static_cast<std::size_t>(path[static_cast<std::size_t>(done)] - *mn)];
    LocalTimeGrid g;
    g.n_disc = n_disc;
    g.spacing = 1.0 / std::sqrt(static_cast<double>(n_disc));
    g.time_fraction = static_cast<double>(upto) / static_cast<double>(n_disc);
    std::size_t first = 0, last = counts.size();
    while (first < last && counts[first] == 0) ++first;
    while (last > first && counts[last - 1] == 0) --last;
    g.min_site = *mn + static_cast<std::int64_t>(first);
    g.counts.assign(counts.begin() + static_cast<std::ptrdiff_t>(first), counts.begin() + static_cast<std::ptrdiff_t>(last));
    out.push_back(std::move(g));
  }
  return out;
}

double ldlt_det(std::span<const double> matrix, std::size_t m, double tol_rel, bool* clamped, bool* degenerate) {
  if (matrix.size() != m * m) fail(ErrorCode::InvalidArgument, "ldlt_det: matrix size mismatch");
  if (clamped) *clamped = false;
  if (degenerate) *degenerate = false;
  if (m == 0) return 1.0;
  std::vector<double> a(matrix.begin(), matrix.end());
  double trace = 0.0;
  for (std::size_t i = 0; i < m; ++i) trace += a[i * m + i];
  const double tol = tol_rel * std::fabs(trace);
  std::vector<std::size_t> perm(m);
  std::iota(perm.begin(), perm.end(), 0);
  double det = 1.0;
  for (std::size_t j = 0; j < m; ++j) {
    // Pivot on the largest remaining diagonal entry.
    std::size_t p = j;
    for (std::size_t i = j + 1; i < m; ++i)
      if (a[i * m + i] > a[p * m + p]) p = i;
    if (p != j) {
      for (std::size_t c = 0; c < m; ++c) std::swap(a[j * m + c], a[p * m + c]);
      for (std::size_t r = 0; r < m; ++r) std::swap(a[r * m + j], a[r * m + p]);
    }
    const double pivot = a[j * m + j];
    if (pivot <= tol) {
      if (pivot < 0.0 && clamped) *clamped = true;
      if (degenerate) *degenerate = true;
      return 0.0;
    }
    det *= pivot;
    for (std::size_t i = j + 1; i < m; ++i) {
      const double l = a[i * m + j] / pivot;
      for (std::size_t c = j + 1; c < m; ++c) a[i * m + c] -= l * a[j * m + c];
    }
  }
  return det;
}

GramSample gram_det(std::span<const LocalTimeGrid> grids) {
  GramSample g;
  g.m = grids.size();
  if (g.m == 0) fail(ErrorCode::InvalidArgument, "gram_det: no grids");
  for (const auto& grid : grids) {
    if (grid.n_disc != grids[0].n_disc || grid.spacing != grids[0].spacing)
      fail(ErrorCode::DegenerateInput, "gram_det: grids have different spacing");
    g.times.push_back(grid.time_fraction);
  }
  const long double scale = std::pow(static_cast<long double>(grids[0].n_disc), -1.5L);
  g.matrix.assign(g.m * g.m, 0.0);
  for (std::size_t i = 0; i < g.m; ++i) {
    for (std::size_t j = i; j < g.m; ++j) {
      const auto& a = grids[i];
      const auto& b = grids[j];
      const std::int64_t lo = std::max(a.min_site, b.min_site);
      const std::int64_t hi = std::min(a.max_site(), b.max_site());
      __int128 s = 0;
      for (std::int64_t y = lo; y <= hi; ++y) s += static_cast<__int128>(a.count_at(y)) * b.count_at(y);
      const double v = static_cast<double>(static_cast<long double>(s) * scale);
      g.matrix[i * g.m + j] = v;
      g.matrix[j * g.m + i] = v;
    }
  }
  g.det = ldlt_det(g.matrix, g.m, 1e-12, &g.clamped, &g.degenerate);
  return g;
}

double projection_distance(const LocalTimeGrid& target, std::span<const LocalTimeGrid> basis) {
  std::int64_t lo = target.min_site, hi = target.max_site();
  for (const auto& b : basis) {
    if (b.n_disc != target.n_disc) fail(ErrorCode::DegenerateInput, "projection_distance: spacing mismatch");
    lo = std::min(lo, b.min_site);
    hi = std::max(hi, b.max_site());
  }
  const auto rows = static_cast<Eigen::Index>(hi - lo + 1);
  const auto cols = static_cast<Eigen::Index>(basis.size());
  Eigen::VectorXd v(rows);
  Eigen::MatrixXd A(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    v(r) = target.value_at(lo + r);
    for (Eigen::Index c = 0; c < cols; ++c) A(r, c) = basis[static_cast<std::size_t>(c)].value_at(lo + r);
  }
  if (cols == 0) return std::sqrt(target.spacing * v.squaredNorm());
  const Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(A);
  const Eigen::VectorXd coef = qr.solve(v);
  const Eigen::VectorXd resid = v - A * coef;
  return std::sqrt(target.spacing * resid.squaredNorm());
}

GramSample increment_gram(std::span<const std::int32_t> path, std::span<const std::int64_t> bounds, std::int64_t n) {
  GramSample g;
  g.m = bounds.size();
  if (g.m == 0) fail(ErrorCode::InvalidArgument, "increment_gram: no bounds");
  std::int64_t prev = 0;
  for (auto b : bounds) {
    if (b <= prev || b > static_cast<std::int64_t>(path.size()))
      fail(ErrorCode::InvalidArgument, "increment_gram: bounds must increase within the path");
    prev = b;
    g.times.push_back(static_cast<double>(b) / static_cast<double>(n));
  }
  std::int32_t mn = path[0], mx = path[0];
  for (std::int64_t k = 0; k < bounds.back(); ++k) {
    mn = std::min(mn, path[static_cast<std::size_t>(k)]);
    mx = std::max(mx, path[static_cast<std::size_t>(k)]);
  }
  const auto width = static_cast<std::size_t>(mx - mn + 1);
  std::vector<std::int64_t> counts(width * g.m, 0);  // site-major
  std::size_t seg = 0;
  for (std::int64_t k = 0; k < bounds.back(); ++k) {
    while (k >= bounds[seg]) ++seg;
    ++counts[static_cast<std::size_t>(path[static_cast<std::size_t>(k)] - mn) * g.m + seg];
  }
  std::vector<__int128> acc(g.m * g.m, 0);
  for (std::size_t y = 0; y < width; ++y) {
    const std::int64_t* c = counts.data() + y * g.m;
    for (std::size_t i = 0; i < g.m; ++i) {
      if (c[i] == 0) continue;
      for (std::size_t j = i; j < g.m; ++j) acc[i * g.m + j] += static_cast<__int128>(c[i]) * c[j];
    }
  }
  const long double scale = std::pow(static_cast<long double>(n), -1.5L);
  g.matrix.assign(g.m * g.m, 0.0);
  for (std::size_t i = 0; i < g.m; ++i)
    for (std::size_t j = i; j < g.m; ++j) {
      const double v = static_cast<double>(static_cast<long double>(acc[i * g.m + j]) * scale);
      g.matrix[i * g.m + j] = v;
      g.matrix[j * g.m + i] = v;
    }
  g.det = ldlt_det(g.matrix, g.m, 1e-12, &g.clamped, &g.degenerate);
  return g;
}

InverseMomentReport l2_inverse_moment(std::int64_t n_disc, std::uint64_t budget, std::uint64_t seed,
                                      const BrownianOptions& options) {
  if (n_disc < 1) fail(ErrorCode::InvalidArgument, "l2_inverse_moment: n_disc must be >= 1");
  if (budget == 0) fail(ErrorCode::ZeroReps, "l2_inverse_moment: budget must be >= 1");
  const ModelConfig& model = simple_model();
  const std::size_t blocks = block_count(budget);
  const unsigned workers = resolve_workers(options.workers);
  std::vector<WalkWorkspace> spaces(workers);
  std::vector<PowerSums> sums(blocks);
  std::vector<std::uint64_t> degenerate(blocks, 0);
  std::vector<double> raw(budget);
  const StreamId base{seed, experiment_id("l2_inverse"), 0};
  const double scale = std::pow(static_cast<double>(n_disc), 0.75);
  for_each_block(blocks, workers, [&](std::size_t b, unsigned w) {
    WalkWorkspace& ws = spaces[w];
    ws.prepare(model, n_disc);
    PowerSums local;
    const std::uint64_t first = b * kReplicateBlock;
    const std::uint64_t last = std::min<std::uint64_t>(budget, first + kReplicateBlock);
    for (std::uint64_t r = first; r < last; ++r) {
      StepSource steps(model, base.with_replicate(r));
      ws.accumulate_counts(model, n_disc, steps);
      __int128 s2 = 0;
      for (std::int64_t y = ws.lo(); y <= ws.hi(); ++y) s2 += static_cast<__int128>(ws.count(y)) * ws.count(y);
      ws.clear_counts();
      const double v = scale / std::sqrt(static_cast<double>(s2));
      local.add(v);
      raw[r] = v;
    }
    sums[b] = local;
  });
  return finish_report("l2_inverse", n_disc, budget, seed, 0, sums, degenerate, raw, options);
}

std::pair<std::int64_t, std::int64_t> vk_cell_range(std::int64_t k) noexcept {
  return {-(k / 2), (k + 1) / 2 - 1};
}

double vk_distance_sq(const LocalTimeGrid& grid, std::int64_t k) {
  if (k < 1) fail(ErrorCode::InvalidArgument, "V_k needs k >= 1");
  const long double r = vk_residual(
      grid.min_site, grid.max_site(), [&](std::int64_t y) { return grid.count_at(y); }, grid.n_disc, k);
  if (r < 0) return -1.0;
  return static_cast<double>(r * std::pow(static_cast<long double>(grid.n_disc), -1.5L));
}

std::vector<InverseMomentReport> inverse_distance_moments(std::span<const std::int64_t> ks, std::int64_t n_disc,
                                                          std::uint64_t budget, std::uint64_t seed,
                                                          const BrownianOptions& options) {
  for (auto k : ks)
    if (k < 1) fail(ErrorCode::InvalidArgument, "V_k needs k >= 1");
  if (n_disc < 1) fail(ErrorCode::InvalidArgument, "n_disc must be >= 1");
  if (budget == 0) fail(ErrorCode::ZeroReps, "inverse_distance_moment_vk: budget must be >= 1");
  const ModelConfig& model = simple_model();
  const std::size_t nk = ks.size();
  const std::size_t blocks = block_count(budget);
  const unsigned workers = resolve_workers(options.workers);
  std::vector<WalkWorkspace> spaces(workers);
  std::vector<std::vector<PowerSums>> sums(nk, std::vector<PowerSums>(blocks));
  std::vector<std::vector<std::uint64_t>> degenerate(nk, std::vector<std::uint64_t>(blocks, 0));
  std::vector<std::vector<double>> raw(nk, std::vector<double>(budget));
  const StreamId base{seed, experiment_id("vk_distance"), 0};
  const long double scale = std::pow(static_cast<long double>(n_disc), 0.75L);
  for_each_block(blocks, workers, [&](std::size_t b, unsigned w) {
    WalkWorkspace& ws = spaces[w];
    ws.prepare(model, n_disc);
    std::vector<PowerSums> local(nk);
    std::vector<std::uint64_t> bad(nk, 0);
    const std::uint64_t first = b * kReplicateBlock;
    const std::uint64_t last = std::min<std::uint64_t>(budget, first + kReplicateBlock);
    for (std::uint64_t r = first; r < last; ++r) {
      StepSource steps(model, base.with_replicate(r));
      ws.accumulate_counts(model, n_disc, steps);
      for (std::size_t i = 0; i < nk; ++i) {
        const long double res =
            vk_residual(ws.lo(), ws.hi(), [&](std::int64_t y) { return ws.count(y); }, n_disc, ks[i]);
        if (res < 0) {
          ++bad[i];
          raw[i][r] = std::numeric_limits<double>::quiet_NaN();
          continue;
        }
        // d^{-1} = n^{3/4} residual^{-1/2}
        const double v = static_cast<double>(scale / std::sqrt(res));
        local[i].add(v);
        raw[i][r] = v;
      }
      ws.clear_counts();
    }
    for (std::size_t i = 0; i < nk; ++i) {
      sums[i][b] = local[i];
      degenerate[i][b] = bad[i];
    }
  });
  std::vector<InverseMomentReport> out;
  for (std::size_t i = 0; i < nk; ++i)
    out.push_back(finish_report("vk_inverse_distance", n_disc, budget, seed, ks[i], sums[i], degenerate[i], raw[i],
                                options));
  return out;
}

InverseMomentReport inverse_distance_moment_vk(std::int64_t k, std::int64_t n_disc, std::uint64_t budget,
                                               std::uint64_t seed, const BrownianOptions& options) {
  const std::int64_t ks[] = {k};
  return inverse_distance_moments(ks, n_disc, budget, seed, options).front();
}

double exponent_fit(std::span<const std::int64_t> ks, std::span<const InverseMomentReport> reports) {
  if (ks.size() != reports.size() || ks.size() < 2) fail(ErrorCode::InvalidArgument, "exponent_fit needs >= 2 points");
  std::vector<double> x, y;
  for (std::size_t i = 0; i < ks.size(); ++i) {
    if (!(reports[i].estimate.mean > 0)) fail(ErrorCode::DegenerateInput, "exponent_fit: non-positive estimate");
    x.push_back(std::log(static_cast<double>(ks[i])));
    y.push_back(std::log(reports[i].estimate.mean));
  }
  return least_squares(x, y).slope;
}

double simulate_delta_endpoint(std::int64_t n_disc, const StreamId& stream, double* conditional_variance) {
  if (n_disc < 1) fail(ErrorCode::InvalidArgument, "simulate_delta_endpoint: n_disc must be >= 1");
  const ModelConfig& model = simple_model();
  thread_local WalkWorkspace ws;
  ws.prepare(model, n_disc);
  StepSource steps(model, stream);
  ws.accumulate_counts(model, n_disc, steps);
  const CounterRng normals(stream, Purpose::Scenery);
  long double z = 0.0L, s2 = 0.0L;
  for (std::int64_t y = ws.lo(); y <= ws.hi(); ++y) {
    const std::int64_t c = ws.count(y);
    if (c == 0) continue;
    z += static_cast<long double>(c) * normal_at(normals, zigzag(y));
    s2 += static_cast<long double>(c) * c;
  }
  ws.clear_counts();
  const long double n = static_cast<long double>(n_disc);
  if (conditional_variance) *conditional_variance = static_cast<double>(s2 * std::pow(n, -1.5L));
  return static_cast<double>(z * std::pow(n, -0.75L));
}

std::vector<double> delta_endpoint_samples(std::int64_t n_disc, std::uint64_t count, std::uint64_t seed,
                                           const BrownianOptions& options) {
  if (count == 0) fail(ErrorCode::ZeroReps, "delta_endpoint_samples: count must be >= 1");
  std::vector<double> out(count);
  const StreamId base{seed, experiment_id("delta_endpoint"), 0};
  for_each_block(block_count(count), resolve_workers(options.workers), [&](std::size_t b, unsigned) {
    const std::uint64_t first = b * kReplicateBlock;
    const std::uint64_t last = std::min<std::uint64_t>(count, first + kReplicateBlock);
    for (std::uint64_t r = first; r < last; ++r) out[r] = simulate_delta_endpoint(n_disc, base.with_replicate(r));
  });
  return out;
}

std::string inverse_moment_csv(std::span<const InverseMomentReport> reports) {
  std::ostringstream os;
  os << "quantity,k,n_disc,budget,estimate,stderr,median_of_means,degenerate,seed\n";
  char buf[160];
  for (const auto& r : reports) {
    std::snprintf(buf, sizeof buf, ",%.17g,%.17g,%.17g,", r.estimate.mean, r.estimate.std_error, r.median_of_means);
    os << r.quantity << ',' << r.k << ',' << r.n_disc << ',' << r.budget << buf << r.degenerate << ',' << r.seed
       << '\n';
  }
  return os.str();
}

}  // namespace rwrs
