#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "rwrs/rng.hpp"
#include "rwrs/stats.hpp"

namespace rwrs {

/// Walk approximation of x -> L_t(x): value at grid site y is
/// n^{-1/2} N_{floor(t n)}(y), sitting at x = y n^{-1/2}.
struct LocalTimeGrid {
  std::int64_t n_disc = 0;
  double spacing = 0.0;        // n_disc^{-1/2}
  double time_fraction = 0.0;  // floor(t n_disc) / n_disc
  std::int64_t min_site = 0;
  std::vector<std::int64_t> counts;

  double value_at(std::int64_t site) const noexcept;
  std::int64_t count_at(std::int64_t site) const noexcept;
  std::int64_t max_site() const noexcept { return min_site + static_cast<std::int64_t>(counts.size()) - 1; }
  /// Sum of value * spacing.
  double occupation() const noexcept;
  /// |L_t|^2 in L^2(R).
  double l2_norm_sq() const noexcept;
};

/// Profiles at each time fraction along one simple-walk path of n_disc steps.
std::vector<LocalTimeGrid> sample_local_time_grid(std::int64_t n_disc, std::span<const double> times,
                                                  const StreamId& stream);

struct GramSample {
  std::vector<double> times;
  std::size_t m = 0;
  std::vector<double> matrix;  // row-major m x m
  double det = 0.0;
  bool clamped = false;        // round-off produced a negative pivot
  bool degenerate = false;     // a pivot fell below 1e-12 trace

  double at(std::size_t i, std::size_t j) const { return matrix[i * m + j]; }
};

/// Determinant by diagonally pivoted LDL^T with pivot tolerance tol_rel * trace.
/// Pivots below tolerance end the factorization with det = 0.
double ldlt_det(std::span<const double> matrix, std::size_t m, double tol_rel = 1e-12, bool* clamped = nullptr,
                bool* degenerate = nullptr);

/// D_ij = spacing * sum_y value_i(y) value_j(y) and its determinant.
GramSample gram_det(std::span<const LocalTimeGrid> grids);

/// L^2 distance from `target` to span(basis), by least squares on the grid.
double projection_distance(const LocalTimeGrid& target, std::span<const LocalTimeGrid> basis);

/// Gram of the local-time increments over [b_{j-1}, b_j) (b_0 = 0) of one
/// path, scaled by n^{-3/2}. Its determinant equals that of D at t_j = b_j / n.
GramSample increment_gram(std::span<const std::int32_t> path, std::span<const std::int64_t> bounds, std::int64_t n);

/// Positions S_0..S_{n-1} of one simple-walk path.
std::vector<std::int32_t> sample_walk_path(std::int64_t n, const StreamId& stream);

struct BrownianOptions {
  unsigned workers = 0;
  int mom_groups = 10;  // median-of-means groups
  bool keep_samples = false;
};

struct InverseMomentReport {
  std::string quantity;
  std::int64_t n_disc = 0;
  std::uint64_t budget = 0;
  std::uint64_t seed = 0;
  std::int64_t k = 0;               // 0 for |L_1|^{-1}
  Estimate estimate;                // plain mean over non-degenerate samples
  double median_of_means = 0.0;
  std::uint64_t degenerate = 0;     // samples excluded for zero distance
  std::vector<double> samples;      // non-degenerate samples, replicate order
};

/// E[|L_1|_{L^2}^{-1}] with |L_1|^{-1} = n^{3/4} (sum_y N_n(y)^2)^{-1/2}.
InverseMomentReport l2_inverse_moment(std::int64_t n_disc, std::uint64_t budget, std::uint64_t seed,
                                      const BrownianOptions& options = {});

/// Cell index range [-floor(k/2), ceil(k/2) - 1] of V_k.
std::pair<std::int64_t, std::int64_t> vk_cell_range(std::int64_t k) noexcept;

/// Squared distance from a counted profile to V_k. Returns a negative value
/// when the profile lies in V_k exactly.
double vk_distance_sq(const LocalTimeGrid& grid, std::int64_t k);

/// E[d(L_1, V_k)^{-1}] for every k in `ks`, all from the same paths.
std::vector<InverseMomentReport> inverse_distance_moments(std::span<const std::int64_t> ks, std::int64_t n_disc,
                                                          std::uint64_t budget, std::uint64_t seed,
                                                          const BrownianOptions& options = {});

InverseMomentReport inverse_distance_moment_vk(std::int64_t k, std::int64_t n_disc, std::uint64_t budget,
                                               std::uint64_t seed, const BrownianOptions& options = {});

/// Least-squares slope of log(estimate) against log(k).
double exponent_fit(std::span<const std::int64_t> ks, std::span<const InverseMomentReport> reports);

/// One draw of Delta_1 = n^{-3/4} sum_y N_n(y) g_y with g_y standard normals
/// attached to sites. `conditional_variance` receives |L_1|^2_{L^2}.
double simulate_delta_endpoint(std::int64_t n_disc, const StreamId& stream, double* conditional_variance = nullptr);

std::vector<double> delta_endpoint_samples(std::int64_t n_disc, std::uint64_t count, std::uint64_t seed,
                                           const BrownianOptions& options = {});

std::string inverse_moment_csv(std::span<const InverseMomentReport> reports);

}  // namespace rwrs
