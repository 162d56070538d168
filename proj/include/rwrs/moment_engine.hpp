#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "rwrs/stats.hpp"

namespace rwrs {

inline constexpr double kGammaQuarter = 3.6256099082219083119;  // Gamma(1/4)

/// a_m = integral over 0 < t_1 < ... < t_m < 1 of prod (t_{k+1} - t_k)^{-3/4}
///     = Gamma(1/4)^m / Gamma(m/4 + 1).
double simplex_integral(int m);

/// m! a_m.
double simplex_closed_form(int m);

/// a_{m+1} / a_m from the Beta step Gamma(1/4) Gamma(m/4 + 1) / Gamma((m+1)/4 + 1).
double simplex_beta_step(int m);

struct SimplexCheck {
  int m = 0;
  std::uint64_t samples = 0;
  double estimate = 0.0;  // of m! a_m
  double std_error = 0.0;
};

/// Gaps x = u^4 with u uniform on the cube: m! 4^m P(sum u_i^4 < 1).
SimplexCheck simplex_mc_cube(int m, std::uint64_t samples, std::uint64_t seed, unsigned workers = 0);

/// Importance sampling from Dirichlet(1/3, ..., 1/3; 1) gaps.
SimplexCheck simplex_mc_dirichlet(int m, std::uint64_t samples, std::uint64_t seed, unsigned workers = 0);

struct Sandwich {
  double lower = 0.0;
  double lower_std_error = 0.0;
  double upper = 0.0;              // proxy: fixed V_j family instead of the sup
  double upper_std_error = 0.0;
  bool upper_is_proxy = true;
};

struct MomentEstimate {
  int m = 0;
  double value = 0.0;        // E[L_1(0)^m]
  double std_error = 0.0;
  double simplex_factor = 0.0;     // m! / (2 pi sigma^2)^{m/2}
  double det_moment_factor = 0.0;  // integral of E[det D^{-1/2}] over the simplex
  double det_moment_std_error = 0.0;
  double sigma_xi = 1.0;
  std::int64_t n_disc = 0;
  std::uint64_t paths = 0;
  std::uint64_t tuples_per_path = 0;
  std::uint64_t degenerate = 0;
  std::optional<Sandwich> sandwich;
};

struct MomentOptions {
  unsigned workers = 0;
};

/// Monte Carlo of m!/(2 pi sigma^2)^{m/2} times the simplex integral of
/// E[det D_t^{-1/2}]. Brownian scaling fixes t_m = 1; each path carries
/// `simplex_budget` tuples of symmetric Dirichlet(1/4) gaps, rounded to
/// distinct walk steps.
MomentEstimate ks_local_time_moment(int m, double sigma_xi, std::uint64_t simplex_budget, std::uint64_t path_budget,
                                    std::int64_t n_disc, std::uint64_t seed, const MomentOptions& options = {});

struct SandwichComponents {
  std::optional<Estimate> l2_inverse;  // E[|L_1|^{-1}]
  std::vector<Estimate> vk_inverse;    // E[d(L_1, V_j)^{-1}] for j = 1, 2, ...
};

/// lower = E[|L_1|^{-1}]^m simplex / (2 pi sigma^2)^{m/2};
/// upper = E[|L_1|^{-1}] prod_{j<m} E[d(L_1, V_j)^{-1}] simplex / (2 pi sigma^2)^{m/2}.
Sandwich moment_sandwich(int m, double sigma_xi, const SandwichComponents& components);

struct CarlemanSeries {
  std::vector<double> partial;    // sum_{m <= M} value(m)^{-1/(2m)}
  std::vector<double> companion;  // sum_{m <= M} m^{-5/8 - eta0}
  double growth_exponent = 0.0;   // slope of log partial vs log M over the second half
};

CarlemanSeries carleman_partial(std::span<const double> values, double eta0 = 0.01);

/// a^m (m!)^{3/2 + eta0} / Gamma(m/4 + 1), in log form.
double log_moment_upper_bound(int m, double a, double eta0);

/// lower(m)^{1/m} / m^{3/4}; bounded away from 0 and infinity along (C m)^{3m/4} growth.
double growth_ratio(int m, double value);

std::string moment_csv(std::span<const MomentEstimate> rows);

}  // namespace rwrs
