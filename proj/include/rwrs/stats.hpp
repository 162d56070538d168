#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

namespace rwrs {

/// Sum in a fixed binary-tree order so results never depend on how the
/// inputs were produced.
double pairwise_sum(std::span<const double> values) noexcept;

/// Power sums of a sample up to degree 8 (moments to order 4 with stderr).
struct PowerSums {
  static constexpr int kMaxPower = 8;

  std::uint64_t count = 0;
  std::array<double, kMaxPower + 1> sums{};

  void add(double y) noexcept;
  void merge(const PowerSums& other) noexcept;
};

/// Pairwise reduction over blocks in index order.
PowerSums reduce_pairwise(std::span<const PowerSums> blocks);

struct Estimate {
  double mean = 0.0;
  double variance = 0.0;  // sample variance of the per-replicate values
  double std_error = 0.0;
  std::uint64_t count = 0;
};

/// Mean of y^order with its standard error (order <= 4).
Estimate moment_estimate(const PowerSums& sums, int order);

/// Estimate from raw values (pairwise sums of y and y^2).
Estimate estimate_from_samples(std::span<const double> values);

/// Median of `groups` block means (blocks contiguous in sample order).
double median_of_means(std::span<const double> values, int groups);

double median(std::vector<double> values);

/// Two-sample Kolmogorov-Smirnov statistic sup |F_a - F_b|.
double ks_two_sample(std::vector<double> a, std::vector<double> b);

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
};

LinearFit least_squares(std::span<const double> x, std::span<const double> y);

}  // namespace rwrs
