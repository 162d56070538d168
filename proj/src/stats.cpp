#include "rwrs/stats.hpp"

#include <algorithm>
#include <cmath>

#include "rwrs/error.hpp"

namespace rwrs {

double pairwise_sum(std::span<const double> values) noexcept {
  if (values.size() <= 8) {
    double s = 0.0;
    for (double v : values) s += v;
    return s;
  }
  const std::size_t half = values.size() / 2;
  return pairwise_sum(values.first(half)) + pairwise_sum(values.subspan(half));
}

void PowerSums::add(double y) noexcept {
  ++count;
  double p = 1.0;
  for (int j = 1; j <= kMaxPower; ++j) {
    p *= y;
    sums[j] += p;
  }
}

void PowerSums::merge(const PowerSums& other) noexcept {
  count += other.count;
  for (int j = 1; j <= kMaxPower; ++j) sums[j] += other.sums[j];
}

PowerSums reduce_pairwise(std::span<const PowerSums> blocks) {
  if (blocks.empty()) return {};
  if (blocks.size() == 1) return blocks[0];
  const std::size_t half = blocks.size() / 2;
  PowerSums left = reduce_pairwise(blocks.first(half));
  left.merge(reduce_pairwise(blocks.subspan(half)));
  return left;
}

Estimate moment_estimate(const PowerSums& s, int order) {
  if (order < 1 || 2 * order > PowerSums::kMaxPower) {
    fail(ErrorCode::InvalidArgument, "moment order must be in [1, 4]");
  }
  Estimate e;
  e.count = s.count;
  if (s.count == 0) return e;
  const double n = static_cast<double>(s.count);
  e.mean = s.sums[order] / n;
  if (s.count > 1) {
    const double second = s.sums[2 * order] / n;
    e.variance = std::max(0.0, (second - e.mean * e.mean) * n / (n - 1.0));
    e.std_error = std::sqrt(e.variance / n);
  }
  return e;
}

Estimate estimate_from_samples(std::span<const double> values) {
  Estimate e;
  e.count = values.size();
  if (values.empty()) return e;
  const double n = static_cast<double>(values.size());
  e.mean = pairwise_sum(values) / n;
  if (values.size() > 1) {
    std::vector<double> sq(values.size());
    for (std::size_t i = 0; i < values.size(); ++i) {
      const double d = values[i] - e.mean;
      sq[i] = d * d;
    }
    e.variance = pairwise_sum(sq) / (n - 1.0);
    e.std_error = std::sqrt(e.variance / n);
  }
  return e;
}

double median(std::vector<double> values) {
  if (values.empty()) fail(ErrorCode::InvalidArgument, "median of empty sample");
  const std::size_t mid = values.size() / 2;
  std::nth_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(mid), values.end());
  const double hi = values[mid];
  if (values.size() % 2 == 1) return hi;
  const double lo = *std::max_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(mid));
  return 0.5 * (lo + hi);
}

double median_of_means(std::span<const double> values, int groups) {
  if (values.empty() || groups < 1) fail(ErrorCode::InvalidArgument, "median_of_means needs data");
  const std::size_t g = std::min<std::size_t>(static_cast<std::size_t>(groups), values.size());
  std::vector<double> means;
  means.reserve(g);
  for (std::size_t i = 0; i < g; ++i) {
    const std::size_t lo = i * values.size() / g;
    const std::size_t hi = (i + 1) * values.size() / g;
    means.push_back(pairwise_sum(values.subspan(lo, hi - lo)) / static_cast<double>(hi - lo));
  }
  return median(std::move(means));
}

double ks_two_sample(std::vector<double> a, std::vector<double> b) {
  if (a.empty() || b.empty()) fail(ErrorCode::InvalidArgument, "KS statistic needs two nonempty samples");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  std::size_t i = 0, j = 0;
  double best = 0.0;
  while (i < a.size() && j < b.size()) {
    const double x = std::min(a[i], b[j]);
    while (i < a.size() && a[i] <= x) ++i;
    while (j < b.size() && b[j] <= x) ++j;
    best = std::max(best, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
  }
  return best;
}

LinearFit least_squares(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) fail(ErrorCode::InvalidArgument, "least_squares needs >= 2 points");
  const double n = static_cast<double>(x.size());
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (sxx == 0.0) fail(ErrorCode::InvalidArgument, "least_squares with constant abscissa");
  LinearFit f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  return f;
}

}  // namespace rwrs
