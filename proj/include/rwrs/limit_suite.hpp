#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "rwrs/lattice_model.hpp"
#include "rwrs/stats.hpp"

namespace rwrs {

struct ConvergenceRow {
  std::int64_t n = 0;
  std::string statistic;
  double value = 0.0;
  double std_error = 0.0;
  std::uint64_t reps = 0;
  double target = 0.0;
  double target_std_error = 0.0;
  std::string provenance;  // module that produced the target
  bool congruence_zero = false;
};

struct ConvergenceTable {
  std::string experiment;
  std::vector<ConvergenceRow> rows;

  const ConvergenceRow* find(std::int64_t n, const std::string& statistic) const;
};

/// Long format: n,statistic,value,stderr,reps,target,target_stderr,provenance.
std::string convergence_csv(const ConvergenceTable& table);

/// Limit constants produced elsewhere. Moments of L_1(0) are the sigma-free
/// ones (sigma_xi = 1 in the moment formula); targets apply sigma_xi.
struct LimitTargets {
  std::vector<Estimate> local_time_moments;  // index j - 1 holds E[L_1(0)^j]
  std::optional<Estimate> l2_inverse;        // E[|L_1|^{-1}]
  std::optional<Estimate> sigma2_f;          // Green-Kubo variance of f
};

struct LimitOptions {
  unsigned workers = 0;
};

/// Moments of n^{-1/4} sum_{k<n} f(Z_k) against (sum f)^j sigma^{-j} E[L^j].
ConvergenceTable lln_experiment(const ModelConfig& model, const Observable& f, std::span<const std::int64_t> n_list,
                                std::uint64_t reps, int max_moment, std::uint64_t seed, const LimitTargets& targets,
                                const LimitOptions& options = {});

/// Moments of n^{-1/8} sum_{k<n} f(Z_k); even targets
/// (2N)!/(N! 2^N) (sigma2_f / sigma)^N E[L^N], odd targets 0.
ConvergenceTable clt_experiment(const ModelConfig& model, const Observable& f, std::span<const std::int64_t> n_list,
                                std::uint64_t reps, int max_moment, std::uint64_t seed, const LimitTargets& targets,
                                const LimitOptions& options = {});

/// n^{3/4} P(Z_n = a) against d E[|L_1|^{-1}] / (sqrt(2 pi) sigma). Levels
/// outside n alpha + dZ give congruence-zero rows.
ConvergenceTable local_limit_check(const ModelConfig& model, std::span<const std::int64_t> a_list,
                                   std::span<const std::int64_t> n_list, std::uint64_t reps, std::uint64_t seed,
                                   const LimitTargets& targets, const LimitOptions& options = {});

/// n^{3/2} P(Z_{n/2} = a1, Z_n = a2) against d^2 E[det D_{1/2,1}^{-1/2}] / (2 pi sigma^2).
/// `det_moment` is the Brownian factor E[det D_{1/2,1}^{-1/2}].
ConvergenceTable two_time_local_limit(const ModelConfig& model, std::int64_t a1, std::int64_t a2,
                                      std::span<const std::int64_t> n_list, std::uint64_t reps, std::uint64_t seed,
                                      std::optional<Estimate> det_moment, const LimitOptions& options = {});

/// E[det D_{t_1..t_m}^{-1/2}] at fixed times from simple-walk paths of n_disc steps.
Estimate fixed_time_det_moment(std::span<const double> times, std::int64_t n_disc, std::uint64_t paths,
                               std::uint64_t seed, unsigned workers = 0);

/// f~(k) = g(scenery at the particle) h(Z_k); g is 1 or the indicator xi_{S_k} = value.
struct RatioObservable {
  Observable h;
  std::optional<std::int64_t> xi_equals;

  double integral(const ModelConfig& model) const;
  std::string name() const;
};

struct RatioPath {
  std::vector<double> ratios;  // per checkpoint; NaN when N_n(0) = 0
};

struct RatioResult {
  ConvergenceTable table;               // median over paths per checkpoint
  std::vector<std::int64_t> checkpoints;
  std::vector<RatioPath> paths;
};

/// Per-path sum_{k<n} f~(k) / N_n(0) at checkpoints (powers of 4 up to n, and n).
RatioResult ratio_ergodic_experiment(const ModelConfig& model, const RatioObservable& f, std::int64_t n,
                                     std::uint64_t paths, std::uint64_t seed, const LimitOptions& options = {});

/// KS distance between n^{-3/4} Z_n / sigma and Delta_1 draws for each n.
ConvergenceTable functional_limit_check(const ModelConfig& model, std::span<const std::int64_t> n_list,
                                        std::uint64_t reps, std::int64_t n_disc, std::uint64_t seed,
                                        const LimitOptions& options = {});

/// Endpoint samples n^{-3/4} Z_n / sigma_xi.
std::vector<double> scaled_endpoint_samples(const ModelConfig& model, std::int64_t n, std::uint64_t reps,
                                            std::uint64_t seed, unsigned workers = 0);

double double_factorial_ratio(int N);  // (2N)! / (N! 2^N)

}  // namespace rwrs
