#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "rwrs/exact_oracle.hpp"
#include "rwrs/lattice_model.hpp"

namespace rwrs {

enum class BlockSource { Exact, MonteCarlo };

const char* to_string(BlockSource source) noexcept;

/// One d-block of the Green-Kubo series:
///   sum_{l'=0}^{d-1} sum_{a,b} f(a) f(b) P(Z_{|l' + d k|} = a - b).
struct BlockValue {
  std::int64_t k = 0;
  double value = 0.0;
  BlockSource source = BlockSource::Exact;
  double std_error = 0.0;
};

struct GreenKuboOptions {
  std::int64_t exact_horizon = 9;   // blocks |k| <= this are exact
  std::int64_t mc_horizon = 60;     // blocks exact_horizon < |k| <= this are Monte Carlo
  std::uint64_t mc_budget = 200000; // trajectories shared by all Monte Carlo blocks
  std::uint64_t seed = 1;
  bool enforce_centered = true;
  unsigned workers = 0;
  int cap = -1;
};

struct GreenKuboResult {
  double sigma2 = 0.0;          // sum of the computed blocks, ascending |k|
  double sigma2_std_error = 0.0;
  std::vector<BlockValue> blocks;  // in summation order 0, -1, 1, -2, 2, ...
  std::int64_t truncation_index = 0;
  double tail_estimate = 0.0;   // fitted remainder beyond truncation_index
  double tail_exponent = 0.0;   // p in |block(j) + block(-j)| ~ c j^{-p}
  bool tail_converged = false;  // false when the fit gives p <= 1
  bool centered = true;
};

/// x -> sum_a f(a) f(a - x): the weight of P(Z_j = x) in every lag term.
Observable lag_kernel(const Observable& f);

/// Lag indices |l' + d k| of block k.
std::vector<std::int64_t> block_lags(const ModelConfig& model, std::int64_t k);

/// Exact block from precomputed laws of Z_0..Z_cap.
double block_term_exact(const ModelConfig& model, const Observable& f, std::int64_t k,
                        const std::vector<ExactPmf>& laws);

/// Exact when every lag is within the oracle cap, Monte Carlo otherwise.
BlockValue block_term(const ModelConfig& model, const Observable& f, std::int64_t k,
                      const GreenKuboOptions& options = {});

GreenKuboResult sigma2_f(const ModelConfig& model, const Observable& f, const GreenKuboOptions& options = {});

/// sigma^2_{0,a}: the series for delta_0 - delta_a.
GreenKuboResult sigma2_0a(const ModelConfig& model, std::int64_t a, const GreenKuboOptions& options = {});

/// CSV rows k,value,source,stderr.
std::string green_kubo_csv(const GreenKuboResult& result);

}  // namespace rwrs
