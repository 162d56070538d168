#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "rwrs/lattice_model.hpp"

namespace rwrs {

/// Exact law of Z_k as a map value -> rational mass.
struct ExactPmf {
  std::int64_t k = 0;
  std::map<std::int64_t, mpq_class> atoms;

  mpq_class at(std::int64_t value) const;
  double probability(std::int64_t value) const { return at(value).get_d(); }
  mpq_class total() const;
};

/// Largest k the enumeration accepts by default: 20 for binary steps, and
/// about 2^20 paths for wider step laws.
int default_exact_cap(const ModelConfig& model) noexcept;

/// Enumerates walk paths of length k grouped by their local-time profile and
/// mixes the exact pushforward convolutions of the scenery. cap < 0 selects
/// default_exact_cap.
ExactPmf exact_Z_pmf(const ModelConfig& model, std::int64_t k, int cap = -1);

/// Laws of Z_0..Z_kmax from a single enumeration pass.
std::vector<ExactPmf> exact_Z_pmfs_upto(const ModelConfig& model, std::int64_t kmax, int cap = -1);

/// Per-path, per-scenery brute force. Independent of the grouped route; only
/// meant for small k.
ExactPmf exact_Z_pmf_naive(const ModelConfig& model, std::int64_t k);

/// P(Z_{t_1} = a_1, ..., Z_{t_j} = a_j) for non-decreasing times.
mpq_class exact_joint_prob(const ModelConfig& model, std::span<const std::int64_t> times,
                           std::span<const std::int64_t> values, int cap = -1);

/// sum over a in k*alpha + dZ and b of f(a) f(b) P(Z_ell = b - a).
double A_coefficient(const ModelConfig& model, const Observable& f, std::int64_t k, std::int64_t ell, int cap = -1);

/// Same sum evaluated against an already computed law of Z_ell.
double A_coefficient(const ModelConfig& model, const Observable& f, std::int64_t k, const ExactPmf& law);

/// CSV rows "value,numerator,denominator" with header.
std::string exact_pmf_csv(const ExactPmf& pmf);

}  // namespace rwrs
