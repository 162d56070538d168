#pragma once

#include <array>
#include <cstdint>
#include <initializer_list>
#include <map>
#include <optional>
#include <span>
#include <vector>

namespace rwrs {

struct Rational {
  std::int64_t num = 0;
  std::int64_t den = 1;
};

struct Atom {
  std::int64_t value = 0;
  double mass = 0.0;
  std::optional<Rational> exact;  // set when the pmf was given as rationals
};

/// Finite-support pmf on the integers. Atoms are kept sorted by value.
class LatticePmf {
 public:
  /// (value, numerator, denominator) triples; masses must sum to exactly 1.
  static LatticePmf from_rationals(std::span<const std::array<std::int64_t, 3>> triples);
  static LatticePmf from_rationals(std::initializer_list<std::array<std::int64_t, 3>> triples);
  /// (value, mass) pairs; masses must sum to 1 within 1e-12.
  static LatticePmf from_doubles(std::span<const std::pair<std::int64_t, double>> pairs);

  std::span<const Atom> atoms() const noexcept { return atoms_; }
  std::size_t size() const noexcept { return atoms_.size(); }
  bool is_rational() const noexcept { return rational_; }

  double mean() const noexcept;
  double second_moment() const noexcept;
  std::int64_t max_abs() const noexcept;
  bool is_symmetric() const noexcept;

  /// Inverse-cdf lookup of a uniform 64-bit word.
  std::int64_t sample(std::uint64_t u) const noexcept {
    for (std::size_t i = 0; i + 1 < atoms_.size(); ++i) {
      if (u < thresholds_[i]) return atoms_[i].value;
    }
    return atoms_.back().value;
  }

 private:
  LatticePmf() = default;
  void finish();

  std::vector<Atom> atoms_;
  std::vector<std::uint64_t> thresholds_;
  bool rational_ = false;
};

struct PeriodicityInfo {
  std::int64_t d = 1;       // gcd of scenery support differences
  std::int64_t alpha = 0;   // a support point; values lie in alpha + dZ
  std::int64_t alpha0 = 0;  // alpha * alpha0 = 1 mod d (0 when d = 1)
};

/// Validated step/scenery pair. Immutable once built.
struct ModelConfig {
  LatticePmf step;
  LatticePmf scenery;
  double sigma_xi_sq = 0.0;
  PeriodicityInfo periodicity;

  bool is_rational() const noexcept { return step.is_rational() && scenery.is_rational(); }
  /// Step law is exactly P(+1) = P(-1) = 1/2 (enables the bitwise walker).
  bool simple_step() const noexcept;
  double sigma_xi() const noexcept;
  /// k * alpha mod d, in [0, d).
  std::int64_t residue(std::int64_t k) const noexcept;
  /// Whether Z_k = a is permitted by the lattice structure.
  bool congruent(std::int64_t k, std::int64_t a) const noexcept;
};

ModelConfig validate_model(LatticePmf step, LatticePmf scenery);
PeriodicityInfo derive_periodicity(const LatticePmf& scenery);

/// Simple symmetric walk with a centered Rademacher scenery.
ModelConfig rademacher_model();

/// Finitely supported observable a -> f(a).
using Observable = std::map<std::int64_t, double>;

double observable_sum(const Observable& f) noexcept;
Observable indicator_difference(std::int64_t a, std::int64_t b);  // delta_a - delta_b

std::int64_t floor_mod(std::int64_t x, std::int64_t m) noexcept;

}  // namespace rwrs
