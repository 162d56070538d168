#include "rwrs/lattice_model.hpp"

#include <gmpxx.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "rwrs/error.hpp"

namespace rwrs {

namespace {

// Largest threshold representable below 2^64 for a cumulative mass in [0, 1].
std::uint64_t threshold_from(long double cum) {
  if (cum >= 1.0L) return std::numeric_limits<std::uint64_t>::max();
  return static_cast<std::uint64_t>(std::ldexp(cum, 64));
}

std::int64_t support_gcd(const LatticePmf& pmf) {
  std::int64_t g = 0;
  for (const auto& a : pmf.atoms()) g = std::gcd(g, a.value < 0 ? -a.value : a.value);
  return g;
}

std::int64_t mod_inverse(std::int64_t a, std::int64_t m) {
  std::int64_t old_r = floor_mod(a, m), r = m, old_s = 1, s = 0;
  while (r != 0) {
    const std::int64_t q = old_r / r;
    std::tie(old_r, r) = std::pair{r, old_r - q * r};
    std::tie(old_s, s) = std::pair{s, old_s - q * s};
  }
  if (old_r != 1) fail(ErrorCode::SupportDoesNotGenerateZ, "alpha is not invertible modulo d");
  return floor_mod(old_s, m);
}

}  // namespace

std::int64_t floor_mod(std::int64_t x, std::int64_t m) noexcept {
  const std::int64_t r = x % m;
  return r < 0 ? r + m : r;
}

LatticePmf LatticePmf::from_rationals(std::initializer_list<std::array<std::int64_t, 3>> triples) {
  return from_rationals(std::span<const std::array<std::int64_t, 3>>(triples.begin(), triples.size()));
}

LatticePmf LatticePmf::from_rationals(std::span<const std::array<std::int64_t, 3>> triples) {
  LatticePmf pmf;
  pmf.rational_ = true;
  mpq_class total = 0;
  for (const auto& [value, num, den] : triples) {
    if (den <= 0 || num <= 0) {
      fail(ErrorCode::InvalidPmf, "mass of atom " + std::to_string(value) + " must be a positive fraction");
    }
    mpq_class q(static_cast<long>(num), static_cast<unsigned long>(den));
    q.canonicalize();
    total += q;
    pmf.atoms_.push_back({value, q.get_d(),
                          Rational{static_cast<std::int64_t>(q.get_num().get_si()),
                                   static_cast<std::int64_t>(q.get_den().get_si())}});
  }
  if (total != 1) fail(ErrorCode::InvalidPmf, "masses sum to " + total.get_str() + ", not 1");
  pmf.finish();
  return pmf;
}

LatticePmf LatticePmf::from_doubles(std::span<const std::pair<std::int64_t, double>> pairs) {
  LatticePmf pmf;
  long double total = 0;
  for (const auto& [value, mass] : pairs) {
    if (!(mass > 0.0) || !std::isfinite(mass)) {
      fail(ErrorCode::InvalidPmf, "mass of atom " + std::to_string(value) + " must be positive");
    }
    total += mass;
    pmf.atoms_.push_back({value, mass, std::nullopt});
  }
  if (std::abs(total - 1.0L) > 1e-12L) fail(ErrorCode::InvalidPmf, "masses do not sum to 1");
  pmf.finish();
  return pmf;
}

void LatticePmf::finish() {
  if (atoms_.empty()) fail(ErrorCode::InvalidPmf, "empty support");
  std::sort(atoms_.begin(), atoms_.end(), [](const Atom& a, const Atom& b) { return a.value < b.value; });
  for (std::size_t i = 1; i < atoms_.size(); ++i) {
    if (atoms_[i].value == atoms_[i - 1].value) {
      fail(ErrorCode::InvalidPmf, "duplicate atom " + std::to_string(atoms_[i].value));
    }
  }
  thresholds_.clear();
  long double cum = 0;
  mpq_class exact_cum = 0;
  for (const auto& a : atoms_) {
    if (a.exact) {
      exact_cum += mpq_class(static_cast<long>(a.exact->num), static_cast<unsigned long>(a.exact->den));
      // floor(cum * 2^64) computed exactly
      mpz_class scaled = exact_cum.get_num() * (mpz_class(1) << 64) / exact_cum.get_den();
      thresholds_.push_back(scaled >= (mpz_class(1) << 64) ? std::numeric_limits<std::uint64_t>::max()
                                                            : std::stoull(scaled.get_str()));
    } else {
      cum += a.mass;
      thresholds_.push_back(threshold_from(cum));
    }
  }
}

double LatticePmf::mean() const noexcept {
  long double m = 0;
  for (const auto& a : atoms_) m += static_cast<long double>(a.value) * a.mass;
  return static_cast<double>(m);
}

double LatticePmf::second_moment() const noexcept {
  long double m = 0;
  for (const auto& a : atoms_) m += static_cast<long double>(a.value) * a.value * a.mass;
  return static_cast<double>(m);
}

std::int64_t LatticePmf::max_abs() const noexcept {
  std::int64_t m = 0;
  for (const auto& a : atoms_) m = std::max(m, a.value < 0 ? -a.value : a.value);
  return m;
}

bool LatticePmf::is_symmetric() const noexcept {
  const std::size_t n = atoms_.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Atom& lo = atoms_[i];
    const Atom& hi = atoms_[n - 1 - i];
    if (lo.value != -hi.value) return false;
    if (lo.exact && hi.exact) {
      if (lo.exact->num != hi.exact->num || lo.exact->den != hi.exact->den) return false;
    } else if (lo.mass != hi.mass) {
      return false;
    }
  }
  return true;
}

bool ModelConfig::simple_step() const noexcept {
  const auto a = step.atoms();
  return a.size() == 2 && a[0].value == -1 && a[1].value == 1 && a[0].exact && a[1].exact &&
         a[0].exact->num == 1 && a[0].exact->den == 2 && a[1].exact->num == 1 && a[1].exact->den == 2;
}

double ModelConfig::sigma_xi() const noexcept { return std::sqrt(sigma_xi_sq); }

std::int64_t ModelConfig::residue(std::int64_t k) const noexcept {
  const std::int64_t d = periodicity.d;
  return floor_mod(floor_mod(k, d) * floor_mod(periodicity.alpha, d), d);
}

bool ModelConfig::congruent(std::int64_t k, std::int64_t a) const noexcept {
  return floor_mod(a, periodicity.d) == residue(k);
}

PeriodicityInfo derive_periodicity(const LatticePmf& scenery) {
  const auto atoms = scenery.atoms();
  PeriodicityInfo info;
  std::int64_t d = 0;
  for (const auto& a : atoms) {
    const std::int64_t diff = a.value - atoms.front().value;
    d = std::gcd(d, diff < 0 ? -diff : diff);
  }
  // A single atom is a point mass; every difference is 0 and any d works.
  info.d = d == 0 ? 1 : d;
  info.alpha = atoms.front().value;
  for (const auto& a : atoms) {
    const auto abs_a = a.value < 0 ? -a.value : a.value;
    const auto abs_best = info.alpha < 0 ? -info.alpha : info.alpha;
    if (abs_a < abs_best || (abs_a == abs_best && a.value > info.alpha)) info.alpha = a.value;
  }
  info.alpha0 = info.d == 1 ? 0 : mod_inverse(info.alpha, info.d);
  return info;
}

ModelConfig validate_model(LatticePmf step, LatticePmf scenery) {
  auto centered = [](const LatticePmf& pmf) {
    if (pmf.is_rational()) {
      mpq_class m = 0;
      for (const auto& a : pmf.atoms()) {
        m += mpq_class(static_cast<long>(a.exact->num), static_cast<unsigned long>(a.exact->den)) *
             static_cast<long>(a.value);
      }
      return m == 0;
    }
    return std::abs(pmf.mean()) <= 1e-12 * std::max<double>(1.0, static_cast<double>(pmf.max_abs()));
  };
  if (!centered(step)) fail(ErrorCode::NotCentered, "step distribution has nonzero mean");
  if (!centered(scenery)) fail(ErrorCode::NotCentered, "scenery distribution has nonzero mean");
  if (support_gcd(step) != 1) fail(ErrorCode::SupportDoesNotGenerateZ, "step support does not generate Z");
  if (support_gcd(scenery) != 1) {
    // A centered single atom must be 0, whose gcd is 0: report it as degenerate.
    if (scenery.size() == 1) fail(ErrorCode::ZeroVariance, "scenery is a point mass");
    fail(ErrorCode::SupportDoesNotGenerateZ, "scenery support does not generate Z");
  }
  ModelConfig model{std::move(step), std::move(scenery), 0.0, {}};
  model.sigma_xi_sq = model.scenery.second_moment();
  if (!(model.sigma_xi_sq > 0.0)) fail(ErrorCode::ZeroVariance, "scenery variance is zero");
  model.periodicity = derive_periodicity(model.scenery);
  return model;
}

ModelConfig rademacher_model() {
  return validate_model(LatticePmf::from_rationals({{-1, 1, 2}, {1, 1, 2}}),
                        LatticePmf::from_rationals({{-1, 1, 2}, {1, 1, 2}}));
}

double observable_sum(const Observable& f) noexcept {
  long double s = 0;
  for (const auto& [a, v] : f) s += v;
  return static_cast<double>(s);
}

Observable indicator_difference(std::int64_t a, std::int64_t b) {
  if (a == b) return {};
  return Observable{{a, 1.0}, {b, -1.0}};
}

}  // namespace rwrs
