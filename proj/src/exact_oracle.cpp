#include "rwrs/exact_oracle.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <unordered_map>

#include "rwrs/error.hpp"

namespace rwrs {

namespace {

using Law = std::map<std::int64_t, mpq_class>;

mpq_class exact_mass(const Atom& a) {
  if (!a.exact) fail(ErrorCode::NonRationalModel, "exact enumeration needs rational masses");
  return mpq_class(static_cast<long>(a.exact->num), static_cast<unsigned long>(a.exact->den));
}

void require_rational(const ModelConfig& model) {
  if (!model.is_rational()) fail(ErrorCode::NonRationalModel, "exact enumeration needs rational masses");
}

int resolve_cap(const ModelConfig& model, int cap) { return cap < 0 ? default_exact_cap(model) : cap; }

void check_cap(std::int64_t k, int cap) {
  if (k < 0) fail(ErrorCode::InvalidArgument, "negative time index");
  if (k > cap) fail(ErrorCode::CapExceeded, "k = " + std::to_string(k) + " exceeds cap " + std::to_string(cap));
}

Law convolve(const Law& a, const Law& b) {
  Law out;
  for (const auto& [x, p] : a) {
    for (const auto& [y, q] : b) out[x + y] += p * q;
  }
  return out;
}

Law point_mass(std::int64_t x) { return Law{{x, mpq_class(1)}}; }

/// Law of sum_c c * (xi_1 + ... + xi_{m_c}) for a visit-count histogram.
class ProfileConvolver {
 public:
  explicit ProfileConvolver(const LatticePmf& scenery) {
    for (const auto& a : scenery.atoms()) xi_[a.value] = exact_mass(a);
    powers_.push_back(point_mass(0));
  }

  /// hist[c] = number of sites visited exactly c times (index 0 unused).
  const Law& law(const std::string& key, std::span<const int> hist) {
    if (auto it = cache_.find(key); it != cache_.end()) return it->second;
    Law acc = point_mass(0);
    for (std::size_t c = 1; c < hist.size(); ++c) {
      if (hist[c] == 0) continue;
      Law scaled;
      for (const auto& [x, p] : power(hist[c])) scaled[x * static_cast<std::int64_t>(c)] += p;
      acc = convolve(acc, scaled);
    }
    return cache_.emplace(key, std::move(acc)).first->second;
  }

 private:
  const Law& power(int m) {
    while (static_cast<int>(powers_.size()) <= m) powers_.push_back(convolve(powers_.back(), xi_));
    return powers_[static_cast<std::size_t>(m)];
  }

  Law xi_;
  std::vector<Law> powers_;
  std::unordered_map<std::string, Law> cache_;
};

/// DFS over step sequences. Node at depth j has counted S_0..S_{j-1}; the key
/// is the histogram of visit counts plus how often each step atom was used.
class ProfileEnumerator {
 public:
  ProfileEnumerator(const ModelConfig& model, std::int64_t kmax)
      : model_(model), kmax_(kmax), groups_(static_cast<std::size_t>(kmax) + 1) {
    const std::int64_t radius = kmax * std::max<std::int64_t>(model.step.max_abs(), 1) + 1;
    offset_ = radius;
    counts_.assign(static_cast<std::size_t>(2 * radius + 1), 0);
    hist_.assign(static_cast<std::size_t>(kmax) + 2, 0);
    usage_.assign(model.step.size(), 0);
  }

  void run() {
    groups_[0][key(0)] += 1;  // Z_0 = 0
    if (kmax_ == 0) return;
    visit(0);
    dfs(1, 0);
  }

  const std::vector<std::unordered_map<std::string, std::uint64_t>>& groups() const { return groups_; }

 private:
  void visit(std::int64_t pos) {
    int& c = counts_[static_cast<std::size_t>(pos + offset_)];
    if (c > 0) --hist_[static_cast<std::size_t>(c)];
    ++c;
    ++hist_[static_cast<std::size_t>(c)];
  }

  void unvisit(std::int64_t pos) {
    int& c = counts_[static_cast<std::size_t>(pos + offset_)];
    --hist_[static_cast<std::size_t>(c)];
    --c;
    if (c > 0) ++hist_[static_cast<std::size_t>(c)];
  }

  void dfs(std::int64_t depth, std::int64_t pos) {
    groups_[static_cast<std::size_t>(depth)][key(depth)] += 1;
    if (depth == kmax_) return;
    const auto atoms = model_.step.atoms();
    for (std::size_t i = 0; i < atoms.size(); ++i) {
      const std::int64_t next = pos + atoms[i].value;
      ++usage_[i];
      visit(next);
      dfs(depth + 1, next);
      unvisit(next);
      --usage_[i];
    }
  }

  std::string key(std::int64_t depth) const {
    std::string k;
    k.reserve(static_cast<std::size_t>(depth) + usage_.size() + 1);
    for (std::int64_t c = 1; c <= depth; ++c) k.push_back(static_cast<char>(hist_[static_cast<std::size_t>(c)]));
    k.push_back('|');
    for (int u : usage_) k.push_back(static_cast<char>(u));
    return k;
  }

  const ModelConfig& model_;
  std::int64_t kmax_;
  std::int64_t offset_ = 0;
  std::vector<int> counts_;
  std::vector<int> hist_;
  std::vector<int> usage_;
  std::vector<std::unordered_map<std::string, std::uint64_t>> groups_;
};

mpq_class usage_weight(const LatticePmf& step, std::span<const unsigned char> usage) {
  mpq_class w = 1;
  const auto atoms = step.atoms();
  for (std::size_t i = 0; i < atoms.size(); ++i) {
    mpq_class m = exact_mass(atoms[i]);
    for (unsigned u = 0; u < usage[i]; ++u) w *= m;
  }
  return w;
}

}  // namespace

mpq_class ExactPmf::at(std::int64_t value) const {
  const auto it = atoms.find(value);
  return it == atoms.end() ? mpq_class(0) : it->second;
}

mpq_class ExactPmf::total() const {
  mpq_class s = 0;
  for (const auto& [v, p] : atoms) s += p;
  return s;
}

int default_exact_cap(const ModelConfig& model) noexcept {
  const auto s = static_cast<double>(model.step.size());
  if (s <= 2.0) return 20;
  return static_cast<int>(std::floor(20.0 * std::log(2.0) / std::log(s)));
}

std::vector<ExactPmf> exact_Z_pmfs_upto(const ModelConfig& model, std::int64_t kmax, int cap) {
  require_rational(model);
  check_cap(kmax, resolve_cap(model, cap));
  ProfileEnumerator enumerator(model, kmax);
  enumerator.run();
  ProfileConvolver convolver(model.scenery);
  std::vector<ExactPmf> out;
  for (std::int64_t j = 0; j <= kmax; ++j) {
    ExactPmf pmf;
    pmf.k = j;
    // Sorted keys make the accumulation order deterministic.
    std::vector<std::pair<std::string, std::uint64_t>> groups(enumerator.groups()[static_cast<std::size_t>(j)].begin(),
                                                              enumerator.groups()[static_cast<std::size_t>(j)].end());
    std::sort(groups.begin(), groups.end());
    for (const auto& [key, paths] : groups) {
      const auto bar = key.find('|');
      std::vector<int> hist(bar + 1, 0);
      for (std::size_t c = 0; c < bar; ++c) hist[c + 1] = static_cast<unsigned char>(key[c]);
      const auto usage = std::span<const unsigned char>(reinterpret_cast<const unsigned char*>(key.data()) + bar + 1,
                                                        key.size() - bar - 1);
      mpq_class weight = usage_weight(model.step, usage) * mpz_class(std::to_string(paths));
      for (const auto& [x, p] : convolver.law(key.substr(0, bar), hist)) pmf.atoms[x] += weight * p;
    }
    out.push_back(std::move(pmf));
  }
  return out;
}

ExactPmf exact_Z_pmf(const ModelConfig& model, std::int64_t k, int cap) {
  require_rational(model);
  check_cap(k, resolve_cap(model, cap));
  return std::move(exact_Z_pmfs_upto(model, k, cap).back());
}

ExactPmf exact_Z_pmf_naive(const ModelConfig& model, std::int64_t k) {
  require_rational(model);
  check_cap(k, 10);
  const auto steps = model.step.atoms();
  const auto xis = model.scenery.atoms();
  ExactPmf pmf;
  pmf.k = k;
  if (k == 0) {
    pmf.atoms[0] = 1;
    return pmf;
  }
  // Odometer over step choices X_1..X_{k-1}.
  std::vector<std::size_t> choice(static_cast<std::size_t>(k - 1), 0);
  while (true) {
    std::vector<std::int64_t> path{0};
    mpq_class path_prob = 1;
    for (std::size_t i : choice) {
      path.push_back(path.back() + steps[i].value);
      path_prob *= exact_mass(steps[i]);
    }
    std::vector<std::int64_t> sites = path;
    std::sort(sites.begin(), sites.end());
    sites.erase(std::unique(sites.begin(), sites.end()), sites.end());
    // Odometer over scenery values at the visited sites.
    std::vector<std::size_t> scen(sites.size(), 0);
    while (true) {
      mpq_class p = path_prob;
      for (std::size_t s : scen) p *= exact_mass(xis[s]);
      std::int64_t z = 0;
      for (std::int64_t y : path) {
        const auto idx = static_cast<std::size_t>(std::lower_bound(sites.begin(), sites.end(), y) - sites.begin());
        z += xis[scen[idx]].value;
      }
      pmf.atoms[z] += p;
      std::size_t d = 0;
      while (d < scen.size() && ++scen[d] == xis.size()) scen[d++] = 0;
      if (d == scen.size()) break;
    }
    std::size_t d = 0;
    while (d < choice.size() && ++choice[d] == steps.size()) choice[d++] = 0;
    if (d == choice.size()) break;
  }
  return pmf;
}

mpq_class exact_joint_prob(const ModelConfig& model, std::span<const std::int64_t> times,
                           std::span<const std::int64_t> values, int cap) {
  require_rational(model);
  if (times.size() != values.size()) fail(ErrorCode::InvalidArgument, "times and values differ in length");
  if (times.empty()) return 1;
  for (std::size_t i = 1; i < times.size(); ++i) {
    if (times[i] < times[i - 1]) fail(ErrorCode::InvalidArgument, "times must be non-decreasing");
  }
  const std::int64_t horizon = times.back();
  check_cap(horizon, resolve_cap(model, cap));
  for (std::size_t j = 0; j < times.size(); ++j) {
    if (!model.congruent(times[j], values[j])) return 0;
  }
  const auto steps = model.step.atoms();
  const std::size_t m = times.size();

  // Group paths by the sorted multiset of per-site count vectors.
  std::map<std::pair<std::vector<std::vector<std::int64_t>>, std::vector<int>>, std::uint64_t> groups;
  std::vector<std::int64_t> path{0};
  std::vector<int> usage(steps.size(), 0);
  auto record = [&] {
    std::map<std::int64_t, std::vector<std::int64_t>> per_site;
    for (std::int64_t i = 0; i < horizon; ++i) {
      auto& v = per_site.try_emplace(path[static_cast<std::size_t>(i)], m, 0).first->second;
      for (std::size_t j = 0; j < m; ++j) {
        if (i < times[j]) ++v[j];
      }
    }
    std::vector<std::vector<std::int64_t>> vecs;
    for (auto& [site, v] : per_site) vecs.push_back(std::move(v));
    std::sort(vecs.begin(), vecs.end());
    ++groups[{std::move(vecs), usage}];
  };
  auto dfs = [&](auto&& self, std::int64_t len) -> void {
    if (len >= horizon) {
      record();
      return;
    }
    for (std::size_t i = 0; i < steps.size(); ++i) {
      path.push_back(path.back() + steps[i].value);
      ++usage[i];
      self(self, len + 1);
      --usage[i];
      path.pop_back();
    }
  };
  // Positions S_0..S_{horizon-1} need horizon-1 steps.
  if (horizon <= 1) {
    record();
  } else {
    dfs(dfs, 1);
  }

  const std::vector<std::int64_t> target(values.begin(), values.end());
  mpq_class total = 0;
  for (const auto& [key, paths] : groups) {
    const auto& [vecs, use] = key;
    std::map<std::vector<std::int64_t>, mpq_class> law{{std::vector<std::int64_t>(m, 0), mpq_class(1)}};
    for (const auto& v : vecs) {
      std::map<std::vector<std::int64_t>, mpq_class> next;
      for (const auto& [partial, p] : law) {
        for (const auto& a : model.scenery.atoms()) {
          auto s = partial;
          for (std::size_t j = 0; j < m; ++j) s[j] += a.value * v[j];
          next[s] += p * exact_mass(a);
        }
      }
      law = std::move(next);
    }
    const auto it = law.find(target);
    if (it == law.end()) continue;
    std::vector<unsigned char> u(use.begin(), use.end());
    total += it->second * usage_weight(model.step, u) * mpz_class(std::to_string(paths));
  }
  return total;
}

double A_coefficient(const ModelConfig& model, const Observable& f, std::int64_t k, const ExactPmf& law) {
  long double total = 0;
  for (const auto& [a, fa] : f) {
    // Only a in k*alpha + dZ contributes.
    if (fa == 0.0 || !model.congruent(k, a)) continue;
    for (const auto& [b, fb] : f) total += static_cast<long double>(fa) * fb * law.probability(b - a);
  }
  return static_cast<double>(total);
}

double A_coefficient(const ModelConfig& model, const Observable& f, std::int64_t k, std::int64_t ell, int cap) {
  if (f.empty()) return 0.0;
  return A_coefficient(model, f, k, exact_Z_pmf(model, ell, cap));
}

std::string exact_pmf_csv(const ExactPmf& pmf) {
  std::ostringstream os;
  os << "value,numerator,denominator\n";
  for (const auto& [v, p] : pmf.atoms) os << v << ',' << p.get_num().get_str() << ',' << p.get_den().get_str() << '\n';
  return os.str();
}

}  // namespace rwrs
