#include <chrono>
#include <cmath>
#include <sstream>

#include "json.hpp"
#include "rwrs/brownian_lab.hpp"
#include "rwrs/cli_reports.hpp"
#include "rwrs/exact_oracle.hpp"
#include "rwrs/green_kubo.hpp"
#include "rwrs/limit_suite.hpp"
#include "rwrs/moment_engine.hpp"
#include "rwrs/walk_engine.hpp"

#ifndef RWRS_VERSION
#define RWRS_VERSION "0.0.0"
#endif

namespace rwrs {

namespace {

using json = nlohmann::json;

json estimate_json(const Estimate& e) {
  return {{"mean", e.mean}, {"stderr", e.std_error}, {"count", e.count}};
}

json table_json(const ConvergenceTable& t) {
  json rows = json::array();
  for (const auto& r : t.rows)
    rows.push_back({{"n", r.n},
                    {"statistic", r.statistic},
                    {"value", r.value},
                    {"stderr", r.std_error},
                    {"reps", r.reps},
                    {"target", r.target},
                    {"target_stderr", r.target_std_error},
                    {"provenance", r.provenance},
                    {"congruence_zero", r.congruence_zero}});
  return {{"experiment", t.experiment}, {"rows", rows}};
}

json pmf_json(const LatticePmf& p) {
  json out = json::array();
  for (const auto& a : p.atoms()) {
    json atom = {{"value", a.value}, {"mass", a.mass}};
    if (a.exact) atom["exact"] = std::to_string(a.exact->num) + "/" + std::to_string(a.exact->den);
    out.push_back(atom);
  }
  return out;
}

std::vector<double> get_double_list(const RunConfig& c, const std::string& key, std::vector<double> fallback) {
  if (!c.has(key)) return fallback;
  std::vector<double> out;
  std::string text = c.get(key, "");
  for (char& ch : text)
    if (ch == ',') ch = ' ';
  std::stringstream ss(text);
  std::string tok;
  while (ss >> tok) {
    RunConfig tmp;
    tmp.values[key] = tok;
    out.push_back(tmp.get_double(key, 0.0));
  }
  if (out.empty()) fail(ErrorCode::ConfigParse, "empty list for " + key);
  return out;
}

struct Context {
  const RunConfig& config;
  ModelConfig model;
  std::uint64_t seed;
  unsigned workers;
  json payload = json::object();
  std::string csv;
  std::vector<CriterionOutcome> criteria;

  std::int64_t n(std::int64_t fallback) const { return config.get_int("params.n", fallback); }
  std::uint64_t reps(std::uint64_t fallback) const { return config.get_uint("params.reps", fallback); }
};

std::vector<Estimate> target_moments(Context& ctx, int max_j) {
  std::vector<Estimate> out;
  const auto paths = ctx.config.get_uint("params.target_paths", 2000);
  const auto tuples = ctx.config.get_uint("params.target_tuples", 8);
  const auto n_disc = ctx.config.get_int("params.target_n_disc", 1024);
  for (int j = 1; j <= max_j; ++j) {
    const MomentEstimate m = ks_local_time_moment(j, 1.0, tuples, paths, n_disc, ctx.seed, {ctx.workers});
    out.push_back(Estimate{m.value, 0.0, m.std_error, m.paths});
  }
  return out;
}

void model_check(Context& ctx) {
  const auto& p = ctx.model.periodicity;
  ctx.payload = {{"d", p.d},
                 {"alpha", p.alpha},
                 {"alpha0", p.alpha0},
                 {"sigma_xi_sq", ctx.model.sigma_xi_sq},
                 {"rational", ctx.model.is_rational()},
                 {"simple_step", ctx.model.simple_step()},
                 {"step", pmf_json(ctx.model.step)},
                 {"scenery", pmf_json(ctx.model.scenery)}};
  std::ostringstream os;
  os << "key,value\nd," << p.d << "\nalpha," << p.alpha << "\nalpha0," << p.alpha0 << "\nsigma_xi_sq,"
     << json(ctx.model.sigma_xi_sq).dump() << '\n';
  if (ctx.config.has("params.n")) {
    const std::int64_t n = ctx.n(0);
    const std::uint64_t reps = ctx.reps(100);
    std::uint64_t bad = 0;
    const StreamId base{ctx.seed, experiment_id("model_check"), 0};
    for (std::uint64_t r = 0; r < reps; ++r) {
      const auto t = rwrs_trajectory(ctx.model, n, base.with_replicate(r));
      for (std::int64_t k = 0; k <= n; ++k)
        if (!ctx.model.congruent(k, t.z[static_cast<std::size_t>(k)])) ++bad;
    }
    ctx.payload["congruence_violations"] = bad;
    ctx.payload["congruence_checked"] = static_cast<std::uint64_t>(n + 1) * reps;
    os << "congruence_violations," << bad << '\n';
    ctx.criteria.push_back({2, "congruence", bad == 0, std::to_string(bad) + " violations"});
  }
  ctx.csv = os.str();
}

void exact_dist(Context& ctx) {
  const std::int64_t k = ctx.config.get_int("params.k", ctx.n(10));
  const int cap = static_cast<int>(ctx.config.get_int("params.cap", -1));
  const ExactPmf pmf = exact_Z_pmf(ctx.model, k, cap);
  json atoms = json::array();
  for (const auto& [v, q] : pmf.atoms) atoms.push_back({{"value", v}, {"probability", q.get_str()}, {"double", q.get_d()}});
  ctx.payload = {{"k", k}, {"atoms", atoms}, {"total", pmf.total().get_str()}};
  ctx.csv = exact_pmf_csv(pmf);
  ctx.criteria.push_back({0, "exact_total_one", pmf.total() == 1, "total " + pmf.total().get_str()});
}

GreenKuboOptions gk_options(const Context& ctx) {
  GreenKuboOptions o;
  o.exact_horizon = ctx.config.get_int("params.exact_horizon", o.exact_horizon);
  o.mc_horizon = ctx.config.get_int("params.mc_horizon", o.mc_horizon);
  o.mc_budget = ctx.config.get_uint("params.mc_budget", ctx.reps(o.mc_budget));
  o.enforce_centered = ctx.config.get_bool("params.enforce_centered", true);
  o.cap = static_cast<int>(ctx.config.get_int("params.cap", -1));
  o.seed = ctx.seed;
  o.workers = ctx.workers;
  return o;
}

json gk_json(const GreenKuboResult& r) {
  json blocks = json::array();
  for (const auto& b : r.blocks)
    blocks.push_back({{"k", b.k}, {"value", b.value}, {"source", to_string(b.source)}, {"stderr", b.std_error}});
  return {{"sigma2", r.sigma2},
          {"sigma2_stderr", r.sigma2_std_error},
          {"tail_estimate", r.tail_estimate},
          {"tail_exponent", r.tail_exponent},
          {"tail_converged", r.tail_converged},
          {"truncation_index", r.truncation_index},
          {"centered", r.centered},
          {"blocks", blocks}};
}

void green_kubo(Context& ctx) {
  const Observable f = ctx.config.observable("params.f", indicator_difference(0, 1));
  const GreenKuboResult r = sigma2_f(ctx.model, f, gk_options(ctx));
  ctx.payload = gk_json(r);
  ctx.csv = green_kubo_csv(r);
}

void brownian(Context& ctx) {
  const std::string quantity = ctx.config.get("params.quantity", "l2_inverse");
  const std::int64_t n_disc = ctx.n(4096);
  const std::uint64_t budget = ctx.reps(1000);
  BrownianOptions bo;
  bo.workers = ctx.workers;
  bo.mom_groups = static_cast<int>(ctx.config.get_int("params.mom_groups", 10));
  auto report_json = [](const InverseMomentReport& r) {
    return json{{"quantity", r.quantity},       {"k", r.k},
                {"n_disc", r.n_disc},           {"budget", r.budget},
                {"estimate", estimate_json(r.estimate)}, {"median_of_means", r.median_of_means},
                {"degenerate", r.degenerate}};
  };
  if (quantity == "l2_inverse") {
    const auto r = l2_inverse_moment(n_disc, budget, ctx.seed, bo);
    ctx.payload = report_json(r);
    ctx.csv = inverse_moment_csv(std::span(&r, 1));
  } else if (quantity == "vk") {
    const auto ks = ctx.config.get_int_list("params.ks", {4, 8, 16, 32, 64});
    const auto rs = inverse_distance_moments(ks, n_disc, budget, ctx.seed, bo);
    json arr = json::array();
    for (const auto& r : rs) arr.push_back(report_json(r));
    ctx.payload = {{"reports", arr}};
    if (ks.size() >= 2) ctx.payload["exponent"] = exponent_fit(ks, rs);
    ctx.csv = inverse_moment_csv(rs);
  } else if (quantity == "delta") {
    const auto samples = delta_endpoint_samples(n_disc, budget, ctx.seed, bo);
    const Estimate e = estimate_from_samples(samples);
    ctx.payload = {{"quantity", "delta_endpoint"}, {"n_disc", n_disc}, {"mean", e.mean}, {"variance", e.variance},
                   {"stderr", e.std_error}, {"count", e.count}};
    std::ostringstream os;
    os << "sample\n";
    for (double v : samples) os << json(v).dump() << '\n';
    ctx.csv = os.str();
  } else if (quantity == "gram") {
    const auto times = get_double_list(ctx.config, "params.times", {0.25, 0.5, 1.0});
    const auto grids = sample_local_time_grid(n_disc, times, StreamId{ctx.seed, experiment_id("gram"), 0});
    const GramSample g = gram_det(grids);
    ctx.payload = {{"times", g.times}, {"matrix", g.matrix}, {"det", g.det}, {"degenerate", g.degenerate}};
    std::ostringstream os;
    os << "i,j,value\n";
    for (std::size_t i = 0; i < g.m; ++i)
      for (std::size_t j = 0; j < g.m; ++j) os << i << ',' << j << ',' << json(g.at(i, j)).dump() << '\n';
    ctx.csv = os.str();
  } else {
    fail(ErrorCode::ConfigParse, "unknown brownian quantity '" + quantity + "'");
  }
}

void moments(Context& ctx) {
  const auto ms = ctx.config.get_int_list("params.m", {1, 2, 3});
  const std::int64_t n_disc = ctx.n(1024);
  const std::uint64_t paths = ctx.reps(2000);
  const std::uint64_t tuples = ctx.config.get_uint("params.tuples", 8);
  const double sigma = ctx.model.sigma_xi();
  std::optional<SandwichComponents> comp;
  if (ctx.config.get_bool("params.sandwich", true)) {
    comp.emplace();
    const auto sb = ctx.config.get_uint("params.sandwich_budget", 2000);
    const auto sn = ctx.config.get_int("params.sandwich_n_disc", 4096);
    comp->l2_inverse = l2_inverse_moment(sn, sb, ctx.seed, {ctx.workers}).estimate;
    std::int64_t mmax = 1;
    for (auto m : ms) mmax = std::max(mmax, m);
    std::vector<std::int64_t> js;
    for (std::int64_t j = 1; j < mmax; ++j) js.push_back(j);
    if (!js.empty())
      for (const auto& r : inverse_distance_moments(js, sn, sb, ctx.seed, {ctx.workers}))
        comp->vk_inverse.push_back(r.estimate);
  }
  std::vector<MomentEstimate> rows;
  json arr = json::array();
  for (auto m : ms) {
    MomentEstimate e = ks_local_time_moment(static_cast<int>(m), sigma, tuples, paths, n_disc, ctx.seed, {ctx.workers});
    if (comp) e.sandwich = moment_sandwich(static_cast<int>(m), sigma, *comp);
    json row = {{"m", e.m},
                {"closed_form", simplex_closed_form(e.m)},
                {"value", e.value},
                {"stderr", e.std_error},
                {"simplex_factor", e.simplex_factor},
                {"det_moment_factor", e.det_moment_factor},
                {"sigma_xi", e.sigma_xi},
                {"degenerate", e.degenerate}};
    if (e.sandwich) {
      row["lower"] = e.sandwich->lower;
      row["upper_proxy"] = e.sandwich->upper;
    }
    arr.push_back(row);
    rows.push_back(e);
  }
  ctx.payload = {{"n_disc", n_disc}, {"paths", paths}, {"tuples", tuples}, {"rows", arr}};
  ctx.csv = moment_csv(rows);
}

// Pass when |value / target - 1| <= tol at the largest n for the named statistic.
void relative_criterion(Context& ctx, const ConvergenceTable& t, const std::string& statistic, const char* name) {
  if (!ctx.config.has("params.rel_tol")) return;
  const double tol = ctx.config.get_double("params.rel_tol", 0.1);
  const ConvergenceRow* last = nullptr;
  for (const auto& r : t.rows)
    if (r.statistic == statistic && (!last || r.n >= last->n)) last = &r;
  if (!last) return;
  const double rel = std::fabs(last->value / last->target - 1.0);
  ctx.criteria.push_back({static_cast<int>(ctx.config.get_int("params.criterion_id", 0)), name, rel <= tol,
                          "relative error " + json(rel).dump() + " vs " + json(tol).dump()});
}

void lln(Context& ctx) {
  const Observable f = ctx.config.observable("params.f", Observable{{0, 1.0}, {1, 1.0}});
  const auto ns = ctx.config.get_int_list("params.n", {1024, 4096});
  const int max_moment = static_cast<int>(ctx.config.get_int("params.max_moment", 2));
  LimitTargets targets;
  if (observable_sum(f) != 0.0) targets.local_time_moments = target_moments(ctx, max_moment);
  const auto t = lln_experiment(ctx.model, f, ns, ctx.reps(1000), max_moment, ctx.seed, targets, {ctx.workers});
  ctx.payload = table_json(t);
  ctx.csv = convergence_csv(t);
  relative_criterion(ctx, t, "lln_m1", "lln_first_moment");
}

void clt(Context& ctx) {
  const Observable f = ctx.config.observable("params.f", indicator_difference(0, 1));
  const auto ns = ctx.config.get_int_list("params.n", {1024, 4096});
  const int max_moment = static_cast<int>(ctx.config.get_int("params.max_moment", 2));
  LimitTargets targets;
  targets.local_time_moments = target_moments(ctx, max_moment / 2);
  const GreenKuboOptions go = gk_options(ctx);
  const GreenKuboResult gk = sigma2_f(ctx.model, f, go);
  targets.sigma2_f = Estimate{gk.sigma2, 0.0, gk.sigma2_std_error, go.mc_budget};
  const auto t = clt_experiment(ctx.model, f, ns, ctx.reps(1000), max_moment, ctx.seed, targets, {ctx.workers});
  ctx.payload = table_json(t);
  ctx.payload["sigma2_f"] = gk.sigma2;
  ctx.csv = convergence_csv(t);
  relative_criterion(ctx, t, "clt_m2", "clt_second_moment");
}

void local_limit(Context& ctx) {
  const auto as = ctx.config.get_int_list("params.a", {0, 1});
  const auto ns = ctx.config.get_int_list("params.n", {1024, 4096});
  LimitTargets targets;
  BrownianOptions bo;
  bo.workers = ctx.workers;
  targets.l2_inverse = l2_inverse_moment(ctx.config.get_int("params.l2_n_disc", 4096),
                                         ctx.config.get_uint("params.l2_budget", 4000), ctx.seed, bo)
                           .estimate;
  const auto t = local_limit_check(ctx.model, as, ns, ctx.reps(100000), ctx.seed, targets, {ctx.workers});
  ctx.payload = table_json(t);
  ctx.csv = convergence_csv(t);
  std::uint64_t nonzero = 0;
  for (const auto& r : t.rows)
    if (r.congruence_zero && r.value != 0.0) ++nonzero;
  ctx.criteria.push_back({2, "congruence_zero_rows", nonzero == 0, std::to_string(nonzero) + " non-zero rows"});
  relative_criterion(ctx, t, "n34_prob_at:" + std::to_string(as.front()), "local_limit_plateau");
}

void ratio(Context& ctx) {
  RatioObservable f;
  f.h = ctx.config.observable("params.f", Observable{{0, 1.0}, {1, 1.0}});
  if (ctx.config.has("params.xi_equals")) f.xi_equals = ctx.config.get_int("params.xi_equals", 0);
  const RatioResult r = ratio_ergodic_experiment(ctx.model, f, ctx.n(65536), ctx.reps(20), ctx.seed, {ctx.workers});
  ctx.payload = table_json(r.table);
  ctx.payload["target"] = f.integral(ctx.model);
  ctx.csv = convergence_csv(r.table);
  relative_criterion(ctx, r.table, "median_" + f.name(), "ratio_ergodic");
}

void functional(Context& ctx) {
  const auto ns = ctx.config.get_int_list("params.n", {1024, 4096, 16384});
  const auto t = functional_limit_check(ctx.model, ns, ctx.reps(2000), ctx.config.get_int("params.n_disc", 4096),
                                        ctx.seed, {ctx.workers});
  ctx.payload = table_json(t);
  ctx.csv = convergence_csv(t);
  if (ctx.config.get_bool("params.require_decreasing", false)) {
    bool ok = true;
    for (std::size_t i = 1; i < t.rows.size(); ++i) ok = ok && t.rows[i].value < t.rows[i - 1].value;
    ctx.criteria.push_back({static_cast<int>(ctx.config.get_int("params.criterion_id", 0)), "ks_decreasing", ok, ""});
  }
}

}  // namespace

const std::vector<std::string>& experiment_names() {
  static const std::vector<std::string> names = {"model-check", "exact-dist", "green-kubo", "brownian", "moments",
                                                 "lln",         "clt",        "local-limit", "ratio",   "functional"};
  return names;
}

ExperimentArtifacts run_experiment(const RunConfig& config) {
  const std::string name = config.experiment();
  using Runner = void (*)(Context&);
  static const std::map<std::string, Runner> runners = {
      {"model-check", model_check}, {"exact-dist", exact_dist}, {"green-kubo", green_kubo},
      {"brownian", brownian},       {"moments", moments},       {"lln", lln},
      {"clt", clt},                 {"local-limit", local_limit}, {"ratio", ratio},
      {"functional", functional}};
  auto it = runners.find(name);
  if (it == runners.end()) fail(ErrorCode::UnknownExperiment, "'" + name + "'");

  const auto start = std::chrono::steady_clock::now();
  Context ctx{config, config.model(), config.seed(), config.workers(), json::object(), {}, {}};
  it->second(ctx);
  const auto stop = std::chrono::steady_clock::now();

  json criteria = json::array();
  for (const auto& c : ctx.criteria)
    criteria.push_back({{"id", c.id}, {"name", c.name}, {"pass", c.pass}, {"detail", c.detail}});
  const json doc = {{"experiment", name},
                    {"config", json::parse(canonical_config_json(config))},
                    {"config_hash", config_hash(config)},
                    {"seed", ctx.seed},
                    {"version", RWRS_VERSION},
                    {"payload", ctx.payload},
                    {"criteria", criteria},
                    {"congruence_violations", congruence_audit().violations.load()}};

  ExperimentArtifacts out;
  out.name = name;
  out.json = doc.dump(2) + "\n";
  out.csv = ctx.csv;
  out.criteria = ctx.criteria;
  out.seconds = std::chrono::duration<double>(stop - start).count();
  return out;
}

}  // namespace rwrs
