#include "rwrs/rwrs.h"

#include <array>
#include <new>
#include <string>
#include <vector>

#include "rwrs/brownian_lab.hpp"
#include "rwrs/cli_reports.hpp"
#include "rwrs/exact_oracle.hpp"
#include "rwrs/green_kubo.hpp"
#include "rwrs/moment_engine.hpp"
#include "rwrs/walk_engine.hpp"

#ifndef RWRS_VERSION
#define RWRS_VERSION "0.0.0"
#endif

struct rwrs_model {
  rwrs::ModelConfig config;
};

struct rwrs_result {
  int exit_code = 0;
  std::string text;
};

namespace {

thread_local std::string g_last_error;

rwrs_status status_of(rwrs::ErrorCode code) {
  return static_cast<rwrs_status>(static_cast<int>(code) + 1);
}

template <class Fn>
rwrs_status guard(Fn&& fn) {
  try {
    g_last_error.clear();
    return fn();
  } catch (const rwrs::Error& e) {
    g_last_error = e.what();
    return status_of(e.code());
  } catch (const std::bad_alloc&) {
    g_last_error = "out of memory";
    return RWRS_INTERNAL;
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return RWRS_INTERNAL;
  }
}

rwrs_status null_arg(const char* what) {
  g_last_error = std::string("InvalidArgument: null ") + what;
  return RWRS_INVALID_ARGUMENT;
}

rwrs::LatticePmf make_pmf(const int64_t* v, const int64_t* num, const int64_t* den, size_t len) {
  std::vector<std::array<std::int64_t, 3>> triples(len);
  for (size_t i = 0; i < len; ++i) triples[i] = {v[i], num[i], den[i]};
  return rwrs::LatticePmf::from_rationals(triples);
}

rwrs::Observable make_observable(const int64_t* support, const double* weight, size_t len) {
  rwrs::Observable f;
  for (size_t i = 0; i < len; ++i) f[support[i]] += weight[i];
  return f;
}

std::string join(const std::vector<std::string>& lines) {
  std::string s;
  for (const auto& l : lines) s += l + "\n";
  return s;
}

std::vector<std::string> collect(const char* const* overrides, size_t n) {
  std::vector<std::string> out;
  for (size_t i = 0; i < n; ++i)
    if (overrides[i]) out.emplace_back(overrides[i]);
  return out;
}

}  // namespace

extern "C" {

const char* rwrs_version(void) { return RWRS_VERSION; }

const char* rwrs_last_error(void) { return g_last_error.c_str(); }

const char* rwrs_status_name(rwrs_status status) {
  switch (status) {
    case RWRS_OK: return "Ok";
    case RWRS_BUFFER_TOO_SMALL: return "BufferTooSmall";
    case RWRS_INTERNAL: return "Internal";
    default:
      if (status >= 1 && status <= RWRS_EMPTY_DIRECTORY)
        return rwrs::to_string(static_cast<rwrs::ErrorCode>(static_cast<int>(status) - 1));
      return "Unknown";
  }
}

rwrs_status rwrs_model_create(const int64_t* step_value, const int64_t* step_num, const int64_t* step_den,
                              size_t step_len, const int64_t* scenery_value, const int64_t* scenery_num,
                              const int64_t* scenery_den, size_t scenery_len, rwrs_model** out) {
  if (!out) return null_arg("out");
  if ((step_len && (!step_value || !step_num || !step_den)) ||
      (scenery_len && (!scenery_value || !scenery_num || !scenery_den)))
    return null_arg("pmf array");
  return guard([&] {
    auto model = rwrs::validate_model(make_pmf(step_value, step_num, step_den, step_len),
                                      make_pmf(scenery_value, scenery_num, scenery_den, scenery_len));
    *out = new rwrs_model{std::move(model)};
    return RWRS_OK;
  });
}

rwrs_status rwrs_model_create_rademacher(rwrs_model** out) {
  if (!out) return null_arg("out");
  return guard([&] {
    *out = new rwrs_model{rwrs::rademacher_model()};
    return RWRS_OK;
  });
}

rwrs_status rwrs_model_parse(const char* step, const char* scenery, rwrs_model** out) {
  if (!out || !step || !scenery) return null_arg("argument");
  return guard([&] {
    *out = new rwrs_model{rwrs::validate_model(rwrs::parse_pmf(step), rwrs::parse_pmf(scenery))};
    return RWRS_OK;
  });
}

void rwrs_model_destroy(rwrs_model* model) { delete model; }

rwrs_status rwrs_model_periodicity(const rwrs_model* model, int64_t* d, int64_t* alpha, int64_t* alpha0) {
  if (!model) return null_arg("model");
  const auto& p = model->config.periodicity;
  if (d) *d = p.d;
  if (alpha) *alpha = p.alpha;
  if (alpha0) *alpha0 = p.alpha0;
  return RWRS_OK;
}

rwrs_status rwrs_model_sigma_xi_sq(const rwrs_model* model, double* out) {
  if (!model || !out) return null_arg("argument");
  *out = model->config.sigma_xi_sq;
  return RWRS_OK;
}

rwrs_status rwrs_exact_pmf(const rwrs_model* model, int64_t k, int cap, int64_t* values, double* probabilities,
                           size_t capacity, size_t* count) {
  if (!model || !count) return null_arg("argument");
  if (capacity && (!values || !probabilities)) return null_arg("output buffer");
  return guard([&] {
    const rwrs::ExactPmf pmf = rwrs::exact_Z_pmf(model->config, k, cap);
    *count = pmf.atoms.size();
    if (capacity < pmf.atoms.size()) {
      g_last_error = "BufferTooSmall: need " + std::to_string(pmf.atoms.size()) + " entries";
      return RWRS_BUFFER_TOO_SMALL;
    }
    size_t i = 0;
    for (const auto& [v, p] : pmf.atoms) {
      values[i] = v;
      probabilities[i] = p.get_d();
      ++i;
    }
    return RWRS_OK;
  });
}

rwrs_status rwrs_batch_estimate(const rwrs_model* model, int64_t n, uint64_t reps, const char* statistic,
                                const int64_t* f_support, const double* f_weight, size_t f_len, uint64_t seed,
                                unsigned workers, double* mean, double* std_error) {
  if (!model || !statistic || !mean) return null_arg("argument");
  if (f_len && (!f_support || !f_weight)) return null_arg("observable");
  return guard([&] {
    const auto stat = rwrs::parse_statistic(statistic, make_observable(f_support, f_weight, f_len));
    rwrs::BatchOptions options;
    options.workers = workers;
    const auto r = rwrs::batch_estimate(model->config, n, reps, stat, seed, options);
    *mean = r.estimate.mean;
    if (std_error) *std_error = r.estimate.std_error;
    return RWRS_OK;
  });
}

rwrs_status rwrs_sigma2_f(const rwrs_model* model, const int64_t* f_support, const double* f_weight, size_t f_len,
                          int64_t exact_horizon, int64_t mc_horizon, uint64_t mc_budget, uint64_t seed,
                          unsigned workers, double* sigma2, double* tail_estimate) {
  if (!model || !sigma2) return null_arg("argument");
  if (f_len && (!f_support || !f_weight)) return null_arg("observable");
  return guard([&] {
    rwrs::GreenKuboOptions o;
    o.exact_horizon = exact_horizon;
    o.mc_horizon = mc_horizon;
    o.mc_budget = mc_budget;
    o.seed = seed;
    o.workers = workers;
    const auto r = rwrs::sigma2_f(model->config, make_observable(f_support, f_weight, f_len), o);
    *sigma2 = r.sigma2;
    if (tail_estimate) *tail_estimate = r.tail_estimate;
    return RWRS_OK;
  });
}

rwrs_status rwrs_l2_inverse_moment(int64_t n_disc, uint64_t budget, uint64_t seed, unsigned workers, double* mean,
                                   double* std_error) {
  if (!mean) return null_arg("mean");
  return guard([&] {
    rwrs::BrownianOptions o;
    o.workers = workers;
    const auto r = rwrs::l2_inverse_moment(n_disc, budget, seed, o);
    *mean = r.estimate.mean;
    if (std_error) *std_error = r.estimate.std_error;
    return RWRS_OK;
  });
}

rwrs_status rwrs_simplex_closed_form(int m, double* out) {
  if (!out) return null_arg("out");
  return guard([&] {
    *out = rwrs::simplex_closed_form(m);
    return RWRS_OK;
  });
}

rwrs_status rwrs_ks_local_time_moment(int m, double sigma_xi, uint64_t simplex_budget, uint64_t path_budget,
                                      int64_t n_disc, uint64_t seed, unsigned workers, double* mean,
                                      double* std_error) {
  if (!mean) return null_arg("mean");
  return guard([&] {
    const auto r = rwrs::ks_local_time_moment(m, sigma_xi, simplex_budget, path_budget, n_disc, seed, {workers});
    *mean = r.value;
    if (std_error) *std_error = r.std_error;
    return RWRS_OK;
  });
}

rwrs_status rwrs_run_file(const char* path, const char* const* overrides, size_t n_overrides, rwrs_result** out) {
  if (!path || !out || (n_overrides && !overrides)) return null_arg("argument");
  return guard([&] {
    const auto r = rwrs::run(path, collect(overrides, n_overrides));
    *out = new rwrs_result{r.exit_code, join(r.lines)};
    return RWRS_OK;
  });
}

rwrs_status rwrs_run_text(const char* text, const char* const* overrides, size_t n_overrides, rwrs_result** out) {
  if (!text || !out || (n_overrides && !overrides)) return null_arg("argument");
  return guard([&] {
    const auto r = rwrs::run_text(text, collect(overrides, n_overrides));
    *out = new rwrs_result{r.exit_code, join(r.lines)};
    return RWRS_OK;
  });
}

rwrs_status rwrs_report(const char* dir, rwrs_result** out) {
  if (!dir || !out) return null_arg("argument");
  return guard([&] {
    const auto r = rwrs::report(dir);
    *out = new rwrs_result{r.all_pass ? 0 : rwrs::kExitReportFail, r.table};
    return RWRS_OK;
  });
}

int rwrs_result_exit_code(const rwrs_result* result) { return result ? result->exit_code : 5; }

const char* rwrs_result_text(const rwrs_result* result) { return result ? result->text.c_str() : ""; }

void rwrs_result_destroy(rwrs_result* result) { delete result; }

int rwrs_exit_code(rwrs_status status) {
  if (status == RWRS_OK) return 0;
  if (status >= 1 && status <= RWRS_EMPTY_DIRECTORY)
    return rwrs::exit_code_for(static_cast<rwrs::ErrorCode>(static_cast<int>(status) - 1));
  return 5;
}

}  // extern "C"
