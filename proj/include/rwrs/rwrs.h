/* C interface to the rwrs toolkit. All functions return an rwrs_status; the
 * message of the last failure on the calling thread is rwrs_last_error(). */
#ifndef RWRS_RWRS_H
#define RWRS_RWRS_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  if defined(RWRS_BUILDING_LIBRARY)
#    define RWRS_API __declspec(dllexport)
#  else
#    define RWRS_API __declspec(dllimport)
#  endif
#else
#  define RWRS_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum rwrs_status {
  RWRS_OK = 0,
  RWRS_INVALID_ARGUMENT = 1,
  RWRS_INVALID_PMF = 2,
  RWRS_NOT_CENTERED = 3,
  RWRS_SUPPORT_DOES_NOT_GENERATE_Z = 4,
  RWRS_ZERO_VARIANCE = 5,
  RWRS_UNKNOWN_STATISTIC = 6,
  RWRS_ZERO_REPS = 7,
  RWRS_CAP_EXCEEDED = 8,
  RWRS_NON_RATIONAL_MODEL = 9,
  RWRS_DEGENERATE_INPUT = 10,
  RWRS_MISSING_COMPONENTS = 11,
  RWRS_OBSERVABLE_NOT_CENTERED = 12,
  RWRS_OVERFLOW = 13,
  RWRS_CONFIG_PARSE = 14,
  RWRS_UNKNOWN_EXPERIMENT = 15,
  RWRS_IO_FAILURE = 16,
  RWRS_EMPTY_DIRECTORY = 17,
  RWRS_BUFFER_TOO_SMALL = 18,
  RWRS_INTERNAL = 99
} rwrs_status;

typedef struct rwrs_model rwrs_model;   /* validated step/scenery pair */
typedef struct rwrs_result rwrs_result; /* outcome of run / report */

RWRS_API const char* rwrs_version(void);
RWRS_API const char* rwrs_last_error(void);
RWRS_API const char* rwrs_status_name(rwrs_status status);

/* ---- models ---- */

/* Exact pmfs: value[i] has mass num[i] / den[i]. */
RWRS_API rwrs_status rwrs_model_create(const int64_t* step_value, const int64_t* step_num, const int64_t* step_den,
                                       size_t step_len, const int64_t* scenery_value, const int64_t* scenery_num,
                                       const int64_t* scenery_den, size_t scenery_len, rwrs_model** out);
RWRS_API rwrs_status rwrs_model_create_rademacher(rwrs_model** out);
/* Model from the INI text form used by run configs ("step = (v,num,den) ..."). */
RWRS_API rwrs_status rwrs_model_parse(const char* step, const char* scenery, rwrs_model** out);
RWRS_API void rwrs_model_destroy(rwrs_model* model);

RWRS_API rwrs_status rwrs_model_periodicity(const rwrs_model* model, int64_t* d, int64_t* alpha, int64_t* alpha0);
RWRS_API rwrs_status rwrs_model_sigma_xi_sq(const rwrs_model* model, double* out);

/* ---- exact oracle ---- */

/* Writes up to `capacity` atoms of the law of Z_k; *count receives the
 * support size. RWRS_BUFFER_TOO_SMALL when capacity < *count. cap < 0 picks
 * the default enumeration cap. */
RWRS_API rwrs_status rwrs_exact_pmf(const rwrs_model* model, int64_t k, int cap, int64_t* values,
                                    double* probabilities, size_t capacity, size_t* count);

/* ---- walk engine ---- */

/* statistic: "local_time_zero", "lln_sum", "clt_sum", "endpoint" or
 * "indicator:<a>". f may be NULL when f_len is 0. */
RWRS_API rwrs_status rwrs_batch_estimate(const rwrs_model* model, int64_t n, uint64_t reps, const char* statistic,
                                         const int64_t* f_support, const double* f_weight, size_t f_len,
                                         uint64_t seed, unsigned workers, double* mean, double* std_error);

/* ---- green-kubo ---- */

RWRS_API rwrs_status rwrs_sigma2_f(const rwrs_model* model, const int64_t* f_support, const double* f_weight,
                                   size_t f_len, int64_t exact_horizon, int64_t mc_horizon, uint64_t mc_budget,
                                   uint64_t seed, unsigned workers, double* sigma2, double* tail_estimate);

/* ---- brownian lab / moments ---- */

RWRS_API rwrs_status rwrs_l2_inverse_moment(int64_t n_disc, uint64_t budget, uint64_t seed, unsigned workers,
                                            double* mean, double* std_error);
RWRS_API rwrs_status rwrs_simplex_closed_form(int m, double* out);
RWRS_API rwrs_status rwrs_ks_local_time_moment(int m, double sigma_xi, uint64_t simplex_budget, uint64_t path_budget,
                                               int64_t n_disc, uint64_t seed, unsigned workers, double* mean,
                                               double* std_error);

/* ---- experiments ---- */

/* Runs a config (file path or INI text) with "section.key=value" overrides,
 * writing artifacts. The result carries the exit code and summary lines. */
RWRS_API rwrs_status rwrs_run_file(const char* path, const char* const* overrides, size_t n_overrides,
                                   rwrs_result** out);
RWRS_API rwrs_status rwrs_run_text(const char* text, const char* const* overrides, size_t n_overrides,
                                   rwrs_result** out);
/* Consolidated acceptance table over the artifacts in `dir`. */
RWRS_API rwrs_status rwrs_report(const char* dir, rwrs_result** out);

RWRS_API int rwrs_result_exit_code(const rwrs_result* result);
RWRS_API const char* rwrs_result_text(const rwrs_result* result);
RWRS_API void rwrs_result_destroy(rwrs_result* result);

/* Process exit code for a status (config parse 2, unknown experiment 3,
 * I/O 4, empty directory 6, anything else 5). */
RWRS_API int rwrs_exit_code(rwrs_status status);

#ifdef __cplusplus
}
#endif

#endif /* RWRS_RWRS_H */
