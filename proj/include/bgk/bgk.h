#ifndef BGK_BGK_H
#define BGK_BGK_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#  define BGK_API __declspec(dllexport)
#elif defined(__GNUC__)
#  define BGK_API __attribute__((visibility("default")))
#else
#  define BGK_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

/* Status codes. Every fallible call returns one; details via bgk_last_error(). */
typedef enum bgk_status {
  BGK_OK = 0,
  BGK_ERR_ARGUMENT = 1,
  BGK_ERR_MORSE_VIOLATION = 2,
  BGK_ERR_CONFIGURATION = 3,
  BGK_ERR_DOMAIN = 4,
  BGK_ERR_NUMERICAL = 5,
  BGK_ERR_CLUSTER_SEPARATION = 6,
  BGK_ERR_SPECTRUM_HIT = 7,
  BGK_ERR_KAPPA_DEGENERATE = 8,
  BGK_ERR_CERTIFICATE_FAILURE = 9,
  BGK_ERR_GAP_FAILURE = 10,
  BGK_ERR_IO = 11,
  BGK_ERR_CONFIG_PARSE = 12,
  BGK_ERR_INTERNAL = 100
} bgk_status;

typedef struct bgk_config bgk_config;
typedef struct bgk_result bgk_result;
typedef struct bgk_operator bgk_operator;

/* Message of the last failed call on this thread; never NULL. */
BGK_API const char* bgk_last_error(void);
BGK_API const char* bgk_status_name(int status);
BGK_API const char* bgk_version(void);

/* Experiment configuration */
BGK_API int bgk_config_default(bgk_config** out);
BGK_API int bgk_config_from_file(const char* path, bgk_config** out);
BGK_API int bgk_config_from_string(const char* json, bgk_config** out);
BGK_API void bgk_config_free(bgk_config* config);
BGK_API int bgk_config_set_preset(bgk_config* config, const char* name);
BGK_API int bgk_config_set_h_values(bgk_config* config, const double* h, size_t count);
/* names: experiment identifiers, or the single name "all" */
BGK_API int bgk_config_set_experiments(bgk_config* config, const char* const* names, size_t count);
BGK_API int bgk_config_set_output_dir(bgk_config* config, const char* dir);
BGK_API int bgk_config_set_seed(bgk_config* config, uint64_t seed);
BGK_API int bgk_config_set_grid(bgk_config* config, int N, int K);
BGK_API int bgk_config_grid(const bgk_config* config, int* N, int* K);
BGK_API int bgk_config_output_dir(const bgk_config* config, const char** dir);
/* Canonical JSON; release with bgk_string_free. */
BGK_API int bgk_config_to_json(const bgk_config* config, char** json);

/* Experiment run; per-experiment failures are recorded in the result, not returned. */
BGK_API int bgk_run(const bgk_config* config, bgk_result** out);
BGK_API void bgk_result_free(bgk_result* result);
BGK_API int bgk_result_passed(const bgk_result* result, int* passed);
BGK_API int bgk_result_check_count(const bgk_result* result, size_t* count);
/* name stays valid for the lifetime of result; h is NaN for sweep-level checks */
BGK_API int bgk_result_check(const bgk_result* result, size_t index, const char** name, double* h, int* passed,
                             double* value, double* threshold);
BGK_API int bgk_result_error_count(const bgk_result* result, size_t* count);
BGK_API int bgk_result_error(const bgk_result* result, size_t index, const char** message);
BGK_API int bgk_result_summary_json(const bgk_result* result, char** json);
BGK_API int bgk_result_write(const bgk_result* result, const char* dir);

/* Single discretized operator P_h for a polynomial potential (ascending coefficients)
   or a named preset. x_min >= x_max selects the default confinement domain. */
BGK_API int bgk_operator_new_preset(const char* preset, double h, int N, int K, double x_min, double x_max,
                                    bgk_operator** out);
BGK_API int bgk_operator_new_polynomial(const double* coefficients, size_t count, double h, int N, int K,
                                        double x_min, double x_max, bgk_operator** out);
BGK_API void bgk_operator_free(bgk_operator* op);
BGK_API int bgk_operator_size(const bgk_operator* op, size_t* unknowns);
BGK_API int bgk_operator_pt_residual(const bgk_operator* op, double* residual, double* frobenius_norm);
/* Eigenvalues in |z| < delta_hat h. Writes at most capacity values; *count gets the total. */
BGK_API int bgk_operator_small_eigenvalues(const bgk_operator* op, double delta_hat, double* re, double* im,
                                           size_t capacity, size_t* count, double* gap_ratio);
BGK_API int bgk_operator_resolvent_norm(const bgk_operator* op, double re_z, double im_z, double* norm);
/* y = exp(-t P) x, x and y of length bgk_operator_size */
BGK_API int bgk_operator_propagate(const bgk_operator* op, const double* x, double t, double* y);
BGK_API int bgk_operator_maxwellian(const bgk_operator* op, double* out);

BGK_API void bgk_string_free(char* s);

#ifdef __cplusplus
}
#endif

#endif
