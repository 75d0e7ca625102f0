/* C API for the optscale shared library.
 *
 * All functions return a status code (OPTSCALE_OK on success); outputs are
 * written through pointers. On failure, optscale_last_error() returns a
 * thread-local message describing the most recent error on this thread.
 */
#ifndef OPTSCALE_OPTSCALE_H
#define OPTSCALE_OPTSCALE_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define OPTSCALE_API __declspec(dllexport)
#else
#define OPTSCALE_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

/* status codes */
enum {
  OPTSCALE_OK = 0,
  OPTSCALE_ERR_DOMAIN = 1,     /* argument outside mathematical domain */
  OPTSCALE_ERR_DATA = 2,       /* malformed or out-of-range data */
  OPTSCALE_ERR_PARAM = 3,      /* invalid configuration or policy */
  OPTSCALE_ERR_STATE = 4,      /* operation illegal in current state */
  OPTSCALE_ERR_DEGENERATE = 5, /* distribution normalizer underflow */
  OPTSCALE_ERR_IO = 6          /* file read/write failure */
};

/* aggregation modes */
enum {
  OPTSCALE_AGG_MEAN = 0,
  OPTSCALE_AGG_LAST = 1,
  OPTSCALE_AGG_MIN = 2
};

/* fit modes */
enum { OPTSCALE_FIT_MLE = 0, OPTSCALE_FIT_MAP = 1 };

/* stop reasons */
enum {
  OPTSCALE_STOP_NONE = -1,
  OPTSCALE_STOP_PLAN_SATISFIED = 0,
  OPTSCALE_STOP_BUDGET_EXHAUSTED = 1
};

typedef struct {
  double mu;
  double sigma;
} optscale_params_t;

typedef struct {
  double s_min;
  double alpha;
  uint32_t n_max;
  uint32_t n_init; /* 0 selects the default ceil(n_max / 3) */
  uint32_t batch_size;
  int aggregation; /* OPTSCALE_AGG_* */
} optscale_policy_t;

typedef struct {
  uint32_t n_star;
  double cdf_at_threshold;
  double exceedance_now;
  int clamped;
} optscale_plan_t;

typedef struct {
  double mu_bar;
  double sigma_mu;
  double sigma_bar;
  double sigma_sigma;
} optscale_prior_t;

typedef struct {
  optscale_params_t params;
  double objective;
  uint32_t iterations;
  int converged;
} optscale_fit_t;

typedef struct {
  int stop;                /* nonzero when the session should stop */
  uint32_t continue_count; /* samples to draw next when stop == 0 */
  int reason;              /* OPTSCALE_STOP_* */
} optscale_decision_t;

OPTSCALE_API const char* optscale_version(void);

/* Message for the most recent failure on the calling thread. */
OPTSCALE_API const char* optscale_last_error(void);

/* ---- score distribution ---- */

OPTSCALE_API int optscale_std_normal_cdf(double x, double* out);
OPTSCALE_API int optscale_truncnorm_pdf(double s, optscale_params_t p,
                                        double* out);
OPTSCALE_API int optscale_truncnorm_cdf(double s, optscale_params_t p,
                                        double* out);
/* n i.i.d. draws, deterministic under seed, written to out[0..n-1]. */
OPTSCALE_API int optscale_truncnorm_sample(optscale_params_t p, uint64_t seed,
                                           size_t n, double* out);
OPTSCALE_API int optscale_log_likelihood(const double* data, size_t n,
                                         optscale_params_t p, double* out);

/* ---- order statistics and planning ---- */

OPTSCALE_API int optscale_exceedance(double s, optscale_params_t p, uint32_t n,
                                     double* out);
OPTSCALE_API int optscale_max_pdf(double s, optscale_params_t p, uint32_t n,
                                  double* out);
/* current_n = 0 evaluates the exceedance at n_star. */
OPTSCALE_API int optscale_optimal_n(optscale_params_t p,
                                    const optscale_policy_t* policy,
                                    uint32_t current_n, optscale_plan_t* out);

/* ---- parameter estimation ---- */

OPTSCALE_API int optscale_moment_init(const double* data, size_t n,
                                      optscale_params_t* out);
OPTSCALE_API int optscale_mle_fit(const double* data, size_t n,
                                  optscale_params_t init, optscale_fit_t* out);
/* init may be NULL: the fit then starts at the prior mode. */
OPTSCALE_API int optscale_map_fit(const double* data, size_t n,
                                  const optscale_prior_t* prior,
                                  const optscale_params_t* init,
                                  optscale_fit_t* out);

/* ---- adaptive scaling session (opaque handle) ---- */

typedef struct optscale_session optscale_session_t;

/* prior may be NULL for pure-MLE operation. Returns NULL on failure. */
OPTSCALE_API optscale_session_t* optscale_session_new(
    const char* question_id, const optscale_policy_t* policy,
    const optscale_prior_t* prior);
OPTSCALE_API void optscale_session_free(optscale_session_t* session);

/* correct: -1 unknown, 0 false, 1 true. */
OPTSCALE_API int optscale_session_observe(optscale_session_t* session,
                                          const char* question_id,
                                          uint32_t sample_index,
                                          const double* step_scores,
                                          size_t n_steps, uint64_t tokens,
                                          const char* answer_key, int correct);
OPTSCALE_API int optscale_session_decide(optscale_session_t* session,
                                         optscale_decision_t* out);
OPTSCALE_API int optscale_session_observed_count(
    const optscale_session_t* session, uint32_t* out);
OPTSCALE_API int optscale_session_current_plan(
    const optscale_session_t* session, optscale_plan_t* out);
OPTSCALE_API int optscale_session_current_fit(
    const optscale_session_t* session, optscale_fit_t* out);
/* Highest-scoring record so far; key_buf receives a NUL-terminated copy of
 * its answer key (truncated to key_len - 1 characters). */
OPTSCALE_API int optscale_session_best(const optscale_session_t* session,
                                       uint32_t* sample_index, double* score,
                                       char* key_buf, size_t key_len);

/* ---- command cores (file-level operations behind the CLI) ---- */

/* Per-question fits over a JSONL score log, rendered as JSON lines or CSV.
 * prior may be NULL in MAP mode (the default belief is then used and
 * *used_default_prior is set). *out_text is heap-allocated; release it with
 * optscale_string_free. skipped counts questions with zero scores. */
OPTSCALE_API int optscale_fit_scorelog(const char* log_path, int fit_mode,
                                       const optscale_prior_t* prior,
                                       int aggregation, int csv_format,
                                       char** out_text, uint32_t* skipped,
                                       int* used_default_prior);

/* Runs the simulation campaign described by a JSON config file and writes
 * report.csv, summary.json, chart.svg (and optionally scorelog.jsonl) into
 * out_dir. seed_override, when non-NULL, replaces the config's seed. */
OPTSCALE_API int optscale_simulate(const char* config_path,
                                   const char* out_dir,
                                   const uint64_t* seed_override);

/* Offline replay of a recorded score log under a stopping policy; writes
 * replay.csv and replay_summary.json into out_dir. */
OPTSCALE_API int optscale_replay(const char* log_path,
                                 const optscale_policy_t* policy, int fit_mode,
                                 const optscale_prior_t* prior, uint64_t seed,
                                 const char* out_dir);

OPTSCALE_API void optscale_string_free(char* text);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* OPTSCALE_OPTSCALE_H */
