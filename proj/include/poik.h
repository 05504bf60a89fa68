/*
 * poik — Poisson distribution of order k.
 *
 * C interface to the numerics core: pmf/cdf tables that stay stable far past
 * the range of exp(-k*lambda), integer median and mode, the boundary-rate
 * solver for a target median, the mean/median scaling-law fits, and the
 * ground-truth oracles (series exponentiation, seeded sampling).
 *
 * Conventions:
 *   - Every fallible call returns poik_status; results go through out
 *     pointers. poik_last_error() carries a thread-local detail message for
 *     the most recent failure on the calling thread.
 *   - Handles (poik_dist, poik_table) are opaque, immutable once created,
 *     safe to share across threads, and freed with the matching _destroy.
 *   - Array-filling calls follow the two-call pattern: pass out = NULL to
 *     query the required count.
 */

#ifndef POIK_H
#define POIK_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define POIK_API __declspec(dllexport)
#else
#define POIK_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum poik_status {
  POIK_OK = 0,
  POIK_ERR_INVALID_ARGUMENT = 1,
  POIK_ERR_DOMAIN = 2,           /* input outside the operation's domain */
  POIK_ERR_GUARD_EXCEEDED = 3,   /* outside a reference path's numeric envelope */
  POIK_ERR_ALLOCATION_BOUND = 4, /* table size beyond the configured cap */
  POIK_ERR_OUT_OF_RANGE = 5,     /* index past a table end */
  POIK_ERR_BRACKET_FAILURE = 6,  /* root bracketing found no sign change */
  POIK_ERR_SINGULAR_SYSTEM = 7,  /* rank-deficient least-squares system */
  POIK_ERR_BUFFER_TOO_SMALL = 8,
  POIK_ERR_INTERNAL = 9
} poik_status;

POIK_API const char *poik_status_name(poik_status s);
POIK_API const char *poik_last_error(void);

/* ---------- distribution handles ---------- */

typedef struct poik_dist poik_dist;

/* k >= 1, lambda > 0 (lambda = 0 is rejected: the law degenerates to a point
 * mass at zero). */
POIK_API poik_status poik_dist_create(int64_t k, double lambda, poik_dist **out);
POIK_API void poik_dist_destroy(poik_dist *d);

POIK_API int64_t poik_dist_k(const poik_dist *d);
POIK_API double poik_dist_lambda(const poik_dist *d);
POIK_API int64_t poik_dist_kappa(const poik_dist *d);    /* k(k+1)/2, exact */
POIK_API double poik_dist_mean(const poik_dist *d);      /* kappa * lambda */
POIK_API double poik_dist_variance(const poik_dist *d);  /* k(k+1)(2k+1)/6 * lambda */
POIK_API int64_t poik_dist_support_bound(const poik_dist *d); /* tail beyond < 1e-12 */

/* Smallest nu with P(Y <= nu) >= 1/2. */
POIK_API poik_status poik_dist_median(const poik_dist *d, int64_t *out);

/* Global maxima of the pmf; ties within relative 1e-12 are all reported.
 * Fills up to `capacity` mode locations and sets *count to the full tally. */
POIK_API poik_status poik_dist_mode(const poik_dist *d, int64_t *modes, size_t capacity,
                                    size_t *count, double *peak_probability);

/* Reference pmf from the closed combinatorial sums (three branches). Guarded
 * to k*lambda <= 700; validation path, the table is the scalable one. */
POIK_API poik_status poik_pmf_combinatorial(const poik_dist *d, int64_t n, double *out);

/* ---------- pmf tables ---------- */

typedef struct poik_table poik_table;

/* Table of p_0..p_n_max. entry_cap limits the allocation (0 = default 1e7). */
POIK_API poik_status poik_table_create(const poik_dist *d, int64_t n_max, int64_t entry_cap,
                                       poik_table **out);
POIK_API void poik_table_destroy(poik_table *t);
POIK_API int64_t poik_table_n_max(const poik_table *t);
POIK_API poik_status poik_table_prob(const poik_table *t, int64_t n, double *out);
POIK_API poik_status poik_table_log_prob(const poik_table *t, int64_t n, double *out);
POIK_API poik_status poik_table_cdf(const poik_table *t, int64_t n, double *out);

/* ---------- boundary-rate solver ---------- */

typedef struct poik_solve_result {
  int64_t k;
  int64_t nu;
  double lambda_star; /* rate at which P(Y <= nu) = 1/2 */
  double mu_star;     /* kappa * lambda_star */
  double residual;    /* solved equation's value at lambda_star */
  double bracket_lo;
  double bracket_hi;
  int32_t iterations;
  int32_t used_cdf_bisection; /* 1 when nu > k forced the generic cdf path */
} poik_solve_result;

/* Log-form residual k*lambda - ln2 - ln(sum_{j<=nu} C(nu,j) lambda^j/j!);
 * zero exactly at lambda_star. POIK_ERR_DOMAIN for nu > k. */
POIK_API poik_status poik_median_equation_gap(int64_t k, int64_t nu, double lambda, double *out);

POIK_API poik_status poik_solve_lambda_star(int64_t k, int64_t nu, poik_solve_result *out);

/* order 1: ln2/(k-nu); orders 2-3 add the iterated correction terms.
 * POIK_ERR_DOMAIN for nu >= k. */
POIK_API poik_status poik_lambda_star_approx(int64_t k, int64_t nu, int order, double *out);

/* *ok = 1 iff the cdf at nu is 1/2 within 1e-9 at lambda_star and the median
 * flips nu -> nu+1 across it. */
POIK_API poik_status poik_verify_boundary(const poik_solve_result *r, int *ok);

/* ---------- scaling laws and fits ---------- */

POIK_API int64_t poik_base_median(int64_t n, int64_t k); /* n - floor((k+4)/8) */

/* n - floor((3k+5)/8); POIK_ERR_DOMAIN for n < 2*kappa. */
POIK_API poik_status poik_mode_conjecture(int64_t n, int64_t k, int64_t *out);

typedef struct poik_delta_fit {
  double slope;
  double intercept;
  double inv_k_coefficient;
} poik_delta_fit;

typedef struct poik_series_fit {
  double a0; /* pinned to (ln 2)/2 */
  double a1_const, a1_inv;
  double a2_const, a2_inv;
  double a3_const, a3_inv;
} poik_series_fit;

/* Published reference coefficients. */
POIK_API poik_delta_fit poik_paper_delta_fit(void);
POIK_API poik_series_fit poik_paper_series_fit(void);

/* slope*k + intercept + inv_k_coefficient/k. */
POIK_API poik_status poik_delta_k_eval(const poik_delta_fit *f, int64_t k, double *out);

/* (k+1) * (a0 + a1 x + a2 x^2 + a3 x^3), x = nu/k, a_i = const + inv/(k+1). */
POIK_API poik_status poik_mu_series_eval(const poik_series_fit *f, int64_t k, int64_t nu,
                                         double *out);

/* Least squares of mu_star - k on {k, 1, 1/k}; >= 3 distinct k required. */
POIK_API poik_status poik_fit_delta_k(const int64_t *k, const double *mu_star, size_t count,
                                      poik_delta_fit *out);

/* Least squares of mu/(k+1) - (ln2)/2 on {x^i, x^i/(k+1)}, i = 1..3;
 * requires >= 2 distinct k and >= 4 distinct nu/k. */
POIK_API poik_status poik_fit_mu_series(const int64_t *k, const int64_t *nu,
                                        const double *mu_star, size_t count,
                                        poik_series_fit *out);

typedef struct poik_residual_summary {
  double max_abs;
  double bias; /* mean residual */
} poik_residual_summary;

/* Per-point residuals (mu_star - k) - fit(k); `residuals` may be NULL. */
POIK_API poik_status poik_residuals_delta_k(const poik_delta_fit *f, const int64_t *k,
                                            const double *mu_star, size_t count,
                                            double *residuals, poik_residual_summary *summary);

/* Per-point residuals mu/(k+1) - series(nu/k); `residuals` may be NULL. */
POIK_API poik_status poik_residuals_mu_series(const poik_series_fit *f, const int64_t *k,
                                              const int64_t *nu, const double *mu_star,
                                              size_t count, double *residuals,
                                              poik_residual_summary *summary);

/* ---------- sweeps ---------- */

typedef struct poik_sweep_record {
  int64_t k;
  int64_t n;           /* pinned integer mean; lambda = n/kappa */
  int64_t median;
  int64_t base_median;
  double scaled_diff;  /* (base_median - median)/k */
  double scaled_mean;  /* n/k */
} poik_sweep_record;

POIK_API int64_t poik_default_sweep_n_lo(int64_t k); /* ceil((k+1) ln2 / 2) */

/* Rows for integer means n in [n_lo, n_hi]; n_lo < 0 selects the default
 * start. Rows are computed on `jobs` threads (<= 1: serial); ordering is by n
 * regardless of scheduling. Two-call pattern on out/capacity/count. */
POIK_API poik_status poik_sweep_base_median_diff(int64_t k, int64_t n_lo, int64_t n_hi,
                                                 int jobs, poik_sweep_record *out,
                                                 size_t capacity, size_t *count);

/* Boundary solutions for nu = 0..nu_hi at fixed k. */
POIK_API poik_status poik_sweep_nu_mu(int64_t k, int64_t nu_hi, int jobs,
                                      poik_solve_result *out, size_t capacity, size_t *count);

/* ---------- sampling oracle ---------- */

/* `count` draws of Y = sum i*N_i, N_i iid Poisson(lambda), from a seeded
 * deterministic generator; identical (k, lambda, seed, count) always yields
 * identical output. */
POIK_API poik_status poik_sample(const poik_dist *d, uint64_t seed, size_t count, int64_t *out);

/* ---------- self verification ---------- */

typedef void (*poik_report_fn)(const char *line, void *user);

/* Runs the cross-validation suite (full != 0 for the exhaustive desk sweeps).
 * Emits one line per check through `report` (may be NULL) and stores the
 * number of failing checks in *failures. */
POIK_API poik_status poik_verify(int full, uint64_t seed, poik_report_fn report, void *user,
                                 int *failures);

#ifdef __cplusplus
}
#endif

#endif /* POIK_H */
