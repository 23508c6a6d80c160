/* C interface to the universal inference library.
 *
 * Every function returns a status code; UINFER_OK is 0. On any failure the
 * thread-local message from uinfer_last_error() describes what went wrong
 * and output arguments are left untouched. Handles are freed with their
 * matching *_free; passing NULL to a *_free is a no-op.
 *
 * Parameters travel packed as doubles:
 *   gaussian              [mu]
 *   gaussian_unknown_var  [mu, sigma]
 *   mixture (k blocks)    [w_1..w_k, mu_1..mu_k, sigma_1..sigma_k]
 *   uniform_scale         [theta]
 *   mvn_identity          [mu_1..mu_d]
 * A mixture parameter may carry fewer blocks than the spec's k; it then
 * denotes a point of the larger class.
 */
#ifndef UINFER_H
#define UINFER_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

#define UINFER_OK 0
#define UINFER_ERR_RUNTIME 1
#define UINFER_ERR_INVALID 2
#define UINFER_ERR_DEGENERATE 3
#define UINFER_ERR_UNSUPPORTED 4

/* Message for the most recent failure on this thread. */
const char* uinfer_last_error(void);

typedef struct uinfer_dataset uinfer_dataset;
typedef struct uinfer_seq uinfer_seq;

enum {
  UINFER_FAMILY_GAUSSIAN = 0,
  UINFER_FAMILY_GAUSSIAN_UNKNOWN_VAR = 1,
  UINFER_FAMILY_MIXTURE = 2,
  UINFER_FAMILY_UNIFORM_SCALE = 3,
  UINFER_FAMILY_MVN_IDENTITY = 4
};

typedef struct uinfer_family_spec {
  int family;
  size_t k;        /* mixture component count */
  size_t dim;      /* mvn observation dimension */
  double sigma;    /* gaussian known scale; mixture scale when fixed */
  int fixed_sigma; /* mixture: freeze all component scales at sigma */
} uinfer_family_spec;

enum {
  UINFER_NULL_FULL = 0,        /* unconstrained */
  UINFER_NULL_FIXED_POINT = 1, /* packed point */
  UINFER_NULL_MEAN_AT_MOST = 2,
  UINFER_NULL_COMPONENTS = 3, /* mixture order */
  UINFER_NULL_FIXED_MEAN = 4  /* profile: mean pinned, scale free */
};

typedef struct uinfer_null_spec {
  int kind;
  const double* point; /* UINFER_NULL_FIXED_POINT */
  size_t point_len;
  double bound; /* UINFER_NULL_MEAN_AT_MOST */
  size_t k;     /* UINFER_NULL_COMPONENTS */
  double psi;   /* UINFER_NULL_FIXED_MEAN */
} uinfer_null_spec;

enum { UINFER_SPLIT_FIRST_HALF = 0, UINFER_SPLIT_SEEDED = 1 };

typedef struct uinfer_split_spec {
  int kind;
  uint64_t seed; /* UINFER_SPLIT_SEEDED */
} uinfer_split_spec;

enum {
  UINFER_SCHEME_SINGLE = 0,
  UINFER_SCHEME_CROSSFIT = 1,
  UINFER_SCHEME_KFOLD = 2,
  UINFER_SCHEME_SUBSAMPLE = 3
};

typedef struct uinfer_scheme {
  int kind;
  size_t folds; /* KFOLD, SUBSAMPLE */
  size_t draws; /* SUBSAMPLE partitions */
  uint64_t seed;
} uinfer_scheme;

typedef struct uinfer_em_options {
  size_t restarts;
  double tol;
  size_t max_iter;
  uint64_t seed;
} uinfer_em_options;

/* Fills the library defaults (10 restarts, tol 1e-8, 500 iterations). */
void uinfer_em_defaults(uinfer_em_options* out);

typedef struct uinfer_test_outcome {
  double log_statistic;
  double log_threshold; /* log(1/alpha) */
  int reject;           /* log_statistic > log_threshold */
  double p_bound;       /* min(1, exp(-log_statistic)) */
} uinfer_test_outcome;

typedef struct uinfer_interval {
  double lo;
  double hi;
} uinfer_interval;

/* ---- datasets ---- */

/* values is row-major n x dim; a copy is taken. */
int uinfer_dataset_create(const double* values, size_t n, size_t dim,
                          uinfer_dataset** out);
/* CSV with header y1,...,yd; errors carry 1-based line numbers. */
int uinfer_dataset_read_csv(const char* path, uinfer_dataset** out);
int uinfer_dataset_parse_csv(const char* text, uinfer_dataset** out);
size_t uinfer_dataset_size(const uinfer_dataset* d);
size_t uinfer_dataset_dim(const uinfer_dataset* d);
int uinfer_dataset_value(const uinfer_dataset* d, size_t row, size_t col,
                         double* out);
void uinfer_dataset_free(uinfer_dataset* d);

int uinfer_sample(const uinfer_family_spec* spec, const double* packed,
                  size_t packed_len, size_t n, uint64_t seed,
                  uinfer_dataset** out);

/* ---- fitting and likelihood ---- */

/* MLE under the null constraint (UINFER_NULL_FULL for unconstrained).
 * Writes the packed parameter; *out_len is set to the required length even
 * when cap is too small, which fails with UINFER_ERR_INVALID. */
int uinfer_fit_mle(const uinfer_family_spec* spec, const uinfer_dataset* data,
                   const uinfer_null_spec* null_c, const uinfer_em_options* em,
                   double* packed_out, size_t cap, size_t* out_len);

int uinfer_log_likelihood(const uinfer_family_spec* spec,
                          const uinfer_dataset* data, const double* packed,
                          size_t packed_len, double* out);

/* ---- split tests and confidence sets ---- */

int uinfer_split_lrt(const uinfer_family_spec* spec, const uinfer_dataset* data,
                     const uinfer_split_spec* split,
                     const uinfer_null_spec* null_c, double alpha,
                     const uinfer_em_options* em, uinfer_test_outcome* out);

int uinfer_crossfit_lrt(const uinfer_family_spec* spec,
                        const uinfer_dataset* data,
                        const uinfer_split_spec* split,
                        const uinfer_null_spec* null_c, double alpha,
                        const uinfer_em_options* em, uinfer_test_outcome* out);

int uinfer_scheme_lrt(const uinfer_family_spec* spec, const uinfer_dataset* data,
                      const uinfer_split_spec* split,
                      const uinfer_scheme* scheme,
                      const uinfer_null_spec* null_c, double alpha,
                      const uinfer_em_options* em, uinfer_test_outcome* out);

/* log_f0_max must upper-bound the maximum null log-likelihood on the
 * evaluation half; the caller owns that guarantee. */
int uinfer_relaxed_split_lrt(const uinfer_family_spec* spec,
                             const uinfer_dataset* data,
                             const uinfer_split_spec* split, double log_f0_max,
                             double alpha, const uinfer_em_options* em,
                             uinfer_test_outcome* out);

int uinfer_universal_set_contains(const uinfer_family_spec* spec,
                                  const uinfer_dataset* data,
                                  const uinfer_split_spec* split,
                                  const uinfer_scheme* scheme,
                                  const double* theta_packed, size_t packed_len,
                                  double alpha, const uinfer_em_options* em,
                                  int* out);

/* Confidence interval for the scalar parameter by bisection on the
 * containment boundary; gaussian, uniform scale and 1-d mvn only. Unbounded
 * sides come back as +/-infinity. */
int uinfer_confset_interval(const uinfer_family_spec* spec,
                            const uinfer_dataset* data,
                            const uinfer_split_spec* split,
                            const uinfer_scheme* scheme, double alpha,
                            const uinfer_em_options* em, uinfer_interval* out);

/* Containment flags over an inclusive grid of points >= 2. */
int uinfer_confset_grid(const uinfer_family_spec* spec,
                        const uinfer_dataset* data,
                        const uinfer_split_spec* split,
                        const uinfer_scheme* scheme, double alpha,
                        const uinfer_em_options* em, double lo, double hi,
                        size_t points, int* flags_out);

/* Profile interval for the mean of gaussian_unknown_var, scale maximized
 * out. */
int uinfer_profile_interval(const uinfer_family_spec* spec,
                            const uinfer_dataset* data,
                            const uinfer_split_spec* split, double alpha,
                            uinfer_interval* out);

/* Closed-form ball for the mvn identity mean on an equal-size split.
 * center must hold dim doubles. */
int uinfer_gaussian_region(const uinfer_dataset* data,
                           const uinfer_split_spec* split, double alpha,
                           double* center, double* squared_radius);

/* Uniform scale intervals on an equal-size split: the crossfit form
 * [min half-max, max half-max (2/alpha)^(1/m)], its support-constrained
 * variant with lo = overall max, and the classical exact interval
 * [max, max (1/alpha)^(1/n)]. Any output pointer may be NULL. */
int uinfer_uniform_intervals(const uinfer_dataset* data,
                             const uinfer_split_spec* split, double alpha,
                             uinfer_interval* crossfit,
                             uinfer_interval* crossfit_support,
                             uinfer_interval* classical);

/* ---- sequential monitoring ---- */

typedef struct uinfer_seq_snapshot {
  size_t t;
  double log_m;
  double p_t;
  double p_bar_t; /* running minimum */
} uinfer_seq_snapshot;

/* theta1 is the plug-in used before any data arrive; t0 is the burn-in
 * horizon (no factors accumulate through t <= t0). */
int uinfer_seq_create(const uinfer_family_spec* spec,
                      const uinfer_null_spec* null_c,
                      const double* theta1_packed, size_t packed_len,
                      size_t t0, const uinfer_em_options* em,
                      uinfer_seq** out);
int uinfer_seq_update(uinfer_seq* seq, const double* y, size_t dim);
int uinfer_seq_snapshot_get(const uinfer_seq* seq, uinfer_seq_snapshot* out);
int uinfer_seq_should_stop(const uinfer_seq* seq, double alpha, int* out);
int uinfer_seq_confseq_contains(const uinfer_seq* seq, const double* packed,
                                size_t packed_len, double alpha, int* out);
void uinfer_seq_free(uinfer_seq* seq);

/* ---- sieve ---- */

typedef struct uinfer_sieve_result {
  size_t j_hat; /* first non-rejected level; j_max+1 when all reject */
  size_t levels_tested;
} uinfer_sieve_result;

/* Mixture-order sieve over k = 1..j_max+1. log_stats (capacity j_max) gets
 * one entry per tested level; either of log_stats/n_stats may be NULL. */
int uinfer_sieve_mixture(const uinfer_dataset* data,
                         const uinfer_split_spec* split, double alpha,
                         size_t j_max, int fixed_sigma, double sigma,
                         const uinfer_em_options* em,
                         uinfer_sieve_result* out, double* log_stats,
                         size_t* n_stats);

/* ---- Monte Carlo experiments ---- */

typedef struct uinfer_rate_report {
  double rate;
  double se;
  size_t reps;
} uinfer_rate_report;

/* family: gaussian | gaussian-bounded-mean | mixture | uniform
 * variant: split | crossfit | kfold | powered | relaxed | subsample */
typedef struct uinfer_type1_config {
  const char* family;
  const char* variant;
  size_t n;
  double alpha;
  size_t reps;
  uint64_t seed;
  unsigned threads;
  double eta;     /* powered; 0 -> 0.5 */
  size_t folds;   /* kfold, subsample; 0 -> 5 */
  size_t draws;   /* subsample; 0 -> 10 */
} uinfer_type1_config;

int uinfer_sim_type1(const uinfer_type1_config* cfg, uinfer_rate_report* out);

/* family: gaussian | uniform; truth is the gaussian mean or uniform scale. */
int uinfer_sim_coverage(const char* family, size_t n, double alpha,
                        size_t reps, double truth, uint64_t seed,
                        unsigned threads, uinfer_rate_report* out);

typedef struct uinfer_power_point {
  double mu;
  double power_universal;
  double se_u;
  double power_bootstrap;
  double se_b;
} uinfer_power_point;

/* grid may be NULL with grid_len 0 for the default 0, 0.25, ..., 3. Fails
 * with *out_len set to the required capacity when cap is too small. */
int uinfer_sim_power(const double* grid, size_t grid_len, size_t n,
                     double alpha, size_t reps, size_t boot_b,
                     int with_bootstrap, uint64_t seed, unsigned threads,
                     uinfer_power_point* out, size_t cap, size_t* out_len);

typedef struct uinfer_radius_report {
  size_t d;
  size_t n;
  double alpha;
  double emp_mean_r2;
  double theory_r2;
  double classical_r2;
  double ratio_to_classical;
  size_t reps;
} uinfer_radius_report;

int uinfer_sim_radius(size_t d, size_t m, double alpha, size_t reps,
                      uint64_t seed, unsigned threads,
                      uinfer_radius_report* out);

typedef struct uinfer_seq_sim_report {
  double crossing_rate;
  double se;
  double coverage_rate;
  double se_coverage;
  size_t horizon;
  double alpha;
  size_t reps;
} uinfer_seq_sim_report;

int uinfer_sim_seq(size_t horizon, double alpha, size_t reps, double mu_truth,
                   double mu_null, size_t t0, uint64_t seed, unsigned threads,
                   uinfer_seq_sim_report* out);

int uinfer_bootstrap_mixture_lrt(const uinfer_family_spec* spec,
                                 const uinfer_dataset* data, size_t k0,
                                 size_t k1, size_t b, double alpha,
                                 uint64_t seed, const uinfer_em_options* em,
                                 uinfer_test_outcome* out);

/* ---- numerics ---- */

/* Inverse chi-square CDF; p in [0,1), dof > 0. */
int uinfer_chi_square_quantile(double p, double dof, double* out);

#ifdef __cplusplus
}
#endif

#endif /* UINFER_H */
