#include "uinfer/uinfer.h"

#include <cstring>
#include <exception>
#include <new>
#include <span>
#include <string>

#include "dataset.hpp"
#include "error.hpp"
#include "families.hpp"
#include "harness.hpp"
#include "mathutil.hpp"
#include "sequential.hpp"
#include "sieve.hpp"
#include "split.hpp"

struct uinfer_dataset {
  uinfer::Dataset d;
};

struct uinfer_seq {
  uinfer::SeqState s;
};

namespace {

using namespace uinfer;

thread_local std::string g_error;

template <typename F>
int guarded(F&& f) {
  try {
    f();
    return UINFER_OK;
  } catch (const Error& e) {
    g_error = e.what();
    return static_cast<int>(e.code());
  } catch (const std::bad_alloc&) {
    g_error = "out of memory";
    return UINFER_ERR_RUNTIME;
  } catch (const std::exception& e) {
    g_error = e.what();
    return UINFER_ERR_RUNTIME;
  } catch (...) {
    g_error = "unknown failure";
    return UINFER_ERR_RUNTIME;
  }
}

void require(const void* p, const char* name) {
  if (!p) throw_invalid(std::string(name) + " is null");
}

FamilySpec cpp_spec(const uinfer_family_spec* s) {
  require(s, "family spec");
  FamilySpec out;
  switch (s->family) {
    case UINFER_FAMILY_GAUSSIAN:
      out.tag = Family::Gaussian;
      break;
    case UINFER_FAMILY_GAUSSIAN_UNKNOWN_VAR:
      out.tag = Family::GaussianUnknownVar;
      break;
    case UINFER_FAMILY_MIXTURE:
      out.tag = Family::MixtureK;
      break;
    case UINFER_FAMILY_UNIFORM_SCALE:
      out.tag = Family::UniformScale;
      break;
    case UINFER_FAMILY_MVN_IDENTITY:
      out.tag = Family::MvnIdentity;
      break;
    default:
      throw_invalid("unknown family tag");
  }
  out.k = s->k ? s->k : 1;
  out.dim = s->dim ? s->dim : 1;
  if (s->sigma == 0.0) {
    out.sigma = 1.0;
  } else if (s->sigma > 0.0) {
    out.sigma = s->sigma;
  } else {
    throw_invalid("sigma must be positive");
  }
  out.fixed_sigma = s->fixed_sigma != 0;
  return out;
}

Constraint cpp_null(const uinfer_null_spec* n, const FamilySpec& spec) {
  if (!n) return Constraint::full();
  switch (n->kind) {
    case UINFER_NULL_FULL:
      return Constraint::full();
    case UINFER_NULL_FIXED_POINT:
      require(n->point, "fixed-point parameter");
      return Constraint::fixed_point(
          packed_to_param(spec, std::span<const double>(n->point, n->point_len)));
    case UINFER_NULL_MEAN_AT_MOST:
      return Constraint::mean_at_most(n->bound);
    case UINFER_NULL_COMPONENTS:
      return Constraint::mixture_components(n->k);
    case UINFER_NULL_FIXED_MEAN:
      return Constraint::fixed_mean(n->psi);
  }
  throw_invalid("unknown null kind");
}

DataSplit cpp_split(const uinfer_split_spec* s, std::size_t n) {
  if (!s || s->kind == UINFER_SPLIT_FIRST_HALF) return first_half_split(n);
  if (s->kind == UINFER_SPLIT_SEEDED) return seeded_split(n, s->seed);
  throw_invalid("unknown split kind");
}

SplitScheme cpp_scheme(const uinfer_scheme* s) {
  if (!s) return SplitScheme::single();
  switch (s->kind) {
    case UINFER_SCHEME_SINGLE:
      return SplitScheme::single();
    case UINFER_SCHEME_CROSSFIT:
      return SplitScheme::crossfit();
    case UINFER_SCHEME_KFOLD:
      return SplitScheme::kfold(s->folds ? s->folds : 5);
    case UINFER_SCHEME_SUBSAMPLE:
      return SplitScheme::subsample(s->folds ? s->folds : 5,
                                    s->draws ? s->draws : 10, s->seed);
  }
  throw_invalid("unknown scheme kind");
}

EmOptions cpp_em(const uinfer_em_options* e) {
  EmOptions out;
  if (!e) return out;
  if (e->restarts) out.restarts = e->restarts;
  if (e->tol > 0.0) out.tol = e->tol;
  if (e->max_iter) out.max_iter = e->max_iter;
  out.seed = e->seed;
  return out;
}

void put_outcome(const TestOutcome& o, uinfer_test_outcome* out) {
  out->log_statistic = o.log_statistic;
  out->log_threshold = o.log_threshold;
  out->reject = o.reject ? 1 : 0;
  out->p_bound = o.p_bound;
}

void put_interval(const Interval& iv, uinfer_interval* out) {
  out->lo = iv.lo;
  out->hi = iv.hi;
}

ParamVector cpp_param(const FamilySpec& spec, const double* packed,
                      std::size_t len) {
  require(packed, "packed parameter");
  return packed_to_param(spec, std::span<const double>(packed, len));
}

}  // namespace

extern "C" {

const char* uinfer_last_error(void) { return g_error.c_str(); }

void uinfer_em_defaults(uinfer_em_options* out) {
  if (!out) return;
  EmOptions d;
  out->restarts = d.restarts;
  out->tol = d.tol;
  out->max_iter = d.max_iter;
  out->seed = d.seed;
}

int uinfer_dataset_create(const double* values, size_t n, size_t dim,
                          uinfer_dataset** out) {
  return guarded([&] {
    require(values, "values");
    require(out, "out");
    Dataset d = dataset_create(values, n, dim);
    *out = new uinfer_dataset{std::move(d)};
  });
}

int uinfer_dataset_read_csv(const char* path, uinfer_dataset** out) {
  return guarded([&] {
    require(path, "path");
    require(out, "out");
    *out = new uinfer_dataset{read_csv_file(path)};
  });
}

int uinfer_dataset_parse_csv(const char* text, uinfer_dataset** out) {
  return guarded([&] {
    require(text, "text");
    require(out, "out");
    *out = new uinfer_dataset{parse_csv(text)};
  });
}

size_t uinfer_dataset_size(const uinfer_dataset* d) {
  return d ? d->d.size() : 0;
}

size_t uinfer_dataset_dim(const uinfer_dataset* d) {
  return d ? d->d.dim : 0;
}

int uinfer_dataset_value(const uinfer_dataset* d, size_t row, size_t col,
                         double* out) {
  return guarded([&] {
    require(d, "dataset");
    require(out, "out");
    if (row >= d->d.size() || col >= d->d.dim) {
      throw_invalid("index out of range");
    }
    *out = d->d.row(row)[col];
  });
}

void uinfer_dataset_free(uinfer_dataset* d) { delete d; }

int uinfer_sample(const uinfer_family_spec* spec, const double* packed,
                  size_t packed_len, size_t n, uint64_t seed,
                  uinfer_dataset** out) {
  return guarded([&] {
    require(out, "out");
    FamilySpec fs = cpp_spec(spec);
    ParamVector p = cpp_param(fs, packed, packed_len);
    *out = new uinfer_dataset{sample_from(fs, p, n, seed)};
  });
}

int uinfer_fit_mle(const uinfer_family_spec* spec, const uinfer_dataset* data,
                   const uinfer_null_spec* null_c, const uinfer_em_options* em,
                   double* packed_out, size_t cap, size_t* out_len) {
  return guarded([&] {
    require(data, "dataset");
    require(out_len, "out_len");
    FamilySpec fs = cpp_spec(spec);
    std::vector<std::size_t> idx(data->d.size());
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    ParamVector p = fit_mle(fs, data->d, idx, cpp_null(null_c, fs), cpp_em(em));
    std::vector<double> packed = param_to_packed(fs, p);
    *out_len = packed.size();
    if (!packed_out || cap < packed.size()) {
      throw_invalid("parameter buffer too small");
    }
    std::memcpy(packed_out, packed.data(), packed.size() * sizeof(double));
  });
}

int uinfer_log_likelihood(const uinfer_family_spec* spec,
                          const uinfer_dataset* data, const double* packed,
                          size_t packed_len, double* out) {
  return guarded([&] {
    require(data, "dataset");
    require(out, "out");
    FamilySpec fs = cpp_spec(spec);
    ParamVector p = cpp_param(fs, packed, packed_len);
    std::vector<std::size_t> idx(data->d.size());
    for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
    *out = log_likelihood(fs, p, data->d, idx);
  });
}

int uinfer_split_lrt(const uinfer_family_spec* spec, const uinfer_dataset* data,
                     const uinfer_split_spec* split,
                     const uinfer_null_spec* null_c, double alpha,
                     const uinfer_em_options* em, uinfer_test_outcome* out) {
  uinfer_scheme single{UINFER_SCHEME_SINGLE, 0, 0, 0};
  return uinfer_scheme_lrt(spec, data, split, &single, null_c, alpha, em, out);
}

int uinfer_crossfit_lrt(const uinfer_family_spec* spec,
                        const uinfer_dataset* data,
                        const uinfer_split_spec* split,
                        const uinfer_null_spec* null_c, double alpha,
                        const uinfer_em_options* em, uinfer_test_outcome* out) {
  uinfer_scheme cf{UINFER_SCHEME_CROSSFIT, 0, 0, 0};
  return uinfer_scheme_lrt(spec, data, split, &cf, null_c, alpha, em, out);
}

int uinfer_scheme_lrt(const uinfer_family_spec* spec, const uinfer_dataset* data,
                      const uinfer_split_spec* split,
                      const uinfer_scheme* scheme,
                      const uinfer_null_spec* null_c, double alpha,
                      const uinfer_em_options* em, uinfer_test_outcome* out) {
  return guarded([&] {
    require(data, "dataset");
    require(out, "out");
    FamilySpec fs = cpp_spec(spec);
    EmOptions eo = cpp_em(em);
    TestOutcome o =
        scheme_lrt(fs, data->d, cpp_split(split, data->d.size()),
                   cpp_null(null_c, fs), mle_estimator(fs, eo), alpha,
                   cpp_scheme(scheme), eo);
    put_outcome(o, out);
  });
}

int uinfer_relaxed_split_lrt(const uinfer_family_spec* spec,
                             const uinfer_dataset* data,
                             const uinfer_split_spec* split, double log_f0_max,
                             double alpha, const uinfer_em_options* em,
                             uinfer_test_outcome* out) {
  return guarded([&] {
    require(data, "dataset");
    require(out, "out");
    FamilySpec fs = cpp_spec(spec);
    TestOutcome o =
        relaxed_split_lrt(fs, data->d, cpp_split(split, data->d.size()),
                          log_f0_max, mle_estimator(fs, cpp_em(em)), alpha);
    put_outcome(o, out);
  });
}

int uinfer_universal_set_contains(const uinfer_family_spec* spec,
                                  const uinfer_dataset* data,
                                  const uinfer_split_spec* split,
                                  const uinfer_scheme* scheme,
                                  const double* theta_packed, size_t packed_len,
                                  double alpha, const uinfer_em_options* em,
                                  int* out) {
  return guarded([&] {
    require(data, "dataset");
    require(out, "out");
    FamilySpec fs = cpp_spec(spec);
    ParamVector theta = cpp_param(fs, theta_packed, packed_len);
    bool in = universal_set_contains(fs, theta, data->d,
                                     cpp_split(split, data->d.size()),
                                     mle_estimator(fs, cpp_em(em)), alpha,
                                     cpp_scheme(scheme));
    *out = in ? 1 : 0;
  });
}

int uinfer_confset_interval(const uinfer_family_spec* spec,
                            const uinfer_dataset* data,
                            const uinfer_split_spec* split,
                            const uinfer_scheme* scheme, double alpha,
                            const uinfer_em_options* em, uinfer_interval* out) {
  return guarded([&] {
    require(data, "dataset");
    require(out, "out");
    FamilySpec fs = cpp_spec(spec);
    Interval iv = confset_interval(fs, data->d, cpp_split(split, data->d.size()),
                                   mle_estimator(fs, cpp_em(em)), alpha,
                                   cpp_scheme(scheme));
    put_interval(iv, out);
  });
}

int uinfer_confset_grid(const uinfer_family_spec* spec,
                        const uinfer_dataset* data,
                        const uinfer_split_spec* split,
                        const uinfer_scheme* scheme, double alpha,
                        const uinfer_em_options* em, double lo, double hi,
                        size_t points, int* flags_out) {
  return guarded([&] {
    require(data, "dataset");
    require(flags_out, "flags_out");
    FamilySpec fs = cpp_spec(spec);
    std::vector<int> flags =
        confset_grid(fs, data->d, cpp_split(split, data->d.size()),
                     mle_estimator(fs, cpp_em(em)), alpha, cpp_scheme(scheme),
                     lo, hi, points);
    std::memcpy(flags_out, flags.data(), flags.size() * sizeof(int));
  });
}

int uinfer_profile_interval(const uinfer_family_spec* spec,
                            const uinfer_dataset* data,
                            const uinfer_split_spec* split, double alpha,
                            uinfer_interval* out) {
  return guarded([&] {
    require(data, "dataset");
    require(out, "out");
    FamilySpec fs = cpp_spec(spec);
    Interval iv = profile_interval(fs, data->d, cpp_split(split, data->d.size()),
                                   mle_estimator(fs, {}), alpha);
    put_interval(iv, out);
  });
}

int uinfer_gaussian_region(const uinfer_dataset* data,
                           const uinfer_split_spec* split, double alpha,
                           double* center, double* squared_radius) {
  return guarded([&] {
    require(data, "dataset");
    require(center, "center");
    require(squared_radius, "squared_radius");
    GaussianRegion r =
        gaussian_region(data->d, cpp_split(split, data->d.size()), alpha);
    std::memcpy(center, r.center.data(), r.center.size() * sizeof(double));
    *squared_radius = r.squared_radius;
  });
}

int uinfer_uniform_intervals(const uinfer_dataset* data,
                             const uinfer_split_spec* split, double alpha,
                             uinfer_interval* crossfit,
                             uinfer_interval* crossfit_support,
                             uinfer_interval* classical) {
  return guarded([&] {
    require(data, "dataset");
    if (crossfit || crossfit_support) {
      DataSplit sp = cpp_split(split, data->d.size());
      if (crossfit) {
        put_interval(uniform_crossfit_interval(data->d, sp, alpha),
                     crossfit);
      }
      if (crossfit_support) {
        put_interval(uniform_crossfit_interval_support(data->d, sp, alpha),
                     crossfit_support);
      }
    }
    if (classical) {
      put_interval(uniform_classical_interval(data->d, alpha), classical);
    }
  });
}

int uinfer_seq_create(const uinfer_family_spec* spec,
                      const uinfer_null_spec* null_c,
                      const double* theta1_packed, size_t packed_len,
                      size_t t0, const uinfer_em_options* em,
                      uinfer_seq** out) {
  return guarded([&] {
    require(out, "out");
    FamilySpec fs = cpp_spec(spec);
    ParamVector theta1 = cpp_param(fs, theta1_packed, packed_len);
    SeqState s = seq_init(fs, cpp_null(null_c, fs), theta1, t0, cpp_em(em));
    *out = new uinfer_seq{std::move(s)};
  });
}

int uinfer_seq_update(uinfer_seq* seq, const double* y, size_t dim) {
  return guarded([&] {
    require(seq, "sequential state");
    require(y, "observation");
    seq_update(seq->s, std::span<const double>(y, dim));
  });
}

int uinfer_seq_snapshot_get(const uinfer_seq* seq, uinfer_seq_snapshot* out) {
  return guarded([&] {
    require(seq, "sequential state");
    require(out, "out");
    AnytimeP p = seq_anytime_p(seq->s);
    out->t = seq->s.t;
    out->log_m = seq->s.log_m;
    out->p_t = p.p_t;
    out->p_bar_t = p.p_bar_t;
  });
}

int uinfer_seq_should_stop(const uinfer_seq* seq, double alpha, int* out) {
  return guarded([&] {
    require(seq, "sequential state");
    require(out, "out");
    *out = seq_should_stop(seq->s, alpha) ? 1 : 0;
  });
}

int uinfer_seq_confseq_contains(const uinfer_seq* seq, const double* packed,
                                size_t packed_len, double alpha, int* out) {
  return guarded([&] {
    require(seq, "sequential state");
    require(out, "out");
    ParamVector theta = cpp_param(seq->s.family, packed, packed_len);
    *out = confseq_contains(seq->s, theta, alpha) ? 1 : 0;
  });
}

void uinfer_seq_free(uinfer_seq* seq) { delete seq; }

int uinfer_sieve_mixture(const uinfer_dataset* data,
                         const uinfer_split_spec* split, double alpha,
                         size_t j_max, int fixed_sigma, double sigma,
                         const uinfer_em_options* em,
                         uinfer_sieve_result* out, double* log_stats,
                         size_t* n_stats) {
  return guarded([&] {
    require(data, "dataset");
    require(out, "out");
    SieveResult r = select_mixture_order(data->d, cpp_split(split, data->d.size()),
                                         alpha, j_max, fixed_sigma != 0, sigma,
                                         cpp_em(em));
    out->j_hat = r.j_hat;
    out->levels_tested = r.levels_tested;
    if (n_stats) *n_stats = r.log_statistics.size();
    if (log_stats) {
      std::memcpy(log_stats, r.log_statistics.data(),
                  r.log_statistics.size() * sizeof(double));
    }
  });
}

int uinfer_sim_type1(const uinfer_type1_config* cfg, uinfer_rate_report* out) {
  return guarded([&] {
    require(cfg, "config");
    require(out, "out");
    Type1Config c;
    require(cfg->family, "family name");
    require(cfg->variant, "variant name");
    if (!parse_t1_family(cfg->family, c.family)) {
      throw_invalid(std::string("unknown family: ") + cfg->family);
    }
    if (!parse_t1_variant(cfg->variant, c.variant)) {
      throw_invalid(std::string("unknown variant: ") + cfg->variant);
    }
    c.n = cfg->n;
    c.alpha = cfg->alpha;
    c.reps = cfg->reps;
    c.seed = cfg->seed;
    c.threads = cfg->threads;
    if (cfg->eta != 0.0) c.eta = cfg->eta;
    if (cfg->folds) c.folds = cfg->folds;
    if (cfg->draws) c.subsample_draws = cfg->draws;
    RateReport r = simulate_type1(c);
    out->rate = r.rate;
    out->se = r.se;
    out->reps = r.reps;
  });
}

int uinfer_sim_coverage(const char* family, size_t n, double alpha,
                        size_t reps, double truth, uint64_t seed,
                        unsigned threads, uinfer_rate_report* out) {
  return guarded([&] {
    require(family, "family name");
    require(out, "out");
    CoverageConfig c;
    std::string_view f(family);
    if (f == "gaussian") {
      c.family = CovFamily::Gaussian;
      c.mu_truth = truth;
    } else if (f == "uniform") {
      c.family = CovFamily::Uniform;
      c.theta_truth = truth;
    } else {
      throw_invalid(std::string("unknown family: ") + family);
    }
    c.n = n;
    c.alpha = alpha;
    c.reps = reps;
    c.seed = seed;
    c.threads = threads;
    RateReport r = simulate_coverage(c);
    out->rate = r.rate;
    out->se = r.se;
    out->reps = r.reps;
  });
}

int uinfer_sim_power(const double* grid, size_t grid_len, size_t n,
                     double alpha, size_t reps, size_t boot_b,
                     int with_bootstrap, uint64_t seed, unsigned threads,
                     uinfer_power_point* out, size_t cap, size_t* out_len) {
  return guarded([&] {
    require(out_len, "out_len");
    PowerConfig c;
    if (grid_len > 0) {
      require(grid, "grid");
      c.mu_grid.assign(grid, grid + grid_len);
    }
    const std::size_t need = grid_len > 0 ? grid_len : 13;
    *out_len = need;
    if (!out || cap < need) throw_invalid("power point buffer too small");
    c.n = n;
    c.alpha = alpha;
    c.reps = reps;
    c.boot_b = boot_b;
    c.with_bootstrap = with_bootstrap != 0;
    c.seed = seed;
    c.threads = threads;
    PowerReport r = simulate_power_curve(c);
    *out_len = r.points.size();
    for (std::size_t i = 0; i < r.points.size(); ++i) {
      out[i].mu = r.points[i].mu;
      out[i].power_universal = r.points[i].power_universal;
      out[i].se_u = r.points[i].se_u;
      out[i].power_bootstrap = r.points[i].power_bootstrap;
      out[i].se_b = r.points[i].se_b;
    }
  });
}

int uinfer_sim_radius(size_t d, size_t m, double alpha, size_t reps,
                      uint64_t seed, unsigned threads,
                      uinfer_radius_report* out) {
  return guarded([&] {
    require(out, "out");
    RadiusConfig c;
    c.d = d;
    c.m = m;
    c.alpha = alpha;
    c.reps = reps;
    c.seed = seed;
    c.threads = threads;
    RadiusReport r = radius_experiment(c);
    out->d = r.d;
    out->n = r.n;
    out->alpha = r.alpha;
    out->emp_mean_r2 = r.emp_mean_r2;
    out->theory_r2 = r.theory_r2;
    out->classical_r2 = r.classical_r2;
    out->ratio_to_classical = r.ratio_to_classical;
    out->reps = r.reps;
  });
}

int uinfer_sim_seq(size_t horizon, double alpha, size_t reps, double mu_truth,
                   double mu_null, size_t t0, uint64_t seed, unsigned threads,
                   uinfer_seq_sim_report* out) {
  return guarded([&] {
    require(out, "out");
    SeqExpConfig c;
    c.horizon = horizon;
    c.alpha = alpha;
    c.reps = reps;
    c.mu_truth = mu_truth;
    c.mu_null = mu_null;
    c.t0 = t0;
    c.seed = seed;
    c.threads = threads;
    SeqExpReport r = seq_crossing_experiment(c);
    out->crossing_rate = r.crossing_rate;
    out->se = r.se;
    out->coverage_rate = r.coverage_rate;
    out->se_coverage = r.se_coverage;
    out->horizon = r.horizon;
    out->alpha = r.alpha;
    out->reps = r.reps;
  });
}

int uinfer_bootstrap_mixture_lrt(const uinfer_family_spec* spec,
                                 const uinfer_dataset* data, size_t k0,
                                 size_t k1, size_t b, double alpha,
                                 uint64_t seed, const uinfer_em_options* em,
                                 uinfer_test_outcome* out) {
  return guarded([&] {
    require(data, "dataset");
    require(out, "out");
    FamilySpec fs = cpp_spec(spec);
    TestOutcome o = bootstrap_mixture_lrt(
        fs, data->d, k0, k1, b, alpha, seed,
        em ? cpp_em(em) : mc_em_bootstrap_options());
    put_outcome(o, out);
  });
}

int uinfer_chi_square_quantile(double p, double dof, double* out) {
  return guarded([&] {
    require(out, "out");
    *out = chi_square_quantile(p, dof);
  });
}

}  // extern "C"
