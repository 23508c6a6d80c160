#include "harness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <random>
#include <utility>

#include "error.hpp"
#include "mathutil.hpp"
#include "rng.hpp"
#include "sequential.hpp"
#include "sieve.hpp"
#include "threadpool.hpp"

namespace uinfer {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void check_alpha(double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw_invalid("alpha must be in (0,1)");
}

void check_reps(std::size_t reps) {
  if (reps < 1) throw_invalid("need at least one replication");
}

double binom_se(double rate, std::size_t reps) {
  return std::sqrt(rate * (1.0 - rate) / static_cast<double>(reps));
}

RateReport reduce_rate(const std::vector<char>& hits) {
  RateReport r;
  r.reps = hits.size();
  std::size_t count = 0;
  for (char h : hits) count += (h != 0);
  r.rate = static_cast<double>(count) / static_cast<double>(hits.size());
  r.se = binom_se(r.rate, hits.size());
  return r;
}

FamilySpec gaussian_spec() {
  FamilySpec s;
  s.tag = Family::Gaussian;
  s.sigma = 1.0;
  return s;
}

FamilySpec mixture_spec(std::size_t k) {
  FamilySpec s;
  s.tag = Family::MixtureK;
  s.k = k;
  s.sigma = 1.0;
  s.fixed_sigma = true;
  return s;
}

FamilySpec uniform_spec() {
  FamilySpec s;
  s.tag = Family::UniformScale;
  return s;
}

FamilySpec mvn_spec(std::size_t d) {
  FamilySpec s;
  s.tag = Family::MvnIdentity;
  s.dim = d;
  return s;
}

struct T1Cell {
  FamilySpec model;
  Constraint null_c;
  FamilySpec truth_spec;
  ParamVector truth;
};

T1Cell t1_cell(T1Family f) {
  T1Cell c;
  switch (f) {
    case T1Family::GaussianSimple:
      c.model = gaussian_spec();
      c.null_c = Constraint::fixed_point(ParamVector::gaussian(0.0));
      c.truth_spec = c.model;
      c.truth = ParamVector::gaussian(0.0);
      return c;
    case T1Family::GaussianMeanAtMost:
      // Truth sits on the boundary, the least favorable point.
      c.model = gaussian_spec();
      c.null_c = Constraint::mean_at_most(0.0);
      c.truth_spec = c.model;
      c.truth = ParamVector::gaussian(0.0);
      return c;
    case T1Family::MixtureOrder:
      c.model = mixture_spec(2);
      c.null_c = Constraint::mixture_components(1);
      c.truth_spec = gaussian_spec();
      c.truth = ParamVector::gaussian(0.0);
      return c;
    case T1Family::Uniform:
      c.model = uniform_spec();
      c.null_c = Constraint::fixed_point(ParamVector::uniform_scale(1.0));
      c.truth_spec = c.model;
      c.truth = ParamVector::uniform_scale(1.0);
      return c;
  }
  throw_runtime("unreachable family");
}

}  // namespace

EmOptions mc_em_options() {
  EmOptions em;
  em.restarts = 4;
  em.tol = 1e-7;
  em.max_iter = 300;
  return em;
}

EmOptions mc_em_bootstrap_options() {
  EmOptions em;
  em.restarts = 2;
  em.tol = 1e-6;
  em.max_iter = 200;
  return em;
}

const char* to_string(T1Family f) {
  switch (f) {
    case T1Family::GaussianSimple: return "gaussian";
    case T1Family::GaussianMeanAtMost: return "gaussian-bounded-mean";
    case T1Family::MixtureOrder: return "mixture";
    case T1Family::Uniform: return "uniform";
  }
  return "?";
}

const char* to_string(T1Variant v) {
  switch (v) {
    case T1Variant::Split: return "split";
    case T1Variant::Crossfit: return "crossfit";
    case T1Variant::KFold: return "kfold";
    case T1Variant::Powered: return "powered";
    case T1Variant::Relaxed: return "relaxed";
    case T1Variant::Subsample: return "subsample";
  }
  return "?";
}

bool parse_t1_family(std::string_view s, T1Family& out) {
  for (T1Family f : {T1Family::GaussianSimple, T1Family::GaussianMeanAtMost,
                     T1Family::MixtureOrder, T1Family::Uniform}) {
    if (s == to_string(f)) {
      out = f;
      return true;
    }
  }
  return false;
}

bool parse_t1_variant(std::string_view s, T1Variant& out) {
  for (T1Variant v : {T1Variant::Split, T1Variant::Crossfit, T1Variant::KFold,
                      T1Variant::Powered, T1Variant::Relaxed,
                      T1Variant::Subsample}) {
    if (s == to_string(v)) {
      out = v;
      return true;
    }
  }
  return false;
}

RateReport simulate_type1(const Type1Config& cfg) {
  check_alpha(cfg.alpha);
  check_reps(cfg.reps);
  if (cfg.n < 4) throw_invalid("need at least 4 observations per replication");
  const T1Cell cell = t1_cell(cfg.family);

  std::vector<char> rejects(cfg.reps, 0);
  parallel_for(cfg.reps, cfg.threads, [&](std::size_t rep) {
    const std::uint64_t rep_seed = derive_seed(cfg.seed, rep);
    Dataset data =
        sample_from(cell.truth_spec, cell.truth, cfg.n, derive_seed(rep_seed, 0));
    DataSplit split = seeded_split(cfg.n, derive_seed(rep_seed, 1));
    EmOptions em = cfg.em;
    em.seed = derive_seed(rep_seed, 2);
    Estimator est = mle_estimator(cell.model, em);

    TestOutcome out;
    switch (cfg.variant) {
      case T1Variant::Split:
        out = scheme_lrt(cell.model, data, split, cell.null_c, est, cfg.alpha,
                         SplitScheme::single(), em);
        break;
      case T1Variant::Crossfit:
        out = scheme_lrt(cell.model, data, split, cell.null_c, est, cfg.alpha,
                         SplitScheme::crossfit(), em);
        break;
      case T1Variant::KFold:
        out = scheme_lrt(cell.model, data, split, cell.null_c, est, cfg.alpha,
                         SplitScheme::kfold(cfg.folds), em);
        break;
      case T1Variant::Subsample:
        out = scheme_lrt(cell.model, data, split, cell.null_c, est, cfg.alpha,
                         SplitScheme::subsample(cfg.folds, cfg.subsample_draws,
                                                derive_seed(rep_seed, 3)),
                         em);
        break;
      case T1Variant::Powered: {
        ParamVector theta0 = fit_mle(cell.model, data, split.d0, cell.null_c, em);
        ParamVector theta1 = est(data, split.d1);
        double stat = powered_log_statistic(cfg.eta, cell.model, theta0, theta1,
                                            data, split.d0);
        out = make_outcome(stat, cfg.alpha);
        break;
      }
      case T1Variant::Relaxed: {
        ParamVector theta0 = fit_mle(cell.model, data, split.d0, cell.null_c, em);
        double log_f0 = log_likelihood(cell.model, theta0, data, split.d0) +
                        cfg.relax_log_slack;
        out = relaxed_split_lrt(cell.model, data, split, log_f0, est, cfg.alpha);
        break;
      }
    }
    rejects[rep] = out.reject ? 1 : 0;
  });
  return reduce_rate(rejects);
}

RateReport simulate_coverage(const CoverageConfig& cfg) {
  check_alpha(cfg.alpha);
  check_reps(cfg.reps);
  if (cfg.n < 2) throw_invalid("need at least 2 observations per replication");

  FamilySpec spec;
  ParamVector truth;
  if (cfg.family == CovFamily::Gaussian) {
    spec = gaussian_spec();
    truth = ParamVector::gaussian(cfg.mu_truth);
  } else {
    spec = uniform_spec();
    if (!(cfg.theta_truth > 0.0)) throw_invalid("uniform scale must be positive");
    truth = ParamVector::uniform_scale(cfg.theta_truth);
  }

  std::vector<char> inside(cfg.reps, 0);
  parallel_for(cfg.reps, cfg.threads, [&](std::size_t rep) {
    const std::uint64_t rep_seed = derive_seed(cfg.seed, rep);
    Dataset data = sample_from(spec, truth, cfg.n, derive_seed(rep_seed, 0));
    DataSplit split = seeded_split(cfg.n, derive_seed(rep_seed, 1));
    Estimator est = mle_estimator(spec);
    inside[rep] = universal_set_contains(spec, truth, data, split, est,
                                         cfg.alpha, SplitScheme::single())
                      ? 1
                      : 0;
  });
  return reduce_rate(inside);
}

MeanStatReport mean_split_statistic_at_truth(const MeanStatConfig& cfg) {
  check_reps(cfg.reps);
  if (cfg.m < 1) throw_invalid("need at least 1 observation per half");

  const FamilySpec spec = gaussian_spec();
  const ParamVector truth = ParamVector::gaussian(cfg.mu_truth);
  const std::size_t n = 2 * cfg.m;

  std::vector<double> stats(cfg.reps, 0.0);
  parallel_for(cfg.reps, cfg.threads, [&](std::size_t rep) {
    const std::uint64_t rep_seed = derive_seed(cfg.seed, rep);
    Dataset data = sample_from(spec, truth, n, derive_seed(rep_seed, 0));
    DataSplit split = seeded_split(n, derive_seed(rep_seed, 1));
    ParamVector theta1 = fit_mle(spec, data, split.d1, Constraint::full());
    double log_t =
        log_split_statistic(spec, truth, theta1, data, split.d0);
    stats[rep] = std::exp(log_t);
  });

  MeanStatReport out;
  out.reps = cfg.reps;
  double sum = std::accumulate(stats.begin(), stats.end(), 0.0);
  out.mean = sum / static_cast<double>(cfg.reps);
  double ss = 0.0;
  for (double t : stats) ss += (t - out.mean) * (t - out.mean);
  if (cfg.reps > 1) {
    out.se = std::sqrt(ss / (static_cast<double>(cfg.reps) *
                             static_cast<double>(cfg.reps - 1)));
  }
  return out;
}

RadiusReport radius_experiment(const RadiusConfig& cfg) {
  check_alpha(cfg.alpha);
  check_reps(cfg.reps);
  if (cfg.d < 1) throw_invalid("dimension must be at least 1");
  if (cfg.m < 1) throw_invalid("need at least 1 observation per half");

  const std::size_t n = 2 * cfg.m;
  const FamilySpec spec = mvn_spec(cfg.d);
  const ParamVector truth = ParamVector::mvn(std::vector<double>(cfg.d, 0.0));

  std::vector<double> r2(cfg.reps, 0.0);
  parallel_for(cfg.reps, cfg.threads, [&](std::size_t rep) {
    const std::uint64_t rep_seed = derive_seed(cfg.seed, rep);
    Dataset data = sample_from(spec, truth, n, derive_seed(rep_seed, 0));
    DataSplit split = seeded_split(n, derive_seed(rep_seed, 1));
    r2[rep] = gaussian_region(data, split, cfg.alpha).squared_radius;
  });

  RadiusReport out;
  out.d = cfg.d;
  out.n = n;
  out.alpha = cfg.alpha;
  out.reps = cfg.reps;
  out.emp_mean_r2 = std::accumulate(r2.begin(), r2.end(), 0.0) /
                    static_cast<double>(cfg.reps);
  out.theory_r2 = (4.0 * std::log(1.0 / cfg.alpha) +
                   4.0 * static_cast<double>(cfg.d)) /
                  static_cast<double>(n);
  out.classical_r2 = chi_square_quantile(1.0 - cfg.alpha, cfg.d) /
                     static_cast<double>(n);
  out.ratio_to_classical = out.emp_mean_r2 / out.classical_r2;
  return out;
}

PowerReport simulate_power_curve(const PowerConfig& cfg) {
  check_alpha(cfg.alpha);
  check_reps(cfg.reps);
  if (cfg.n < 4) throw_invalid("need at least 4 observations per replication");
  if (cfg.with_bootstrap && cfg.boot_b < 100) {
    throw_invalid("bootstrap needs at least 100 resamples");
  }

  std::vector<double> grid = cfg.mu_grid;
  if (grid.empty()) {
    for (int i = 0; i <= 12; ++i) grid.push_back(0.25 * i);
  }
  for (double mu : grid) {
    if (!(mu >= 0.0) || !std::isfinite(mu)) {
      throw_invalid("mu grid entries must be finite and nonnegative");
    }
  }

  const FamilySpec model = mixture_spec(2);

  PowerReport report;
  report.reps = cfg.reps;
  for (std::size_t gi = 0; gi < grid.size(); ++gi) {
    const double mu = grid[gi];
    const ParamVector truth =
        ParamVector::mixture({0.5, 0.5}, {-mu, mu}, {1.0, 1.0});
    const std::uint64_t grid_seed = derive_seed(cfg.seed, gi);

    std::vector<char> rej_u(cfg.reps, 0);
    std::vector<char> rej_b(cfg.reps, 0);
    parallel_for(cfg.reps, cfg.threads, [&](std::size_t rep) {
      const std::uint64_t rep_seed = derive_seed(grid_seed, rep);
      Dataset data = sample_from(model, truth, cfg.n, derive_seed(rep_seed, 0));
      DataSplit split = seeded_split(cfg.n, derive_seed(rep_seed, 1));
      EmOptions em = cfg.em_alt;
      em.seed = derive_seed(rep_seed, 2);
      TestOutcome u =
          scheme_lrt(model, data, split, Constraint::mixture_components(1),
                     mle_estimator(model, em), cfg.alpha, SplitScheme::single(),
                     em);
      rej_u[rep] = u.reject ? 1 : 0;
      if (cfg.with_bootstrap) {
        EmOptions emb = cfg.em_boot;
        emb.seed = derive_seed(rep_seed, 3);
        TestOutcome b = bootstrap_mixture_lrt(model, data, 1, 2, cfg.boot_b,
                                              cfg.alpha,
                                              derive_seed(rep_seed, 4), emb);
        rej_b[rep] = b.reject ? 1 : 0;
      }
    });

    PowerPoint pt;
    pt.mu = mu;
    RateReport ru = reduce_rate(rej_u);
    pt.power_universal = ru.rate;
    pt.se_u = ru.se;
    if (cfg.with_bootstrap) {
      RateReport rb = reduce_rate(rej_b);
      pt.power_bootstrap = rb.rate;
      pt.se_b = rb.se;
    }
    report.points.push_back(pt);
  }
  return report;
}

TestOutcome bootstrap_mixture_lrt(const FamilySpec& spec, const Dataset& data,
                                  std::size_t k0, std::size_t k1,
                                  std::size_t b, double alpha,
                                  std::uint64_t seed, const EmOptions& em) {
  if (spec.tag != Family::MixtureK) {
    throw_invalid("bootstrap LRT expects a mixture family");
  }
  check_alpha(alpha);
  if (b < 100) throw_invalid("bootstrap needs at least 100 resamples");
  if (k0 < 1 || k1 < k0 || k1 > spec.k) {
    throw_invalid("component counts must satisfy 1 <= k0 <= k1 <= k");
  }

  const std::size_t n = data.size();
  std::vector<std::size_t> all(n);
  std::iota(all.begin(), all.end(), std::size_t{0});

  TestOutcome out;
  out.log_threshold = -std::log(alpha);
  if (k0 == k1) {  // both fits are the same model: LRS 0, p-value 1
    out.log_statistic = 0.0;
    out.p_bound = 1.0;
    out.reject = false;
    return out;
  }

  const std::uint64_t obs_seed = derive_seed(seed, 0);
  EmOptions e0 = em;
  e0.seed = derive_seed(obs_seed, 0);
  EmOptions e1 = em;
  e1.seed = derive_seed(obs_seed, 1);
  ParamVector null_fit = em_fit_mixture(spec, data, all, k0, e0);
  ParamVector alt_fit = em_fit_mixture(spec, data, all, k1, e1);
  const double lrs_obs = 2.0 * (log_likelihood(spec, alt_fit, data, all) -
                                log_likelihood(spec, null_fit, data, all));

  // Each resample fit is a single EM run started at the parent-data solution.
  EmOptions warm = em;
  warm.restarts = 1;
  std::size_t count = 0;
  for (std::size_t bi = 0; bi < b; ++bi) {
    const std::uint64_t bs = derive_seed(seed, bi + 1);
    Dataset res = sample_from(spec, null_fit, n, derive_seed(bs, 2));
    ParamVector g0 = em_fit_mixture(spec, res, all, k0, warm, null_fit);
    ParamVector g1 = em_fit_mixture(spec, res, all, k1, warm, alt_fit);
    double lrs_b = 2.0 * (log_likelihood(spec, g1, res, all) -
                          log_likelihood(spec, g0, res, all));
    if (lrs_b >= lrs_obs) ++count;
  }
  double p = (1.0 + static_cast<double>(count)) / (static_cast<double>(b) + 1.0);
  out.p_bound = p;
  out.log_statistic = -std::log(p);
  out.reject = (p <= alpha);
  return out;
}

SeqExpReport seq_crossing_experiment(const SeqExpConfig& cfg) {
  check_alpha(cfg.alpha);
  check_reps(cfg.reps);

  const FamilySpec spec = gaussian_spec();
  const ParamVector null_point = ParamVector::gaussian(cfg.mu_null);
  const ParamVector truth = ParamVector::gaussian(cfg.mu_truth);

  std::vector<char> crossed(cfg.reps, 0);
  std::vector<char> covered(cfg.reps, 1);
  parallel_for(cfg.reps, cfg.threads, [&](std::size_t rep) {
    const std::uint64_t rep_seed = derive_seed(cfg.seed, rep);
    Rng rng(derive_seed(rep_seed, 0));
    std::normal_distribution<double> draw(cfg.mu_truth, 1.0);
    SeqState state = seq_init(spec, Constraint::fixed_point(null_point),
                              null_point, cfg.t0);
    bool cross = false;
    bool cover = true;
    for (std::size_t t = 0; t < cfg.horizon; ++t) {
      double y = draw(rng);
      seq_update(state, std::span<const double>(&y, 1));
      if (!cross && seq_should_stop(state, cfg.alpha)) cross = true;
      if (cover && !confseq_contains(state, truth, cfg.alpha)) cover = false;
    }
    crossed[rep] = cross ? 1 : 0;
    covered[rep] = cover ? 1 : 0;
  });

  SeqExpReport out;
  out.horizon = cfg.horizon;
  out.alpha = cfg.alpha;
  out.reps = cfg.reps;
  RateReport rc = reduce_rate(crossed);
  out.crossing_rate = rc.rate;
  out.se = rc.se;
  RateReport rv = reduce_rate(covered);
  out.coverage_rate = rv.rate;
  out.se_coverage = rv.se;
  return out;
}

SieveExpReport sieve_experiment(const SieveExpConfig& cfg) {
  check_alpha(cfg.alpha);
  check_reps(cfg.reps);
  if (cfg.k_true < 1 || cfg.k_true > 2) {
    throw_invalid("sieve experiment supports one or two true components");
  }
  if (cfg.j_max < 1) throw_invalid("sieve needs j_max >= 1");
  if (cfg.n < 4) throw_invalid("need at least 4 observations per replication");

  FamilySpec truth_spec = mixture_spec(cfg.k_true);
  ParamVector truth =
      cfg.k_true == 1
          ? ParamVector::mixture({1.0}, {0.0}, {1.0})
          : ParamVector::mixture({0.5, 0.5}, {-cfg.mu, cfg.mu}, {1.0, 1.0});

  std::vector<std::size_t> j_hat(cfg.reps, 0);
  parallel_for(cfg.reps, cfg.threads, [&](std::size_t rep) {
    const std::uint64_t rep_seed = derive_seed(cfg.seed, rep);
    Dataset data = sample_from(truth_spec, truth, cfg.n, derive_seed(rep_seed, 0));
    DataSplit split = seeded_split(cfg.n, derive_seed(rep_seed, 1));
    EmOptions em = cfg.em;
    em.seed = derive_seed(rep_seed, 2);
    SieveResult r = select_mixture_order(data, split, cfg.alpha, cfg.j_max,
                                         cfg.fixed_sigma, cfg.sigma, em);
    j_hat[rep] = r.j_hat;
  });

  SieveExpReport out;
  out.reps = cfg.reps;
  out.j_hat_counts.assign(cfg.j_max + 1, 0);
  std::size_t correct = 0;
  std::size_t over = 0;
  for (std::size_t v : j_hat) {
    if (v >= 1 && v <= cfg.j_max + 1) out.j_hat_counts[v - 1] += 1;
    correct += (v == cfg.k_true);
    over += (v > cfg.k_true);
  }
  out.correct_rate = static_cast<double>(correct) / static_cast<double>(cfg.reps);
  out.overshoot_rate = static_cast<double>(over) / static_cast<double>(cfg.reps);
  return out;
}

}  // namespace uinfer
