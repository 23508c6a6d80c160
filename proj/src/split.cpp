#include "split.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "error.hpp"
#include "mathutil.hpp"

namespace uinfer {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void check_alpha_open(double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw_invalid("alpha must be in (0,1)");
}

void validate_split(const Dataset& data, const DataSplit& split) {
  if (split.d0.empty() || split.d1.empty()) {
    throw_invalid("split: both halves must be nonempty");
  }
  std::vector<char> seen(data.size(), 0);
  for (auto part : {&split.d0, &split.d1}) {
    for (auto i : *part) {
      if (i >= data.size()) throw_invalid("split: index out of range");
      if (seen[i]) throw_invalid("split: halves must be disjoint");
      seen[i] = 1;
    }
  }
}

// Extended-real log ratio with the numerator-zero case dominating.
double ratio_log(double log_num, double log_den) {
  if (log_num == -kInf && log_den == -kInf) {
    throw_degenerate("statistic 0/0: both likelihoods vanish");
  }
  if (log_num == -kInf) return -kInf;
  if (log_den == -kInf) return kInf;
  return log_num - log_den;
}

// One averaged term: a fitted plug-in, the fold it is evaluated on, and the
// precomputed numerator log-likelihood.
struct SchemeTerm {
  ParamVector theta1;
  std::vector<std::size_t> eval;
  double log_num;
};

std::vector<SchemeTerm> prepare_terms(const FamilySpec& spec, const Dataset& data,
                                      const DataSplit& split,
                                      const Estimator& estimate,
                                      const SplitScheme& scheme) {
  std::vector<SchemeTerm> terms;
  auto add_term = [&](std::vector<std::size_t> eval,
                      std::span<const std::size_t> fit_idx) {
    SchemeTerm t;
    t.theta1 = estimate(data, fit_idx);
    validate_param(spec, t.theta1);
    t.log_num = log_likelihood(spec, t.theta1, data, eval);
    t.eval = std::move(eval);
    terms.push_back(std::move(t));
  };
  switch (scheme.kind) {
    case SchemeKind::SingleSplit:
      validate_split(data, split);
      add_term(split.d0, split.d1);
      break;
    case SchemeKind::Crossfit:
      validate_split(data, split);
      add_term(split.d0, split.d1);
      add_term(split.d1, split.d0);
      break;
    case SchemeKind::KFold: {
      auto folds = kfold_indices(data.size(), scheme.folds);
      for (std::size_t f = 0; f < folds.size(); ++f) {
        std::vector<std::size_t> rest;
        for (std::size_t g = 0; g < folds.size(); ++g) {
          if (g != f) rest.insert(rest.end(), folds[g].begin(), folds[g].end());
        }
        std::sort(rest.begin(), rest.end());
        add_term(folds[f], rest);
      }
      break;
    }
    case SchemeKind::Subsample: {
      if (scheme.draws < 1) throw_invalid("subsample: need at least one draw");
      for (std::size_t b = 0; b < scheme.draws; ++b) {
        Rng rng(derive_seed(scheme.seed, b));
        auto folds = random_kfold_indices(data.size(), scheme.folds, rng);
        for (std::size_t f = 0; f < folds.size(); ++f) {
          std::vector<std::size_t> rest;
          for (std::size_t g = 0; g < folds.size(); ++g) {
            if (g != f) rest.insert(rest.end(), folds[g].begin(), folds[g].end());
          }
          std::sort(rest.begin(), rest.end());
          add_term(folds[f], rest);
        }
      }
      break;
    }
  }
  return terms;
}

double terms_log_statistic(const FamilySpec& spec,
                           const std::vector<SchemeTerm>& terms,
                           const ParamVector& theta, const Dataset& data) {
  std::vector<double> vals;
  vals.reserve(terms.size());
  for (const auto& t : terms) {
    double den = log_likelihood(spec, theta, data, t.eval);
    vals.push_back(ratio_log(t.log_num, den));
  }
  return averaged_log_statistic(vals);
}

// Boundary extraction scans many theta; a 0/0 point (possible for
// UniformScale below the evaluation-fold maximum) counts as outside the set
// instead of aborting the scan.
bool contained_for_extraction(const FamilySpec& spec,
                              const std::vector<SchemeTerm>& terms,
                              const ParamVector& theta, const Dataset& data,
                              double log_thr) {
  try {
    return terms_log_statistic(spec, terms, theta, data) <= log_thr;
  } catch (const Error& e) {
    if (e.code() == ErrorCode::degenerate_statistic) return false;
    throw;
  }
}

double bisect_edge(const std::function<bool(double)>& contains, double in,
                   double out) {
  for (int i = 0; i < 300 && std::abs(out - in) > 1e-10; ++i) {
    double mid = 0.5 * (in + out);
    if (contains(mid)) {
      in = mid;
    } else {
      out = mid;
    }
  }
  return 0.5 * (in + out);
}

// Walk outward from a contained seed until the predicate flips, then bisect.
// direction is +1 or -1; an edge that never flips is reported as +/-inf.
double expand_edge(const std::function<bool(double)>& contains, double seed,
                   double step, int direction) {
  double in = seed;
  double s = step;
  for (int i = 0; i < 200; ++i) {
    double cand = in + direction * s;
    if (!std::isfinite(cand) || std::abs(cand) > 1e300) break;
    if (!contains(cand)) return bisect_edge(contains, in, cand);
    in = cand;
    s *= 2.0;
  }
  return direction > 0 ? kInf : -kInf;
}

Interval interval_from_predicate(const std::function<bool(double)>& contains,
                                 std::span<const double> seed_candidates,
                                 double step) {
  double seed = 0.0;
  bool found = false;
  for (double c : seed_candidates) {
    if (contains(c)) {
      seed = c;
      found = true;
      break;
    }
  }
  if (!found) {
    throw_runtime("no contained seed point found; use the grid extraction");
  }
  Interval out;
  out.lo = expand_edge(contains, seed, step, -1);
  out.hi = expand_edge(contains, seed, step, +1);
  return out;
}

double data_spread(const Dataset& data) {
  double lo = kInf, hi = -kInf;
  for (std::size_t i = 0; i < data.size(); ++i) {
    lo = std::min(lo, data.scalar(i));
    hi = std::max(hi, data.scalar(i));
  }
  return hi - lo;
}

double max_over(const Dataset& data, std::span<const std::size_t> idx) {
  double m = -kInf;
  for (auto i : idx) m = std::max(m, data.scalar(i));
  return m;
}

std::vector<double> mean_vector(const Dataset& data,
                                std::span<const std::size_t> idx) {
  std::vector<double> mu(data.dim, 0.0);
  for (auto i : idx) {
    auto row = data.row(i);
    for (std::size_t j = 0; j < data.dim; ++j) mu[j] += row[j];
  }
  for (double& m : mu) m /= static_cast<double>(idx.size());
  return mu;
}

}  // namespace

TestOutcome make_outcome(double log_statistic, double alpha) {
  check_alpha_open(alpha);
  TestOutcome out;
  out.log_statistic = log_statistic;
  out.log_threshold = -std::log(alpha);
  out.reject = log_statistic > out.log_threshold;
  out.p_bound = std::min(1.0, std::exp(-log_statistic));
  return out;
}

SplitScheme SplitScheme::single() { return {}; }

SplitScheme SplitScheme::crossfit() {
  SplitScheme s;
  s.kind = SchemeKind::Crossfit;
  return s;
}

SplitScheme SplitScheme::kfold(std::size_t k) {
  SplitScheme s;
  s.kind = SchemeKind::KFold;
  s.folds = k;
  return s;
}

SplitScheme SplitScheme::subsample(std::size_t k, std::size_t b,
                                   std::uint64_t seed) {
  SplitScheme s;
  s.kind = SchemeKind::Subsample;
  s.folds = k;
  s.draws = b;
  s.seed = seed;
  return s;
}

Estimator mle_estimator(const FamilySpec& spec, const EmOptions& em) {
  return [spec, em](const Dataset& data, std::span<const std::size_t> idx) {
    return fit_mle(spec, data, idx, Constraint::full(), em);
  };
}

double log_split_statistic(const FamilySpec& spec, const ParamVector& theta,
                           const ParamVector& theta1, const Dataset& data,
                           std::span<const std::size_t> d0) {
  validate_param(spec, theta);
  validate_param(spec, theta1);
  double num = log_likelihood(spec, theta1, data, d0);
  double den = log_likelihood(spec, theta, data, d0);
  return ratio_log(num, den);
}

double powered_log_statistic(double eta, const FamilySpec& spec,
                             const ParamVector& theta, const ParamVector& theta1,
                             const Dataset& data,
                             std::span<const std::size_t> d0) {
  if (!(eta > 0.0 && eta <= 1.0)) throw_invalid("eta must be in (0,1]");
  return eta * log_split_statistic(spec, theta, theta1, data, d0);
}

double averaged_log_statistic(std::span<const double> log_terms) {
  return log_mean_exp(log_terms);
}

double scheme_log_statistic(const FamilySpec& spec, const ParamVector& theta,
                            const Dataset& data, const DataSplit& split,
                            const Estimator& estimate,
                            const SplitScheme& scheme) {
  validate_param(spec, theta);
  auto terms = prepare_terms(spec, data, split, estimate, scheme);
  return terms_log_statistic(spec, terms, theta, data);
}

bool universal_set_contains(const FamilySpec& spec, const ParamVector& theta,
                            const Dataset& data, const DataSplit& split,
                            const Estimator& estimate, double alpha,
                            const SplitScheme& scheme) {
  check_alpha_open(alpha);
  return scheme_log_statistic(spec, theta, data, split, estimate, scheme) <=
         -std::log(alpha);
}

TestOutcome split_lrt(const FamilySpec& spec, const Dataset& data,
                      const DataSplit& split, const Constraint& null_c,
                      const Estimator& estimate, double alpha,
                      const EmOptions& em) {
  return scheme_lrt(spec, data, split, null_c, estimate, alpha,
                    SplitScheme::single(), em);
}

TestOutcome crossfit_lrt(const FamilySpec& spec, const Dataset& data,
                         const DataSplit& split, const Constraint& null_c,
                         const Estimator& estimate, double alpha,
                         const EmOptions& em) {
  return scheme_lrt(spec, data, split, null_c, estimate, alpha,
                    SplitScheme::crossfit(), em);
}

TestOutcome scheme_lrt(const FamilySpec& spec, const Dataset& data,
                       const DataSplit& split, const Constraint& null_c,
                       const Estimator& estimate, double alpha,
                       const SplitScheme& scheme, const EmOptions& em) {
  check_alpha_open(alpha);
  auto terms = prepare_terms(spec, data, split, estimate, scheme);
  std::vector<double> vals;
  vals.reserve(terms.size());
  for (const auto& t : terms) {
    ParamVector theta0 = fit_mle(spec, data, t.eval, null_c, em);
    double den = log_likelihood(spec, theta0, data, t.eval);
    vals.push_back(ratio_log(t.log_num, den));
  }
  double stat = averaged_log_statistic(vals);
  if (stat == -kInf && terms.size() > 1) {
    throw_degenerate("all averaged statistics are 0");
  }
  return make_outcome(stat, alpha);
}

TestOutcome relaxed_split_lrt(const FamilySpec& spec, const Dataset& data,
                              const DataSplit& split, double log_f0_max,
                              const Estimator& estimate, double alpha) {
  check_alpha_open(alpha);
  if (!std::isfinite(log_f0_max)) {
    throw_invalid("log_f0_max must be finite");
  }
  validate_split(data, split);
  ParamVector theta1 = estimate(data, split.d1);
  validate_param(spec, theta1);
  double num = log_likelihood(spec, theta1, data, split.d0);
  double stat = num == -kInf ? -kInf : num - log_f0_max;
  return make_outcome(stat, alpha);
}

double profile_log_likelihood(const FamilySpec& spec, const Dataset& data,
                              std::span<const std::size_t> idx, double psi) {
  if (spec.tag != Family::GaussianUnknownVar) {
    throw_unsupported("profile likelihood implemented for the mean of "
                      "GaussianUnknownVar only");
  }
  if (idx.empty()) throw_invalid("empty index set");
  double ss = 0.0;
  for (auto i : idx) {
    double d = data.scalar(i) - psi;
    ss += d * d;
  }
  double m = static_cast<double>(idx.size());
  double var = std::max(ss / m, kSigmaMin * kSigmaMin);
  return -0.5 * m * (kLog2Pi + std::log(var)) - 0.5 * ss / var;
}

bool profile_set_contains(double psi, const FamilySpec& spec, const Dataset& data,
                          const DataSplit& split, const Estimator& estimate,
                          double alpha) {
  check_alpha_open(alpha);
  if (spec.tag != Family::GaussianUnknownVar) {
    throw_unsupported("profile set implemented for the mean of "
                      "GaussianUnknownVar only");
  }
  validate_split(data, split);
  ParamVector theta1 = estimate(data, split.d1);
  validate_param(spec, theta1);
  double num = log_likelihood(spec, theta1, data, split.d0);
  double den = profile_log_likelihood(spec, data, split.d0, psi);
  return ratio_log(num, den) <= -std::log(alpha);
}

GaussianRegion gaussian_region(const Dataset& data, const DataSplit& split,
                               double alpha) {
  if (!(alpha > 0.0 && alpha <= 1.0)) throw_invalid("alpha must be in (0,1]");
  validate_split(data, split);
  if (split.d0.size() != split.d1.size()) {
    throw_invalid("closed form requires equal halves");
  }
  auto c0 = mean_vector(data, split.d0);
  auto c1 = mean_vector(data, split.d1);
  double gap2 = 0.0;
  for (std::size_t j = 0; j < data.dim; ++j) {
    double d = c0[j] - c1[j];
    gap2 += d * d;
  }
  double m = static_cast<double>(split.d0.size());
  GaussianRegion out;
  out.squared_radius = (2.0 / m) * (-std::log(alpha)) + gap2;
  out.center = std::move(c0);
  return out;
}

Interval uniform_crossfit_interval(const Dataset& data, const DataSplit& split,
                                   double alpha) {
  if (data.dim != 1) throw_invalid("uniform family is 1-dimensional");
  if (!(alpha > 0.0 && alpha <= 2.0)) throw_invalid("alpha must be in (0,2]");
  validate_split(data, split);
  if (split.d0.size() != split.d1.size()) {
    throw_invalid("crossfit interval requires equal halves");
  }
  double a = max_over(data, split.d0);
  double b = max_over(data, split.d1);
  if (!(std::min(a, b) > 0.0)) {
    throw_invalid("uniform interval needs positive observations");
  }
  double m = static_cast<double>(split.d0.size());
  Interval out;
  out.lo = std::min(a, b);
  out.hi = std::max(a, b) * std::pow(2.0 / alpha, 1.0 / m);
  return out;
}

Interval uniform_crossfit_interval_support(const Dataset& data,
                                           const DataSplit& split,
                                           double alpha) {
  Interval out = uniform_crossfit_interval(data, split, alpha);
  out.lo = std::max(max_over(data, split.d0), max_over(data, split.d1));
  return out;
}

Interval uniform_classical_interval(const Dataset& data, double alpha) {
  if (data.dim != 1) throw_invalid("uniform family is 1-dimensional");
  if (!(alpha > 0.0 && alpha <= 1.0)) throw_invalid("alpha must be in (0,1]");
  if (data.size() == 0) throw_invalid("dataset is empty");
  double mx = -kInf;
  for (std::size_t i = 0; i < data.size(); ++i) {
    mx = std::max(mx, data.scalar(i));
  }
  if (!(mx > 0.0)) throw_invalid("uniform interval needs positive observations");
  Interval out;
  out.lo = mx;
  out.hi = mx * std::pow(1.0 / alpha, 1.0 / static_cast<double>(data.size()));
  return out;
}

Interval confset_interval(const FamilySpec& spec, const Dataset& data,
                          const DataSplit& split, const Estimator& estimate,
                          double alpha, const SplitScheme& scheme) {
  check_alpha_open(alpha);
  bool scalar_mvn = spec.tag == Family::MvnIdentity && spec.dim == 1;
  if (spec.tag != Family::Gaussian && spec.tag != Family::UniformScale &&
      !scalar_mvn) {
    throw_unsupported("interval extraction needs a 1-d monotone statistic; "
                      "use the grid");
  }
  auto terms = prepare_terms(spec, data, split, estimate, scheme);
  const double log_thr = -std::log(alpha);
  std::function<bool(double)> contains;
  std::vector<double> seeds;
  if (spec.tag == Family::UniformScale) {
    contains = [&](double th) {
      if (!(th > 0.0)) return false;
      return contained_for_extraction(spec, terms, ParamVector::uniform_scale(th),
                                      data, log_thr);
    };
    seeds = {std::max(max_over(data, split.d0), max_over(data, split.d1)),
             max_over(data, split.d0)};
  } else {
    contains = [&](double th) {
      ParamVector p = scalar_mvn ? ParamVector::mvn({th}) : ParamVector::gaussian(th);
      return contained_for_extraction(spec, terms, p, data, log_thr);
    };
    seeds = {mean_vector(data, split.d0)[0],
             0.5 * (mean_vector(data, split.d0)[0] + mean_vector(data, split.d1)[0]),
             mean_vector(data, split.d1)[0]};
  }
  double step = std::max({1e-6, 0.5 * data_spread(data), 1.0});
  return interval_from_predicate(contains, seeds, step);
}

std::vector<int> confset_grid(const FamilySpec& spec, const Dataset& data,
                              const DataSplit& split, const Estimator& estimate,
                              double alpha, const SplitScheme& scheme, double lo,
                              double hi, std::size_t points) {
  check_alpha_open(alpha);
  if (points < 2) throw_invalid("grid needs at least 2 points");
  if (!(lo <= hi)) throw_invalid("grid range must satisfy lo <= hi");
  if (spec.obs_dim() != 1) throw_invalid("grid extraction is 1-dimensional");
  auto terms = prepare_terms(spec, data, split, estimate, scheme);
  const double log_thr = -std::log(alpha);
  std::vector<int> flags(points, 0);
  for (std::size_t i = 0; i < points; ++i) {
    double th = lo + (hi - lo) * static_cast<double>(i) /
                         static_cast<double>(points - 1);
    ParamVector p;
    switch (spec.tag) {
      case Family::Gaussian:
        p = ParamVector::gaussian(th);
        break;
      case Family::UniformScale:
        if (!(th > 0.0)) {
          flags[i] = 0;
          continue;
        }
        p = ParamVector::uniform_scale(th);
        break;
      case Family::MvnIdentity:
        p = ParamVector::mvn({th});
        break;
      default:
        throw_unsupported("grid extraction supports families with a single "
                          "free location parameter");
    }
    flags[i] = contained_for_extraction(spec, terms, p, data, log_thr) ? 1 : 0;
  }
  return flags;
}

Interval profile_interval(const FamilySpec& spec, const Dataset& data,
                          const DataSplit& split, const Estimator& estimate,
                          double alpha) {
  check_alpha_open(alpha);
  if (spec.tag != Family::GaussianUnknownVar) {
    throw_unsupported("profile set implemented for the mean of "
                      "GaussianUnknownVar only");
  }
  validate_split(data, split);
  ParamVector theta1 = estimate(data, split.d1);
  validate_param(spec, theta1);
  double num = log_likelihood(spec, theta1, data, split.d0);
  const double log_thr = -std::log(alpha);
  std::function<bool(double)> contains = [&](double psi) {
    double den = profile_log_likelihood(spec, data, split.d0, psi);
    return ratio_log(num, den) <= log_thr;
  };
  std::vector<double> seeds = {
      mean_vector(data, split.d0)[0],
      0.5 * (mean_vector(data, split.d0)[0] + mean_vector(data, split.d1)[0]),
      mean_vector(data, split.d1)[0]};
  double step = std::max({1e-6, 0.5 * data_spread(data), 1.0});
  return interval_from_predicate(contains, seeds, step);
}

}  // namespace uinfer
