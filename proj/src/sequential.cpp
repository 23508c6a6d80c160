#include "sequential.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "error.hpp"
#include "mathutil.hpp"

namespace uinfer {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::vector<std::size_t> post_indices(const SeqState& s) {
  std::vector<std::size_t> idx(s.post_count);
  std::iota(idx.begin(), idx.end(), s.t0);
  return idx;
}

// Null MLE over the post-burn-in points.
ParamVector fit_null(const SeqState& s) {
  using K = Constraint::Kind;
  if (s.null_c.kind == K::FixedPoint) return s.null_c.point;
  const double c = static_cast<double>(s.post_count);
  switch (s.family.tag) {
    case Family::Gaussian: {
      double mean = s.sum_post[0] / c;
      if (s.null_c.kind == K::Full) return ParamVector::gaussian(mean);
      if (s.null_c.kind == K::MeanAtMost) {
        return ParamVector::gaussian(std::min(mean, s.null_c.bound));
      }
      if (s.null_c.kind == K::FixedMean) return ParamVector::gaussian(s.null_c.psi);
      break;
    }
    case Family::GaussianUnknownVar: {
      double mean = s.sum_post[0] / c;
      double mu;
      if (s.null_c.kind == K::Full) {
        mu = mean;
      } else if (s.null_c.kind == K::MeanAtMost) {
        mu = std::min(mean, s.null_c.bound);
      } else if (s.null_c.kind == K::FixedMean) {
        mu = s.null_c.psi;
      } else {
        break;
      }
      double msd = s.sumsq_post / c - 2.0 * mu * mean + mu * mu;
      double sd = std::max(std::sqrt(std::max(msd, 0.0)), kSigmaMin);
      return ParamVector::gaussian_unknown_var(mu, sd);
    }
    case Family::MvnIdentity: {
      if (s.null_c.kind != K::Full) break;
      std::vector<double> mu(s.family.dim);
      for (std::size_t j = 0; j < s.family.dim; ++j) mu[j] = s.sum_post[j] / c;
      return ParamVector::mvn(std::move(mu));
    }
    case Family::UniformScale:
      if (s.null_c.kind != K::Full) break;
      if (!(s.max_post > 0.0)) {
        throw_invalid("uniform MLE needs a positive observation");
      }
      return ParamVector::uniform_scale(s.max_post);
    case Family::MixtureK: {
      auto idx = post_indices(s);
      return fit_mle(s.family, s.stream, idx, s.null_c, s.em);
    }
  }
  throw_invalid("null constraint not supported for this family");
}

// Full-model MLE over all t points; falls back to the previous plug-in while
// the MLE is still undefined (uniform with no positive point, mixture with
// fewer points than components).
ParamVector refresh_theta1(const SeqState& s) {
  const double c = static_cast<double>(s.t);
  switch (s.family.tag) {
    case Family::Gaussian:
      return ParamVector::gaussian(s.sum_all[0] / c);
    case Family::GaussianUnknownVar: {
      double mean = s.sum_all[0] / c;
      double msd = s.sumsq_all / c - mean * mean;
      return ParamVector::gaussian_unknown_var(
          mean, std::max(std::sqrt(std::max(msd, 0.0)), kSigmaMin));
    }
    case Family::MvnIdentity: {
      std::vector<double> mu(s.family.dim);
      for (std::size_t j = 0; j < s.family.dim; ++j) mu[j] = s.sum_all[j] / c;
      return ParamVector::mvn(std::move(mu));
    }
    case Family::UniformScale:
      if (!(s.max_all > 0.0)) return s.theta1;
      return ParamVector::uniform_scale(s.max_all);
    case Family::MixtureK: {
      if (s.t < s.family.k) return s.theta1;
      std::vector<std::size_t> idx(s.t);
      std::iota(idx.begin(), idx.end(), std::size_t{0});
      return em_fit_mixture(s.family, s.stream, idx, s.family.k, s.em);
    }
  }
  throw_runtime("unreachable family tag");
}

}  // namespace

SeqState seq_init(const FamilySpec& spec, const Constraint& null_c,
                  const ParamVector& theta1_default, std::size_t t0,
                  const EmOptions& em) {
  validate_param(spec, theta1_default);
  if (null_c.kind == Constraint::Kind::FixedPoint) {
    validate_param(spec, null_c.point);
  }
  SeqState s;
  s.family = spec;
  s.null_c = null_c;
  s.em = em;
  s.t0 = t0;
  s.theta1 = theta1_default;
  s.sum_all.assign(spec.obs_dim(), 0.0);
  s.sum_post.assign(spec.obs_dim(), 0.0);
  s.max_all = s.max_post = -kInf;
  s.min_all = s.min_post = kInf;
  s.stream.dim = spec.obs_dim();
  return s;
}

double seq_post_log_likelihood(const SeqState& s, const ParamVector& theta) {
  validate_param(s.family, theta);
  if (s.post_count == 0) return 0.0;
  const double c = static_cast<double>(s.post_count);
  switch (s.family.tag) {
    case Family::Gaussian: {
      double sg = s.family.sigma;
      double mu = theta.means[0];
      double ss = s.sumsq_post - 2.0 * mu * s.sum_post[0] + c * mu * mu;
      return -0.5 * c * kLog2Pi - c * std::log(sg) - 0.5 * ss / (sg * sg);
    }
    case Family::GaussianUnknownVar: {
      double sg = theta.sigmas[0];
      double mu = theta.means[0];
      double ss = s.sumsq_post - 2.0 * mu * s.sum_post[0] + c * mu * mu;
      return -0.5 * c * kLog2Pi - c * std::log(sg) - 0.5 * ss / (sg * sg);
    }
    case Family::MvnIdentity: {
      double ss = s.sumsq_post;
      double mu2 = 0.0;
      for (std::size_t j = 0; j < s.family.dim; ++j) {
        ss -= 2.0 * theta.means[j] * s.sum_post[j];
        mu2 += theta.means[j] * theta.means[j];
      }
      ss += c * mu2;
      return -0.5 * c * static_cast<double>(s.family.dim) * kLog2Pi - 0.5 * ss;
    }
    case Family::UniformScale:
      if (!(s.min_post > 0.0) || s.max_post > theta.scale) return -kInf;
      return -c * std::log(theta.scale);
    case Family::MixtureK: {
      auto idx = post_indices(s);
      return log_likelihood(s.family, theta, s.stream, idx);
    }
  }
  throw_runtime("unreachable family tag");
}

void seq_update(SeqState& s, std::span<const double> y) {
  if (y.size() != s.family.obs_dim()) {
    throw_invalid("observation dimension mismatch");
  }
  for (double v : y) {
    if (!std::isfinite(v)) throw_invalid("observation must be finite");
  }

  s.t += 1;
  const bool counted = s.t > s.t0;
  if (counted) {
    // Plug-in factor uses the estimate from the first t-1 points, before the
    // refresh below sees the new observation.
    double factor = log_density(s.family, s.theta1, y);
    s.log_numerator = s.log_numerator == -kInf ? -kInf : s.log_numerator + factor;
    if (factor == -kInf) s.log_numerator = -kInf;

    for (std::size_t j = 0; j < y.size(); ++j) s.sum_post[j] += y[j];
    for (double v : y) {
      s.sumsq_post += v * v;
      s.max_post = std::max(s.max_post, v);
      s.min_post = std::min(s.min_post, v);
    }
    s.post_count += 1;
  }

  s.stream.append(y);
  for (std::size_t j = 0; j < y.size(); ++j) s.sum_all[j] += y[j];
  for (double v : y) {
    s.sumsq_all += v * v;
    s.max_all = std::max(s.max_all, v);
    s.min_all = std::min(s.min_all, v);
  }

  if (counted) {
    ParamVector theta0 = fit_null(s);
    double den = seq_post_log_likelihood(s, theta0);
    if (s.log_numerator == -kInf && den == -kInf) {
      throw_degenerate("martingale 0/0: numerator and null likelihood both vanish");
    }
    if (s.log_numerator == -kInf) {
      s.log_m = -kInf;
    } else if (den == -kInf) {
      s.log_m = kInf;
    } else {
      s.log_m = s.log_numerator - den;
    }
  }

  s.theta1 = refresh_theta1(s);

  double p_t = std::min(1.0, std::exp(-s.log_m));
  s.p_min = std::min(s.p_min, p_t);
}

bool seq_should_stop(const SeqState& s, double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw_invalid("alpha must be in (0,1)");
  return s.log_m > -std::log(alpha);
}

AnytimeP seq_anytime_p(const SeqState& s) {
  AnytimeP out;
  out.p_t = std::min(1.0, std::exp(-s.log_m));
  out.p_bar_t = s.p_min;
  return out;
}

bool confseq_contains(const SeqState& s, const ParamVector& theta, double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw_invalid("alpha must be in (0,1)");
  validate_param(s.family, theta);
  if (s.t <= s.t0) return true;
  double ll = seq_post_log_likelihood(s, theta);
  if (s.log_numerator == -kInf) return true;  // numerator-zero dominates
  if (ll == -kInf) return false;
  return s.log_numerator - ll <= -std::log(alpha);
}

double oracle_log_martingale(const SeqState& s, const ParamVector& theta_star) {
  if (s.t <= s.t0) return 0.0;
  double ll = seq_post_log_likelihood(s, theta_star);
  if (s.log_numerator == -kInf && ll == -kInf) {
    throw_degenerate("martingale 0/0: numerator and reference likelihood both vanish");
  }
  if (s.log_numerator == -kInf) return -kInf;
  if (ll == -kInf) return kInf;
  return s.log_numerator - ll;
}

}  // namespace uinfer
