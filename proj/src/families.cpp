#include "families.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "error.hpp"
#include "mathutil.hpp"

namespace uinfer {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double normal_logpdf(double y, double mu, double sigma) {
  double z = (y - mu) / sigma;
  return -0.5 * kLog2Pi - std::log(sigma) - 0.5 * z * z;
}

double mean_of(const Dataset& data, std::span<const std::size_t> idx) {
  double s = 0.0;
  for (auto i : idx) s += data.scalar(i);
  return s / static_cast<double>(idx.size());
}

double floored_sd_about(const Dataset& data, std::span<const std::size_t> idx,
                        double center) {
  double s = 0.0;
  for (auto i : idx) {
    double d = data.scalar(i) - center;
    s += d * d;
  }
  double var = s / static_cast<double>(idx.size());
  return std::max(std::sqrt(var), kSigmaMin);
}

void require_scalar_family(const FamilySpec& spec, const Dataset& data) {
  if (spec.obs_dim() != data.dim) {
    throw_invalid("dimension mismatch: family expects " +
                  std::to_string(spec.obs_dim()) + ", data has " +
                  std::to_string(data.dim));
  }
}

void check_idx(const Dataset& data, std::span<const std::size_t> idx) {
  if (idx.empty()) throw_invalid("empty index set");
  for (auto i : idx) {
    if (i >= data.size()) throw_invalid("index out of range");
  }
}

}  // namespace

ParamVector ParamVector::gaussian(double mu) {
  ParamVector p;
  p.tag = Family::Gaussian;
  p.means = {mu};
  return p;
}

ParamVector ParamVector::gaussian_unknown_var(double mu, double sigma) {
  ParamVector p;
  p.tag = Family::GaussianUnknownVar;
  p.means = {mu};
  p.sigmas = {sigma};
  return p;
}

ParamVector ParamVector::mixture(std::vector<double> w, std::vector<double> mu,
                                 std::vector<double> sigma) {
  ParamVector p;
  p.tag = Family::MixtureK;
  p.weights = std::move(w);
  p.means = std::move(mu);
  p.sigmas = std::move(sigma);
  return p;
}

ParamVector ParamVector::uniform_scale(double theta) {
  ParamVector p;
  p.tag = Family::UniformScale;
  p.scale = theta;
  return p;
}

ParamVector ParamVector::mvn(std::vector<double> mu) {
  ParamVector p;
  p.tag = Family::MvnIdentity;
  p.means = std::move(mu);
  return p;
}

void validate_param(const FamilySpec& spec, const ParamVector& p) {
  if (p.tag != spec.tag) throw_invalid("parameter family tag mismatch");
  auto finite = [](std::span<const double> v) {
    for (double x : v) {
      if (!std::isfinite(x)) return false;
    }
    return true;
  };
  switch (spec.tag) {
    case Family::Gaussian:
      if (p.means.size() != 1 || !finite(p.means)) {
        throw_invalid("gaussian parameter needs one finite mean");
      }
      break;
    case Family::GaussianUnknownVar:
      if (p.means.size() != 1 || p.sigmas.size() != 1 || !finite(p.means) ||
          !finite(p.sigmas)) {
        throw_invalid("gaussian parameter needs finite mean and scale");
      }
      if (p.sigmas[0] < kSigmaMin * (1.0 - 1e-12)) {
        throw_invalid("scale below sigma_min");
      }
      break;
    case Family::MixtureK: {
      // A mixture with fewer components is a point of the larger class, so a
      // parameter may carry any count between 1 and spec.k blocks.
      std::size_t k = p.weights.size();
      if (k < 1 || k > spec.k) {
        throw_invalid("mixture parameter needs between 1 and k components");
      }
      if (p.means.size() != k || p.sigmas.size() != k) {
        throw_invalid("mixture parameter blocks must have matching sizes");
      }
      if (!finite(p.means) || !finite(p.sigmas) || !finite(p.weights)) {
        throw_invalid("mixture parameter has non-finite entries");
      }
      double wsum = 0.0;
      for (double w : p.weights) {
        if (w < 0.0) throw_invalid("mixture weights must be nonnegative");
        wsum += w;
      }
      if (std::abs(wsum - 1.0) > 1e-9) throw_invalid("mixture weights must sum to 1");
      for (double s : p.sigmas) {
        if (s < kSigmaMin * (1.0 - 1e-12)) throw_invalid("scale below sigma_min");
      }
      break;
    }
    case Family::UniformScale:
      if (!(p.scale > 0.0) || !std::isfinite(p.scale)) {
        throw_invalid("uniform scale must be positive and finite");
      }
      break;
    case Family::MvnIdentity:
      if (p.means.size() != spec.dim || !finite(p.means)) {
        throw_invalid("mvn parameter needs a finite mean of length d");
      }
      break;
  }
}

ParamVector packed_to_param(const FamilySpec& spec, std::span<const double> packed) {
  ParamVector p;
  switch (spec.tag) {
    case Family::Gaussian:
      if (packed.size() != 1) throw_invalid("packed gaussian parameter: expected [mu]");
      p = ParamVector::gaussian(packed[0]);
      break;
    case Family::GaussianUnknownVar:
      if (packed.size() != 2) {
        throw_invalid("packed parameter: expected [mu, sigma]");
      }
      p = ParamVector::gaussian_unknown_var(packed[0], packed[1]);
      break;
    case Family::MixtureK: {
      if (packed.size() < 3 || packed.size() % 3 != 0) {
        throw_invalid("packed mixture parameter: expected 3 values per component");
      }
      std::size_t k = packed.size() / 3;  // may be below spec.k
      p = ParamVector::mixture({packed.begin(), packed.begin() + k},
                               {packed.begin() + k, packed.begin() + 2 * k},
                               {packed.begin() + 2 * k, packed.end()});
      break;
    }
    case Family::UniformScale:
      if (packed.size() != 1) throw_invalid("packed uniform parameter: expected [theta]");
      p = ParamVector::uniform_scale(packed[0]);
      break;
    case Family::MvnIdentity:
      if (packed.size() != spec.dim) {
        throw_invalid("packed mvn parameter: expected d values");
      }
      p = ParamVector::mvn({packed.begin(), packed.end()});
      break;
  }
  validate_param(spec, p);
  return p;
}

std::vector<double> param_to_packed(const FamilySpec& spec, const ParamVector& p) {
  validate_param(spec, p);
  std::vector<double> out;
  switch (spec.tag) {
    case Family::Gaussian:
      out = {p.means[0]};
      break;
    case Family::GaussianUnknownVar:
      out = {p.means[0], p.sigmas[0]};
      break;
    case Family::MixtureK:
      out.insert(out.end(), p.weights.begin(), p.weights.end());
      out.insert(out.end(), p.means.begin(), p.means.end());
      out.insert(out.end(), p.sigmas.begin(), p.sigmas.end());
      break;
    case Family::UniformScale:
      out = {p.scale};
      break;
    case Family::MvnIdentity:
      out = p.means;
      break;
  }
  return out;
}

Constraint Constraint::full() { return {}; }

Constraint Constraint::fixed_point(ParamVector p) {
  Constraint c;
  c.kind = Kind::FixedPoint;
  c.point = std::move(p);
  return c;
}

Constraint Constraint::mean_at_most(double bound) {
  Constraint c;
  c.kind = Kind::MeanAtMost;
  c.bound = bound;
  return c;
}

Constraint Constraint::mixture_components(std::size_t k) {
  Constraint c;
  c.kind = Kind::MixtureComponents;
  c.k = k;
  return c;
}

Constraint Constraint::fixed_mean(double psi) {
  Constraint c;
  c.kind = Kind::FixedMean;
  c.psi = psi;
  return c;
}

double log_density(const FamilySpec& spec, const ParamVector& p,
                   std::span<const double> y) {
  if (y.size() != spec.obs_dim()) {
    throw_invalid("dimension mismatch: observation has " +
                  std::to_string(y.size()) + " coordinates, family expects " +
                  std::to_string(spec.obs_dim()));
  }
  switch (spec.tag) {
    case Family::Gaussian:
      return normal_logpdf(y[0], p.means[0], spec.sigma);
    case Family::GaussianUnknownVar:
      return normal_logpdf(y[0], p.means[0], p.sigmas[0]);
    case Family::MixtureK: {
      const std::size_t kc = p.weights.size();  // may be below spec.k
      double best = -kInf;
      double stack[16];
      std::vector<double> heap;
      double* t = stack;
      if (kc > 16) {
        heap.resize(kc);
        t = heap.data();
      }
      for (std::size_t j = 0; j < kc; ++j) {
        t[j] = (p.weights[j] <= 0.0
                    ? -kInf
                    : std::log(p.weights[j]) +
                          normal_logpdf(y[0], p.means[j], p.sigmas[j]));
        best = std::max(best, t[j]);
      }
      if (best == -kInf) return -kInf;
      double s = 0.0;
      for (std::size_t j = 0; j < kc; ++j) s += std::exp(t[j] - best);
      return best + std::log(s);
    }
    case Family::UniformScale:
      return (y[0] > 0.0 && y[0] <= p.scale) ? -std::log(p.scale) : -kInf;
    case Family::MvnIdentity: {
      double ss = 0.0;
      for (std::size_t j = 0; j < spec.dim; ++j) {
        double d = y[j] - p.means[j];
        ss += d * d;
      }
      return -0.5 * static_cast<double>(spec.dim) * kLog2Pi - 0.5 * ss;
    }
  }
  throw_runtime("unreachable family tag");
}

double log_likelihood(const FamilySpec& spec, const ParamVector& p,
                      const Dataset& data, std::span<const std::size_t> idx) {
  require_scalar_family(spec, data);
  check_idx(data, idx);
  double s = 0.0;
  for (auto i : idx) {
    double ld = log_density(spec, p, data.row(i));
    if (ld == -kInf) return -kInf;
    s += ld;
  }
  return s;
}

ParamVector fit_mle(const FamilySpec& spec, const Dataset& data,
                    std::span<const std::size_t> idx, const Constraint& c,
                    const EmOptions& em) {
  require_scalar_family(spec, data);
  check_idx(data, idx);
  using K = Constraint::Kind;
  if (c.kind == K::FixedPoint) {
    validate_param(spec, c.point);
    return c.point;
  }
  switch (spec.tag) {
    case Family::Gaussian:
      if (c.kind == K::Full) return ParamVector::gaussian(mean_of(data, idx));
      if (c.kind == K::MeanAtMost) {
        return ParamVector::gaussian(std::min(mean_of(data, idx), c.bound));
      }
      if (c.kind == K::FixedMean) return ParamVector::gaussian(c.psi);
      break;
    case Family::GaussianUnknownVar: {
      double mu;
      if (c.kind == K::Full) {
        mu = mean_of(data, idx);
      } else if (c.kind == K::MeanAtMost) {
        mu = std::min(mean_of(data, idx), c.bound);
      } else if (c.kind == K::FixedMean) {
        mu = c.psi;
      } else {
        break;
      }
      return ParamVector::gaussian_unknown_var(mu, floored_sd_about(data, idx, mu));
    }
    case Family::MixtureK:
      if (c.kind == K::Full) return em_fit_mixture(spec, data, idx, spec.k, em);
      if (c.kind == K::MixtureComponents) {
        if (c.k < 1 || c.k > spec.k) {
          throw_invalid("component constraint must stay within the model class");
        }
        return em_fit_mixture(spec, data, idx, c.k, em);
      }
      break;
    case Family::UniformScale: {
      if (c.kind != K::Full) break;
      double mx = -kInf;
      for (auto i : idx) mx = std::max(mx, data.scalar(i));
      if (!(mx > 0.0)) throw_invalid("uniform MLE needs a positive observation");
      return ParamVector::uniform_scale(mx);
    }
    case Family::MvnIdentity: {
      if (c.kind != K::Full) break;
      std::vector<double> mu(spec.dim, 0.0);
      for (auto i : idx) {
        auto row = data.row(i);
        for (std::size_t j = 0; j < spec.dim; ++j) mu[j] += row[j];
      }
      for (double& m : mu) m /= static_cast<double>(idx.size());
      return ParamVector::mvn(std::move(mu));
    }
  }
  throw_invalid("constraint not supported for this family");
}

namespace {

ParamVector em_fit_mixture_impl(const FamilySpec& spec, const Dataset& data,
                                std::span<const std::size_t> idx, std::size_t k,
                                const EmOptions& opts, const ParamVector* init,
                                EmDiagnostics* diag) {
  require_scalar_family(spec, data);
  check_idx(data, idx);
  if (k < 1) throw_invalid("mixture needs k >= 1");
  const std::size_t n = idx.size();
  if (n < k) throw_invalid("mixture needs at least k observations");

  FamilySpec out_spec = spec;
  out_spec.tag = Family::MixtureK;
  out_spec.k = k;

  std::vector<double> y(n);
  for (std::size_t i = 0; i < n; ++i) y[i] = data.scalar(idx[i]);

  if (k == 1) {
    double mu = std::accumulate(y.begin(), y.end(), 0.0) / static_cast<double>(n);
    double ss = 0.0;
    for (double v : y) ss += (v - mu) * (v - mu);
    double sd = spec.fixed_sigma ? spec.sigma
                                 : std::max(std::sqrt(ss / static_cast<double>(n)),
                                            kSigmaMin);
    ParamVector p = ParamVector::mixture({1.0}, {mu}, {sd});
    if (diag) {
      diag->run_logliks.assign(1, {log_likelihood(out_spec, p, data, idx)});
    }
    return p;
  }

  double data_sd;
  {
    double mu = std::accumulate(y.begin(), y.end(), 0.0) / static_cast<double>(n);
    double ss = 0.0;
    for (double v : y) ss += (v - mu) * (v - mu);
    data_sd = std::max(std::sqrt(ss / static_cast<double>(n)), kSigmaMin);
  }

  if (diag) diag->run_logliks.clear();

  ParamVector best;
  double best_ll = -kInf;
  std::vector<double> lw(k), mu(k), sg(k);
  std::vector<double> resp(n * k);
  std::vector<double> terms(k), cst(k), half_prec(k);

  for (std::size_t run = 0; run < std::max<std::size_t>(opts.restarts, 1); ++run) {
    if (run == 0 && init != nullptr) {
      for (std::size_t j = 0; j < k; ++j) {
        lw[j] = init->weights[j];
        mu[j] = init->means[j];
        sg[j] = spec.fixed_sigma ? spec.sigma : init->sigmas[j];
      }
    } else {
      Rng rng(derive_seed(opts.seed, run));
      // Means start at k distinct observations (partial Fisher-Yates draw).
      std::vector<std::size_t> pool(n);
      std::iota(pool.begin(), pool.end(), std::size_t{0});
      for (std::size_t j = 0; j < k; ++j) {
        std::uniform_int_distribution<std::size_t> pick(j, n - 1);
        std::swap(pool[j], pool[pick(rng)]);
        mu[j] = y[pool[j]];
        sg[j] = spec.fixed_sigma ? spec.sigma : data_sd;
        lw[j] = 1.0 / static_cast<double>(k);
      }
    }

    double prev_ll = -kInf;
    std::vector<double> trace;
    for (std::size_t iter = 0; iter < opts.max_iter; ++iter) {
      // E-step, log space. Component constants depend only on (lw, sg).
      for (std::size_t j = 0; j < k; ++j) {
        cst[j] = std::log(lw[j]) - std::log(sg[j]) - 0.5 * kLog2Pi;
        half_prec[j] = 0.5 / (sg[j] * sg[j]);
      }
      double ll = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        double m = -kInf;
        for (std::size_t j = 0; j < k; ++j) {
          const double d = y[i] - mu[j];
          terms[j] = cst[j] - d * d * half_prec[j];
          m = std::max(m, terms[j]);
        }
        double s = 0.0;
        for (std::size_t j = 0; j < k; ++j) s += std::exp(terms[j] - m);
        double lse = m + std::log(s);
        ll += lse;
        for (std::size_t j = 0; j < k; ++j) resp[i * k + j] = std::exp(terms[j] - lse);
      }
      trace.push_back(ll);

      // M-step.
      for (std::size_t j = 0; j < k; ++j) {
        double nj = 0.0, sy = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
          nj += resp[i * k + j];
          sy += resp[i * k + j] * y[i];
        }
        if (nj > 1e-12) {
          mu[j] = sy / nj;
          if (!spec.fixed_sigma) {
            double sv = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
              double d = y[i] - mu[j];
              sv += resp[i * k + j] * d * d;
            }
            sg[j] = std::max(std::sqrt(sv / nj), kSigmaMin);
          }
        }
        lw[j] = std::max(nj / static_cast<double>(n), kWeightFloor);
      }
      double wsum = std::accumulate(lw.begin(), lw.end(), 0.0);
      for (double& w : lw) w /= wsum;

      if (iter > 0 && ll - prev_ll < opts.tol) {
        prev_ll = ll;
        break;
      }
      prev_ll = ll;
    }
    if (diag) diag->run_logliks.push_back(std::move(trace));

    ParamVector cand = ParamVector::mixture(lw, mu, sg);
    double cand_ll = log_likelihood(out_spec, cand, data, idx);
    if (cand_ll > best_ll) {
      best_ll = cand_ll;
      best = std::move(cand);
    }
  }
  validate_param(out_spec, best);
  return best;
}

}  // namespace

ParamVector em_fit_mixture(const FamilySpec& spec, const Dataset& data,
                           std::span<const std::size_t> idx, std::size_t k,
                           const EmOptions& opts, EmDiagnostics* diag) {
  return em_fit_mixture_impl(spec, data, idx, k, opts, nullptr, diag);
}

ParamVector em_fit_mixture(const FamilySpec& spec, const Dataset& data,
                           std::span<const std::size_t> idx, std::size_t k,
                           const EmOptions& opts, const ParamVector& init,
                           EmDiagnostics* diag) {
  if (init.weights.size() != k || init.means.size() != k ||
      init.sigmas.size() != k) {
    throw_invalid("warm start needs exactly k components");
  }
  return em_fit_mixture_impl(spec, data, idx, k, opts, &init, diag);
}

Dataset sample_from(const FamilySpec& spec, const ParamVector& p, std::size_t n,
                    std::uint64_t seed) {
  if (n < 1) throw_invalid("sample_from: n must be >= 1");
  validate_param(spec, p);
  Rng rng(seed);
  Dataset out;
  out.dim = spec.obs_dim();
  out.values.reserve(n * out.dim);
  std::normal_distribution<double> stdnorm(0.0, 1.0);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  switch (spec.tag) {
    case Family::Gaussian:
      for (std::size_t i = 0; i < n; ++i) {
        out.values.push_back(p.means[0] + spec.sigma * stdnorm(rng));
      }
      break;
    case Family::GaussianUnknownVar:
      for (std::size_t i = 0; i < n; ++i) {
        out.values.push_back(p.means[0] + p.sigmas[0] * stdnorm(rng));
      }
      break;
    case Family::MixtureK:
      for (std::size_t i = 0; i < n; ++i) {
        double u = unif(rng);
        std::size_t c = p.weights.size() - 1;
        double acc = 0.0;
        for (std::size_t j = 0; j < p.weights.size(); ++j) {
          acc += p.weights[j];
          if (u < acc) {
            c = j;
            break;
          }
        }
        out.values.push_back(p.means[c] + p.sigmas[c] * stdnorm(rng));
      }
      break;
    case Family::UniformScale:
      for (std::size_t i = 0; i < n; ++i) {
        out.values.push_back(p.scale * (1.0 - unif(rng)));
      }
      break;
    case Family::MvnIdentity:
      for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < spec.dim; ++j) {
          out.values.push_back(p.means[j] + stdnorm(rng));
        }
      }
      break;
  }
  return out;
}

}  // namespace uinfer
