#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "dataset.hpp"

namespace uinfer {

enum class Family {
  Gaussian,            // known scale (FamilySpec::sigma), mean free
  GaussianUnknownVar,  // mean and scale free
  MixtureK,            // k-component 1-d Gaussian mixture
  UniformScale,        // Uniform(0, theta], theta free
  MvnIdentity,         // d-dimensional normal, identity covariance
};

struct FamilySpec {
  Family tag = Family::Gaussian;
  std::size_t dim = 1;       // MvnIdentity observation dimension
  std::size_t k = 1;         // MixtureK component count
  double sigma = 1.0;        // Gaussian known scale; MixtureK scale when fixed
  bool fixed_sigma = false;  // MixtureK: freeze all component scales at sigma

  std::size_t obs_dim() const { return tag == Family::MvnIdentity ? dim : 1; }
};

// Flat parameter container; which blocks are meaningful depends on the family.
// Packed layout (C boundary): Gaussian [mu]; GaussianUnknownVar [mu, sigma];
// MixtureK [w_1..w_k, mu_1..mu_k, sigma_1..sigma_k]; UniformScale [theta];
// MvnIdentity [mu_1..mu_d].
struct ParamVector {
  Family tag = Family::Gaussian;
  std::vector<double> means;
  std::vector<double> sigmas;
  std::vector<double> weights;
  double scale = 0.0;

  static ParamVector gaussian(double mu);
  static ParamVector gaussian_unknown_var(double mu, double sigma);
  static ParamVector mixture(std::vector<double> w, std::vector<double> mu,
                             std::vector<double> sigma);
  static ParamVector uniform_scale(double theta);
  static ParamVector mvn(std::vector<double> mu);
};

void validate_param(const FamilySpec& spec, const ParamVector& p);
ParamVector packed_to_param(const FamilySpec& spec, std::span<const double> packed);
std::vector<double> param_to_packed(const FamilySpec& spec, const ParamVector& p);

struct Constraint {
  enum class Kind { Full, FixedPoint, MeanAtMost, MixtureComponents, FixedMean };
  Kind kind = Kind::Full;
  ParamVector point;    // FixedPoint
  double bound = 0.0;   // MeanAtMost
  std::size_t k = 1;    // MixtureComponents
  double psi = 0.0;     // FixedMean: g(theta) = mean pinned at psi

  static Constraint full();
  static Constraint fixed_point(ParamVector p);
  static Constraint mean_at_most(double c);
  static Constraint mixture_components(std::size_t k);
  static Constraint fixed_mean(double psi);
};

struct EmOptions {
  std::size_t restarts = 10;
  double tol = 1e-8;
  std::size_t max_iter = 500;
  std::uint64_t seed = 0;
};

// Per-restart log-likelihood traces, one value per EM iteration; each trace
// must be nondecreasing up to 1e-8 slack.
struct EmDiagnostics {
  std::vector<std::vector<double>> run_logliks;
};

// Natural-log density; -inf iff y lies outside the support.
double log_density(const FamilySpec& spec, const ParamVector& p,
                   std::span<const double> y);

// Sum of log densities over idx; -inf when any point is outside the support.
double log_likelihood(const FamilySpec& spec, const ParamVector& p,
                      const Dataset& data, std::span<const std::size_t> idx);

// Constrained maximum likelihood. Closed forms everywhere except
// MixtureComponents, which delegates to em_fit_mixture.
ParamVector fit_mle(const FamilySpec& spec, const Dataset& data,
                    std::span<const std::size_t> idx, const Constraint& c,
                    const EmOptions& em = {});

ParamVector em_fit_mixture(const FamilySpec& spec, const Dataset& data,
                           std::span<const std::size_t> idx, std::size_t k,
                           const EmOptions& opts, EmDiagnostics* diag = nullptr);

// As above, but the first run starts from `init` (a k-component parameter)
// instead of a random draw; remaining opts.restarts-1 runs stay random.
ParamVector em_fit_mixture(const FamilySpec& spec, const Dataset& data,
                           std::span<const std::size_t> idx, std::size_t k,
                           const EmOptions& opts, const ParamVector& init,
                           EmDiagnostics* diag = nullptr);

// n i.i.d. draws; identical seeds give identical datasets.
Dataset sample_from(const FamilySpec& spec, const ParamVector& p, std::size_t n,
                    std::uint64_t seed);

}  // namespace uinfer
