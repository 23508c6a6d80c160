#pragma once

#include <functional>
#include <span>
#include <vector>

#include "dataset.hpp"
#include "families.hpp"

namespace uinfer {

// log_statistic is log U_n (or log W_n / log T-bar); the threshold is
// log(1/alpha). reject <=> log_statistic > log_threshold, strictly; p_bound
// is the Markov bound min(1, 1/statistic).
struct TestOutcome {
  double log_statistic = 0.0;
  double log_threshold = 0.0;
  bool reject = false;
  double p_bound = 1.0;
};

TestOutcome make_outcome(double log_statistic, double alpha);

enum class SchemeKind { SingleSplit, Crossfit, KFold, Subsample };

struct SplitScheme {
  SchemeKind kind = SchemeKind::SingleSplit;
  std::size_t folds = 5;      // KFold, Subsample
  std::size_t draws = 10;     // Subsample: number of independent partitions
  std::uint64_t seed = 0;     // Subsample partition stream

  static SplitScheme single();
  static SplitScheme crossfit();
  static SplitScheme kfold(std::size_t k);
  static SplitScheme subsample(std::size_t k, std::size_t b, std::uint64_t seed);
};

// Any estimator of theta from the estimation half is admissible; the default
// is the full-model MLE.
using Estimator =
    std::function<ParamVector(const Dataset&, std::span<const std::size_t>)>;

Estimator mle_estimator(const FamilySpec& spec, const EmOptions& em = {});

// log T_n(theta) = log L0(theta1) - log L0(theta), evaluated on d0.
// +inf when only the denominator vanishes, -inf when only the numerator does;
// both vanishing is a degenerate-statistic error.
double log_split_statistic(const FamilySpec& spec, const ParamVector& theta,
                           const ParamVector& theta1, const Dataset& data,
                           std::span<const std::size_t> d0);

// eta * log T_n(theta), eta in (0,1]; compared against the same threshold.
double powered_log_statistic(double eta, const FamilySpec& spec,
                             const ParamVector& theta, const ParamVector& theta1,
                             const Dataset& data, std::span<const std::size_t> d0);

// log of the arithmetic mean of exp(terms); exact for identical terms.
double averaged_log_statistic(std::span<const double> log_terms);

// Scheme-averaged statistic at a fixed theta (no null fitting): single split,
// crossfit, K folds, or B random K-fold partitions.
double scheme_log_statistic(const FamilySpec& spec, const ParamVector& theta,
                            const Dataset& data, const DataSplit& split,
                            const Estimator& estimate, const SplitScheme& scheme);

bool universal_set_contains(const FamilySpec& spec, const ParamVector& theta,
                            const Dataset& data, const DataSplit& split,
                            const Estimator& estimate, double alpha,
                            const SplitScheme& scheme);

TestOutcome split_lrt(const FamilySpec& spec, const Dataset& data,
                      const DataSplit& split, const Constraint& null_c,
                      const Estimator& estimate, double alpha,
                      const EmOptions& em = {});

TestOutcome crossfit_lrt(const FamilySpec& spec, const Dataset& data,
                         const DataSplit& split, const Constraint& null_c,
                         const Estimator& estimate, double alpha,
                         const EmOptions& em = {});

// Scheme-averaged test with the null MLE refit per evaluation fold.
TestOutcome scheme_lrt(const FamilySpec& spec, const Dataset& data,
                       const DataSplit& split, const Constraint& null_c,
                       const Estimator& estimate, double alpha,
                       const SplitScheme& scheme, const EmOptions& em = {});

// log T'_n = log L0(theta1) - log_f0_max. The caller guarantees log_f0_max
// bounds the maximum null log-likelihood on d0; T' <= U_n then holds and the
// test stays valid.
TestOutcome relaxed_split_lrt(const FamilySpec& spec, const Dataset& data,
                              const DataSplit& split, double log_f0_max,
                              const Estimator& estimate, double alpha);

// Profile log-likelihood for the mean of GaussianUnknownVar: the scale is
// maximized out, sigma^2(psi) = mean((y - psi)^2) floored at sigma_min^2.
double profile_log_likelihood(const FamilySpec& spec, const Dataset& data,
                              std::span<const std::size_t> idx, double psi);

bool profile_set_contains(double psi, const FamilySpec& spec, const Dataset& data,
                          const DataSplit& split, const Estimator& estimate,
                          double alpha);

struct GaussianRegion {
  std::vector<double> center;  // d0 sample mean
  double squared_radius = 0.0;
};

// Closed-form identity-covariance normal region around the d0 mean:
// r^2 = (2/m) log(1/alpha) + ||mean0 - mean1||^2, halves of equal size m.
GaussianRegion gaussian_region(const Dataset& data, const DataSplit& split,
                               double alpha);

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
};

// Uniform(0, theta] crossfit interval in its literal form
// [min half-max, max half-max * (2/alpha)^(1/m)] with m the per-half count.
Interval uniform_crossfit_interval(const Dataset& data, const DataSplit& split,
                                   double alpha);
// Same upper endpoint with the lower endpoint raised to the overall maximum
// (positive likelihood forces theta >= max of all data).
Interval uniform_crossfit_interval_support(const Dataset& data,
                                           const DataSplit& split, double alpha);
// Exact pivotal interval [max, max * (1/alpha)^(1/N)] from all N points.
Interval uniform_classical_interval(const Dataset& data, double alpha);

// Confidence-set boundary by bisection (tolerance 1e-10); supported for the
// families whose statistic is monotone away from a contained center
// (Gaussian, UniformScale, 1-d MvnIdentity). Unbounded sides come back as
// +/-inf.
Interval confset_interval(const FamilySpec& spec, const Dataset& data,
                          const DataSplit& split, const Estimator& estimate,
                          double alpha, const SplitScheme& scheme);

// Membership flags over an inclusive linspace grid, for non-monotone cases.
std::vector<int> confset_grid(const FamilySpec& spec, const Dataset& data,
                              const DataSplit& split, const Estimator& estimate,
                              double alpha, const SplitScheme& scheme, double lo,
                              double hi, std::size_t points);

// Profile-set boundary for the GaussianUnknownVar mean, by the same bisection.
Interval profile_interval(const FamilySpec& spec, const Dataset& data,
                          const DataSplit& split, const Estimator& estimate,
                          double alpha);

}  // namespace uinfer
