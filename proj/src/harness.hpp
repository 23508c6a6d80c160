#pragma once

#include <cstdint>
#include <string_view>
#include <vector>

#include "dataset.hpp"
#include "families.hpp"
#include "split.hpp"

namespace uinfer {

// EM settings tuned for Monte Carlo loops. Validity of every test holds for
// any estimator on the estimation half, so fewer restarts trade a little
// power for a lot of wall clock. The bootstrap refits get the lightest
// budget because they run B times per replication.
EmOptions mc_em_options();
EmOptions mc_em_bootstrap_options();

struct RateReport {
  double rate = 0.0;
  double se = 0.0;  // binomial, sqrt(rate(1-rate)/reps)
  std::size_t reps = 0;
};

enum class T1Family { GaussianSimple, GaussianMeanAtMost, MixtureOrder, Uniform };
enum class T1Variant { Split, Crossfit, KFold, Powered, Relaxed, Subsample };

const char* to_string(T1Family f);
const char* to_string(T1Variant v);
bool parse_t1_family(std::string_view s, T1Family& out);
bool parse_t1_variant(std::string_view s, T1Variant& out);

// Null-model simulation: data drawn from a point inside the null, rejection
// rate estimated over reps. Truths: N(0,1) for both Gaussian cells (the
// boundary of MeanAtMost(0)), N(0,1) against a two-component alternative for
// the mixture cell, Uniform(0,1] for the uniform cell.
struct Type1Config {
  T1Family family = T1Family::GaussianSimple;
  T1Variant variant = T1Variant::Split;
  std::size_t n = 100;  // total per replication
  double alpha = 0.1;
  std::size_t reps = 2000;
  std::uint64_t seed = 1;
  unsigned threads = 1;
  double eta = 0.5;                  // Powered
  std::size_t folds = 5;             // KFold, Subsample
  std::size_t subsample_draws = 10;  // Subsample partitions per replication
  double relax_log_slack = 0.6931471805599453;  // Relaxed: ln 2 over the null fit
  EmOptions em = mc_em_options();
};

RateReport simulate_type1(const Type1Config& cfg);

enum class CovFamily { Gaussian, Uniform };

struct CoverageConfig {
  CovFamily family = CovFamily::Gaussian;
  std::size_t n = 100;
  double alpha = 0.1;
  std::size_t reps = 10000;
  double mu_truth = 0.7;     // Gaussian
  double theta_truth = 1.0;  // Uniform
  std::uint64_t seed = 1;
  unsigned threads = 1;
};

// rate = fraction of replications whose confidence set contains the truth.
RateReport simulate_coverage(const CoverageConfig& cfg);

struct MeanStatConfig {
  std::size_t m = 50;  // per half
  std::size_t reps = 100000;
  double mu_truth = 0.0;
  std::uint64_t seed = 1;
  unsigned threads = 1;
};

struct MeanStatReport {
  double mean = 0.0;
  double se = 0.0;  // sample standard error of the mean
  std::size_t reps = 0;
};

// Mean of T_n(theta*) under the truth; the expectation bound says <= 1.
MeanStatReport mean_split_statistic_at_truth(const MeanStatConfig& cfg);

struct RadiusConfig {
  std::size_t d = 10;
  std::size_t m = 50;  // per half, total n = 2m
  double alpha = 0.1;
  std::size_t reps = 10000;
  std::uint64_t seed = 1;
  unsigned threads = 1;
};

struct RadiusReport {
  std::size_t d = 0;
  std::size_t n = 0;
  double alpha = 0.0;
  double emp_mean_r2 = 0.0;
  double theory_r2 = 0.0;     // (4 ln(1/alpha) + 4d) / n
  double classical_r2 = 0.0;  // chi-square upper-alpha quantile / n
  double ratio_to_classical = 0.0;
  std::size_t reps = 0;
};

RadiusReport radius_experiment(const RadiusConfig& cfg);

struct PowerConfig {
  std::vector<double> mu_grid;  // empty: 0, 0.25, ..., 3
  std::size_t n = 200;          // total per replication
  double alpha = 0.1;
  std::size_t reps = 1000;
  std::size_t boot_b = 200;
  bool with_bootstrap = true;
  std::uint64_t seed = 1;
  unsigned threads = 1;
  EmOptions em_alt = mc_em_options();
  EmOptions em_boot = mc_em_bootstrap_options();
};

struct PowerPoint {
  double mu = 0.0;
  double power_universal = 0.0;
  double se_u = 0.0;
  double power_bootstrap = 0.0;  // zero when the comparator is disabled
  double se_b = 0.0;
};

struct PowerReport {
  std::vector<PowerPoint> points;
  std::size_t reps = 0;
};

// Truth 0.5 N(-mu,1) + 0.5 N(mu,1), unit scales; the universal test is the
// split LRT of one component versus two, the comparator bootstraps the
// full-data LRS under the fitted single-component null.
PowerReport simulate_power_curve(const PowerConfig& cfg);

// Full-data LRS = 2[log L(theta_k1) - log L(theta_k0)]; p-value
// (1 + #{resampled LRS >= observed}) / (B + 1); rejects when p <= alpha.
// Stored log_statistic is log(1/p) so smaller p still means more evidence;
// the strict-inequality rule of make_outcome would differ only at p == alpha
// exactly, which the +1/(B+1) lattice avoids for any alpha not of the form
// j/(B+1).
TestOutcome bootstrap_mixture_lrt(const FamilySpec& spec, const Dataset& data,
                                  std::size_t k0, std::size_t k1,
                                  std::size_t b, double alpha,
                                  std::uint64_t seed, const EmOptions& em);

struct SeqExpConfig {
  std::size_t horizon = 1000;
  double alpha = 0.1;
  std::size_t reps = 2000;
  double mu_truth = 0.0;
  double mu_null = 0.0;  // simple null and the default plug-in
  std::size_t t0 = 1;
  std::uint64_t seed = 1;
  unsigned threads = 1;
};

struct SeqExpReport {
  double crossing_rate = 0.0;  // monitor fired at some t <= horizon
  double se = 0.0;
  double coverage_rate = 0.0;  // mu_truth in every C_t up to the horizon
  double se_coverage = 0.0;
  std::size_t horizon = 0;
  double alpha = 0.0;
  std::size_t reps = 0;
};

SeqExpReport seq_crossing_experiment(const SeqExpConfig& cfg);

struct SieveExpConfig {
  std::size_t k_true = 1;  // 1: N(0,1); 2: equal-weight mixture at -mu, +mu
  double mu = 2.0;
  std::size_t n = 200;
  std::size_t j_max = 3;
  double alpha = 0.1;
  std::size_t reps = 1000;
  bool fixed_sigma = true;
  double sigma = 1.0;
  std::uint64_t seed = 1;
  unsigned threads = 1;
  EmOptions em = mc_em_options();
};

struct SieveExpReport {
  std::vector<std::size_t> j_hat_counts;  // [j-1] = #{j_hat == j}, j = 1..j_max+1
  double correct_rate = 0.0;    // j_hat == k_true
  double overshoot_rate = 0.0;  // j_hat > k_true
  std::size_t reps = 0;
};

SieveExpReport sieve_experiment(const SieveExpConfig& cfg);

}  // namespace uinfer
