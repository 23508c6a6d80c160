#pragma once

#include <cstdint>
#include <span>

#include "dataset.hpp"
#include "families.hpp"

namespace uinfer {

// Running-MLE likelihood-ratio martingale. The numerator multiplies in the
// density of each new point under the plug-in fitted from everything seen
// before it (never the point itself); the denominator is the null MLE refit
// to the points seen after burn-in. log_M stays 0 through the burn-in
// horizon t0; factors and the null fit start at t0+1.
struct SeqState {
  FamilySpec family;
  Constraint null_c;
  EmOptions em;

  std::size_t t = 0;
  std::size_t t0 = 1;
  ParamVector theta1;          // current plug-in, refit from all t points
  double log_numerator = 0.0;  // sum of post-burn-in plug-in log densities
  double log_m = 0.0;
  double p_min = 1.0;          // running min of the capped anytime p

  // Sufficient statistics over all points (plug-in refresh) and over the
  // post-burn-in points (denominator and confidence sequences). Gaussian,
  // GaussianUnknownVar, MvnIdentity and UniformScale update in O(1); MixtureK
  // refits from the stored stream in O(t).
  std::vector<double> sum_all;
  double sumsq_all = 0.0;
  double max_all = 0.0;
  double min_all = 0.0;
  std::vector<double> sum_post;
  double sumsq_post = 0.0;
  double max_post = 0.0;
  double min_post = 0.0;
  std::size_t post_count = 0;

  Dataset stream;
};

SeqState seq_init(const FamilySpec& spec, const Constraint& null_c,
                  const ParamVector& theta1_default, std::size_t t0 = 1,
                  const EmOptions& em = {});

void seq_update(SeqState& state, std::span<const double> y);

// true iff log_M > log(1/alpha), strictly.
bool seq_should_stop(const SeqState& state, double alpha);

struct AnytimeP {
  double p_t = 1.0;
  double p_bar_t = 1.0;  // running minimum, never above p_t's own cap
};

AnytimeP seq_anytime_p(const SeqState& state);

// Log-likelihood of theta over the post-burn-in points, from the sufficient
// statistics where the family allows it.
double seq_post_log_likelihood(const SeqState& state, const ParamVector& theta);

// Membership in the time-t confidence set: everything is contained during
// burn-in; afterwards theta is in iff
// log_numerator - log-likelihood(theta, post points) <= log(1/alpha).
bool confseq_contains(const SeqState& state, const ParamVector& theta,
                      double alpha);

// log L_t with theta_star in the denominator; dominates log_M under the null
// whenever theta_star lies in the null set.
double oracle_log_martingale(const SeqState& state, const ParamVector& theta_star);

}  // namespace uinfer
