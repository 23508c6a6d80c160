#include "sieve.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "error.hpp"
#include "rng.hpp"

namespace uinfer {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double ratio_or_zero(double log_num, double log_den) {
  if (log_num == -kInf && log_den == -kInf) {
    throw_degenerate("statistic 0/0: both fitted likelihoods vanish");
  }
  if (log_num == -kInf) return -kInf;
  if (log_den == -kInf) return kInf;
  return log_num - log_den;
}

}  // namespace

SieveResult select_model(const std::vector<FamilySpec>& levels,
                         const Dataset& data, const DataSplit& split,
                         double alpha, const EmOptions& em) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw_invalid("alpha must be in (0,1)");
  if (levels.size() < 2) throw_invalid("sieve needs at least two levels");
  const double log_thr = -std::log(alpha);

  SieveResult out;
  for (std::size_t j = 1; j + 1 <= levels.size(); ++j) {
    double stat;
    try {
      // Per-level EM seeds stay distinct but reproducible.
      EmOptions em_null = em;
      em_null.seed = derive_seed(em.seed, 2 * j);
      EmOptions em_alt = em;
      em_alt.seed = derive_seed(em.seed, 2 * j + 1);
      ParamVector null_fit =
          fit_mle(levels[j - 1], data, split.d0, Constraint::full(), em_null);
      ParamVector alt_fit =
          fit_mle(levels[j], data, split.d1, Constraint::full(), em_alt);
      double den = log_likelihood(levels[j - 1], null_fit, data, split.d0);
      double num = log_likelihood(levels[j], alt_fit, data, split.d0);
      stat = ratio_or_zero(num, den);
    } catch (const Error& e) {
      throw Error(e.code(), "level " + std::to_string(j) + ": " + e.what());
    }
    out.log_statistics.push_back(stat);
    out.levels_tested = j;
    if (!(stat > log_thr)) {  // ties do not reject
      out.j_hat = j;
      return out;
    }
  }
  out.j_hat = levels.size();  // sentinel: every tested level rejected
  return out;
}

SieveResult select_mixture_order(const Dataset& data, const DataSplit& split,
                                 double alpha, std::size_t j_max,
                                 bool fixed_sigma, double sigma,
                                 const EmOptions& em) {
  if (j_max < 1) throw_invalid("sieve needs j_max >= 1");
  std::vector<FamilySpec> levels;
  levels.reserve(j_max + 1);
  for (std::size_t k = 1; k <= j_max + 1; ++k) {
    FamilySpec spec;
    spec.tag = Family::MixtureK;
    spec.k = k;
    spec.sigma = sigma;
    spec.fixed_sigma = fixed_sigma;
    levels.push_back(spec);
  }
  return select_model(levels, data, split, alpha, em);
}

}  // namespace uinfer
