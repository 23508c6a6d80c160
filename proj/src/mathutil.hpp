#pragma once

#include <cmath>
#include <numbers>
#include <span>

namespace uinfer {

inline const double kLog2Pi = std::log(2.0 * std::numbers::pi);

// Scales below sigma_min are clamped everywhere (mixture likelihoods are
// unbounded without a floor).
inline constexpr double kSigmaMin = 1e-3;
inline constexpr double kWeightFloor = 1e-6;

double log_sum_exp(std::span<const double> terms);
double log_sum_exp(double a, double b);

// log of the arithmetic mean of exp(terms). Exact when all terms are equal:
// max extraction makes the correction log(n)-log(n) cancel bitwise.
double log_mean_exp(std::span<const double> terms);

// Regularized lower incomplete gamma P(a, x), a > 0, x >= 0.
// Series for x < a+1, Lentz continued fraction otherwise.
double gamma_p(double a, double x);

// Quantile of the chi-square distribution with dof degrees of freedom:
// smallest x with P(dof/2, x/2) = p. Wilson-Hilferty start, safeguarded
// Newton, |dx| tolerance 1e-12 relative.
double chi_square_quantile(double p, double dof);

}  // namespace uinfer
