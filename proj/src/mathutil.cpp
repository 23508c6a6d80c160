#include "mathutil.hpp"

#include <algorithm>
#include <limits>

#include "error.hpp"

namespace uinfer {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Lower regularized incomplete gamma by power series; requires x < a+1.
double gamma_p_series(double a, double x) {
  double ap = a;
  double sum = 1.0 / a;
  double del = sum;
  for (int i = 0; i < 1000; ++i) {
    ap += 1.0;
    del *= x / ap;
    sum += del;
    if (std::abs(del) < std::abs(sum) * 1e-16) break;
  }
  return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

// Upper regularized incomplete gamma Q(a,x) by modified Lentz continued
// fraction; requires x >= a+1.
double gamma_q_contfrac(double a, double x) {
  const double tiny = 1e-300;
  double b = x + 1.0 - a;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i <= 1000; ++i) {
    double an = -static_cast<double>(i) * (static_cast<double>(i) - a);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    double delta = d * c;
    h *= delta;
    if (std::abs(delta - 1.0) < 1e-16) break;
  }
  return h * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

// Acklam's rational approximation to the standard normal quantile; only used
// to seed Newton in chi_square_quantile, so ~1e-9 accuracy is plenty.
double normal_quantile(double p) {
  static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                             -2.759285104469687e+02, 1.383577518672690e+02,
                             -3.066479806614716e+01, 2.506628277459239e+00};
  static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                             -1.556989798598866e+02, 6.680131188771972e+01,
                             -1.328068155288572e+01};
  static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                             -2.400758277161838e+00, -2.549732539343734e+00,
                             4.374664141464968e+00,  2.938163982698783e+00};
  static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                             2.445134137142996e+00, 3.754408661907416e+00};
  const double plow = 0.02425;
  if (p < plow) {
    double q = std::sqrt(-2.0 * std::log(p));
    return (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
           ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  if (p > 1.0 - plow) {
    double q = std::sqrt(-2.0 * std::log(1.0 - p));
    return -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
           ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  double q = p - 0.5;
  double r = q * q;
  return (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
         (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
}

}  // namespace

double log_sum_exp(std::span<const double> terms) {
  if (terms.empty()) throw_invalid("log_sum_exp: empty input");
  double m = -kInf;
  for (double t : terms) m = std::max(m, t);
  if (std::isinf(m)) return m;  // all -inf, or any +inf
  double s = 0.0;
  for (double t : terms) s += std::exp(t - m);
  return m + std::log(s);
}

double log_sum_exp(double a, double b) {
  const double terms[2] = {a, b};
  return log_sum_exp(std::span<const double>(terms, 2));
}

double log_mean_exp(std::span<const double> terms) {
  if (terms.empty()) throw_invalid("log_mean_exp: empty input");
  double m = -kInf;
  for (double t : terms) m = std::max(m, t);
  if (std::isinf(m)) return m;
  double s = 0.0;
  for (double t : terms) s += std::exp(t - m);
  return m + std::log(s / static_cast<double>(terms.size()));
}

double gamma_p(double a, double x) {
  if (!(a > 0.0) || !(x >= 0.0)) throw_invalid("gamma_p: need a > 0, x >= 0");
  if (x == 0.0) return 0.0;
  if (x < a + 1.0) return gamma_p_series(a, x);
  return 1.0 - gamma_q_contfrac(a, x);
}

double chi_square_quantile(double p, double dof) {
  if (!(dof > 0.0)) throw_invalid("chi_square_quantile: dof must be > 0");
  if (!(p >= 0.0 && p < 1.0)) throw_invalid("chi_square_quantile: p must be in [0,1)");
  if (p == 0.0) return 0.0;

  const double a = 0.5 * dof;
  // Wilson-Hilferty cube approximation.
  double z = normal_quantile(p);
  double t = 1.0 - 2.0 / (9.0 * dof) + z * std::sqrt(2.0 / (9.0 * dof));
  double x = dof * t * t * t;
  if (!(x > 0.0)) x = 0.5;

  // Safeguarded Newton on f(x) = P(a, x/2) - p; f' is the chi-square pdf.
  double lo = 0.0, hi = kInf;
  for (int it = 0; it < 200; ++it) {
    double f = gamma_p(a, 0.5 * x) - p;
    if (f > 0.0) hi = std::min(hi, x);
    else lo = std::max(lo, x);
    double logpdf = (a - 1.0) * std::log(0.5 * x) - 0.5 * x - std::lgamma(a) -
                    std::log(2.0);
    double step = f / std::exp(logpdf);
    double xn = x - step;
    if (!(xn > lo) || !(xn < hi) || !std::isfinite(xn)) {
      xn = std::isinf(hi) ? 2.0 * x : 0.5 * (lo + hi);
    }
    if (std::abs(xn - x) <= 1e-12 * std::max(1.0, std::abs(x))) {
      x = xn;
      break;
    }
    x = xn;
  }
  return x;
}

}  // namespace uinfer
