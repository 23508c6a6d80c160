#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <limits>
#include <vector>

#include "mathutil.hpp"

using namespace uinfer;

namespace {
const double kInf = std::numeric_limits<double>::infinity();
}

TEST_CASE("log_sum_exp basics") {
  CHECK(log_sum_exp(std::log(2.0), std::log(3.0)) ==
        doctest::Approx(std::log(5.0)).epsilon(1e-15));
  CHECK(log_sum_exp(-kInf, 1.5) == doctest::Approx(1.5));
  CHECK(log_sum_exp(1.5, -kInf) == doctest::Approx(1.5));
  CHECK(log_sum_exp(-kInf, -kInf) == -kInf);
  // no overflow far outside double range for exp
  CHECK(log_sum_exp(1000.0, 1000.0) ==
        doctest::Approx(1000.0 + std::log(2.0)).epsilon(1e-15));
  CHECK(log_sum_exp(-1000.0, -1000.0) ==
        doctest::Approx(-1000.0 + std::log(2.0)).epsilon(1e-15));
}

TEST_CASE("log_sum_exp span matches pairwise") {
  std::vector<double> t = {std::log(1.0), std::log(2.0), std::log(3.0),
                           std::log(4.0)};
  CHECK(log_sum_exp(t) == doctest::Approx(std::log(10.0)).epsilon(1e-15));
  std::vector<double> none = {-kInf, -kInf};
  CHECK(log_sum_exp(none) == -kInf);
}

TEST_CASE("log_mean_exp identical terms is exact") {
  std::vector<double> t = {-3.7, -3.7, -3.7};
  CHECK(log_mean_exp(t) == -3.7);  // bitwise, max extraction cancels
  std::vector<double> one = {2.25};
  CHECK(log_mean_exp(one) == 2.25);
}

TEST_CASE("log_mean_exp averages on the natural scale") {
  std::vector<double> t = {std::log(2.0), std::log(4.0)};
  CHECK(log_mean_exp(t) == doctest::Approx(std::log(3.0)).epsilon(1e-15));
  // mean of {exp(-inf)=0, 6} is 3
  std::vector<double> mixed = {-kInf, std::log(6.0)};
  CHECK(log_mean_exp(mixed) == doctest::Approx(std::log(3.0)).epsilon(1e-15));
}

TEST_CASE("gamma_p special values") {
  // P(1, x) = 1 - exp(-x)
  for (double x : {0.1, 0.5, 1.0, 2.0, 10.0}) {
    CHECK(gamma_p(1.0, x) ==
          doctest::Approx(1.0 - std::exp(-x)).epsilon(1e-12));
  }
  // P(0.5, x) = erf(sqrt(x))
  for (double x : {0.25, 1.0, 4.0}) {
    CHECK(gamma_p(0.5, x) ==
          doctest::Approx(std::erf(std::sqrt(x))).epsilon(1e-12));
  }
  CHECK(gamma_p(3.0, 0.0) == 0.0);
  CHECK(gamma_p(3.0, 1e6) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("chi-square quantiles against reference values") {
  struct Row {
    double p;
    double dof;
    double x;
  };
  // reference values computed with an independent implementation
  const Row rows[] = {
      {0.9, 1, 2.7055434540954},      {0.9, 2, 4.60517018598809},
      {0.9, 3, 6.25138863117033},     {0.9, 5, 9.23635689978112},
      {0.9, 10, 15.9871791721053},    {0.9, 50, 63.1671210057263},
      {0.9, 100, 118.498003811062},   {0.9, 400, 436.648985054577},
      {0.95, 2, 5.99146454710798},    {0.5, 1, 0.454936423119572},
      {0.99, 7, 18.4753069065824},    {0.025, 3, 0.215795282623898},
  };
  for (const Row& r : rows) {
    CAPTURE(r.p);
    CAPTURE(r.dof);
    CHECK(chi_square_quantile(r.p, r.dof) ==
          doctest::Approx(r.x).epsilon(1e-9));
  }
}

TEST_CASE("chi-square quantile with dof 2 has a closed form") {
  // CDF is 1 - exp(-x/2), so the quantile is -2 log(1-p)
  for (double p : {0.01, 0.1, 0.5, 0.9, 0.999}) {
    CHECK(chi_square_quantile(p, 2.0) ==
          doctest::Approx(-2.0 * std::log1p(-p)).epsilon(1e-10));
  }
}

TEST_CASE("chi-square quantile round trips through gamma_p") {
  for (double p : {0.05, 0.25, 0.5, 0.75, 0.9, 0.99}) {
    for (double dof : {1.0, 3.0, 7.0, 20.0, 150.0}) {
      double x = chi_square_quantile(p, dof);
      CHECK(gamma_p(dof / 2.0, x / 2.0) == doctest::Approx(p).epsilon(1e-9));
    }
  }
}

TEST_CASE("chi-square quantile is monotone in p") {
  double prev = 0.0;
  for (double p = 0.05; p < 1.0; p += 0.05) {
    double x = chi_square_quantile(p, 4.0);
    CHECK(x > prev);
    prev = x;
  }
}
