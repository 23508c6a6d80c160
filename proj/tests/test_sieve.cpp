#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <vector>

#include "error.hpp"
#include "families.hpp"
#include "sieve.hpp"

using namespace uinfer;

namespace {

FamilySpec mixture_spec(std::size_t k) {
  FamilySpec s;
  s.tag = Family::MixtureK;
  s.k = k;
  s.fixed_sigma = true;
  s.sigma = 1.0;
  return s;
}

}  // namespace

TEST_CASE("identical levels never reject, so the walk stops at level 1") {
  FamilySpec g;
  std::vector<FamilySpec> levels = {g, g, g};
  Dataset d = sample_from(g, ParamVector::gaussian(0.3), 80, 4);
  SieveResult r = select_model(levels, d, first_half_split(80), 0.1);
  CHECK(r.j_hat == 1);
  CHECK(r.levels_tested == 1);
  REQUIRE(r.log_statistics.size() == 1);
  // both fits estimate the same one-parameter class; the ratio stays modest
  CHECK(r.log_statistics[0] <= std::log(10.0));
}

TEST_CASE("every level rejecting yields the sentinel level") {
  // data with spread 5 against levels whose scales are far too small
  FamilySpec tight;
  tight.sigma = 0.1;
  FamilySpec medium;
  medium.sigma = 1.0;
  FamilySpec free_scale;
  free_scale.tag = Family::GaussianUnknownVar;
  std::vector<FamilySpec> levels = {tight, medium, free_scale};

  FamilySpec wide;
  wide.tag = Family::GaussianUnknownVar;
  Dataset d =
      sample_from(wide, ParamVector::gaussian_unknown_var(0.0, 5.0), 200, 8);
  SieveResult r = select_model(levels, d, first_half_split(200), 0.1);
  CHECK(r.levels_tested == 2);
  CHECK(r.j_hat == 3);  // levels_tested + 1: nothing in the list fit
  CHECK(r.log_statistics.size() == 2);
  for (double s : r.log_statistics) CHECK(s > std::log(10.0));
}

TEST_CASE("j_hat is the first level whose statistic fails the threshold") {
  FamilySpec g;
  std::vector<FamilySpec> levels = {g, g, g, g};
  Dataset d = sample_from(g, ParamVector::gaussian(0.0), 60, 15);
  SieveResult r = select_model(levels, d, first_half_split(60), 0.1);
  double thr = std::log(10.0);
  for (std::size_t j = 1; j < r.j_hat; ++j) {
    CHECK(r.log_statistics[j - 1] > thr);
  }
  if (r.j_hat <= r.levels_tested) {
    CHECK(r.log_statistics[r.j_hat - 1] <= thr);
  }
}

TEST_CASE("select_model validates its inputs") {
  FamilySpec g;
  Dataset d = sample_from(g, ParamVector::gaussian(0.0), 20, 1);
  DataSplit split = first_half_split(20);
  std::vector<FamilySpec> one = {g};
  CHECK_THROWS_AS(select_model(one, d, split, 0.1), Error);
  std::vector<FamilySpec> two = {g, g};
  CHECK_THROWS_AS(select_model(two, d, split, 0.0), Error);
  CHECK_THROWS_AS(select_model(two, d, split, 1.0), Error);
}

TEST_CASE("single gaussian data keeps the mixture order at one") {
  FamilySpec g;
  Dataset d = sample_from(g, ParamVector::gaussian(0.0), 400, 21);
  EmOptions em;
  em.restarts = 4;
  em.seed = 3;
  SieveResult r =
      select_mixture_order(d, first_half_split(400), 0.1, 3, true, 1.0, em);
  CHECK(r.j_hat == 1);
}

TEST_CASE("a well separated two-component mixture is detected") {
  FamilySpec m2 = mixture_spec(2);
  ParamVector truth = ParamVector::mixture({0.5, 0.5}, {-2.5, 2.5}, {1.0, 1.0});
  Dataset d = sample_from(m2, truth, 800, 33);
  EmOptions em;
  em.restarts = 4;
  em.seed = 3;
  SieveResult r =
      select_mixture_order(d, first_half_split(800), 0.1, 3, true, 1.0, em);
  CHECK(r.j_hat == 2);
  REQUIRE(r.log_statistics.size() >= 2);
  CHECK(r.log_statistics[0] > std::log(10.0));   // one component rejected
  CHECK(r.log_statistics[1] <= std::log(10.0));  // two accepted
}

TEST_CASE("selection is deterministic for fixed seeds") {
  FamilySpec m2 = mixture_spec(2);
  ParamVector truth = ParamVector::mixture({0.5, 0.5}, {-1.0, 1.0}, {1.0, 1.0});
  Dataset d = sample_from(m2, truth, 300, 77);
  EmOptions em;
  em.restarts = 3;
  em.seed = 9;
  SieveResult a =
      select_mixture_order(d, seeded_split(300, 5), 0.1, 3, true, 1.0, em);
  SieveResult b =
      select_mixture_order(d, seeded_split(300, 5), 0.1, 3, true, 1.0, em);
  CHECK(a.j_hat == b.j_hat);
  CHECK(a.log_statistics == b.log_statistics);
}
