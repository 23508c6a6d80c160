#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <cstring>
#include <string>
#include <vector>

#include "uinfer/uinfer.h"

namespace {

uinfer_family_spec gaussian_spec() {
  uinfer_family_spec s{};
  s.family = UINFER_FAMILY_GAUSSIAN;
  s.k = 1;
  s.dim = 1;
  s.sigma = 1.0;
  return s;
}

uinfer_split_spec first_half() { return {UINFER_SPLIT_FIRST_HALF, 0}; }

struct Owned {
  uinfer_dataset* d = nullptr;
  ~Owned() { uinfer_dataset_free(d); }
};

}  // namespace

TEST_CASE("status codes and the error message channel") {
  CHECK(uinfer_dataset_create(nullptr, 3, 1, nullptr) == UINFER_ERR_INVALID);
  CHECK(std::strlen(uinfer_last_error()) > 0);

  Owned ds;
  const double v[] = {1.0, 2.0, 3.0, 4.0};
  REQUIRE(uinfer_dataset_create(v, 4, 1, &ds.d) == UINFER_OK);
  CHECK(uinfer_dataset_size(ds.d) == 4);
  CHECK(uinfer_dataset_dim(ds.d) == 1);
  double out = 0.0;
  CHECK(uinfer_dataset_value(ds.d, 2, 0, &out) == UINFER_OK);
  CHECK(out == 3.0);
  CHECK(uinfer_dataset_value(ds.d, 9, 0, &out) == UINFER_ERR_INVALID);
}

TEST_CASE("csv parsing reports line numbers through the C boundary") {
  Owned ds;
  CHECK(uinfer_dataset_parse_csv("y1\n1.0\nbad\n", &ds.d) ==
        UINFER_ERR_INVALID);
  CHECK(std::string(uinfer_last_error()).find("line 3") != std::string::npos);
  REQUIRE(uinfer_dataset_parse_csv("y1\n1.0\n2.0\n", &ds.d) == UINFER_OK);
  CHECK(uinfer_dataset_size(ds.d) == 2);
}

TEST_CASE("sampling, fitting and log-likelihood round trip") {
  uinfer_family_spec spec = gaussian_spec();
  Owned ds;
  REQUIRE(uinfer_sample(&spec, nullptr, 0, 100, 7, &ds.d) ==
          UINFER_ERR_INVALID);  // params required
  const double mu[] = {1.5};
  REQUIRE(uinfer_sample(&spec, mu, 1, 100, 7, &ds.d) == UINFER_OK);
  CHECK(uinfer_dataset_size(ds.d) == 100);

  uinfer_null_spec full{};
  full.kind = UINFER_NULL_FULL;
  double fitted[4] = {0};
  std::size_t len = 0;
  REQUIRE(uinfer_fit_mle(&spec, ds.d, &full, nullptr, fitted, 4, &len) ==
          UINFER_OK);
  CHECK(len == 1);
  CHECK(fitted[0] == doctest::Approx(1.5).epsilon(0.2));

  double ll = 0.0;
  REQUIRE(uinfer_log_likelihood(&spec, ds.d, fitted, len, &ll) == UINFER_OK);
  CHECK(ll < 0.0);

  // the required length is reported when the buffer is too small
  std::size_t need = 0;
  CHECK(uinfer_fit_mle(&spec, ds.d, &full, nullptr, fitted, 0, &need) ==
        UINFER_ERR_INVALID);
  CHECK(need == 1);
}

TEST_CASE("split and crossfit tests through the C API") {
  uinfer_family_spec spec = gaussian_spec();
  const double mu[] = {0.0};
  Owned ds;
  REQUIRE(uinfer_sample(&spec, mu, 1, 60, 3, &ds.d) == UINFER_OK);

  uinfer_null_spec null_pt{};
  null_pt.kind = UINFER_NULL_FIXED_POINT;
  null_pt.point = mu;
  null_pt.point_len = 1;
  uinfer_split_spec sp = first_half();

  uinfer_test_outcome a{}, b{};
  REQUIRE(uinfer_split_lrt(&spec, ds.d, &sp, &null_pt, 0.1, nullptr, &a) ==
          UINFER_OK);
  REQUIRE(uinfer_crossfit_lrt(&spec, ds.d, &sp, &null_pt, 0.1, nullptr, &b) ==
          UINFER_OK);
  CHECK(a.log_threshold == doctest::Approx(std::log(10.0)));
  CHECK(b.log_threshold == doctest::Approx(std::log(10.0)));
  CHECK(a.p_bound <= 1.0);
  CHECK(b.p_bound <= 1.0);

  // alpha outside (0,1) is invalid input
  CHECK(uinfer_split_lrt(&spec, ds.d, &sp, &null_pt, 1.5, nullptr, &a) ==
        UINFER_ERR_INVALID);

  // scheme averaging with an explicit kfold spec
  uinfer_scheme kf{};
  kf.kind = UINFER_SCHEME_KFOLD;
  kf.folds = 5;
  uinfer_test_outcome c{};
  REQUIRE(uinfer_scheme_lrt(&spec, ds.d, &sp, &kf, &null_pt, 0.1, nullptr,
                            &c) == UINFER_OK);
  CHECK(c.log_threshold == doctest::Approx(std::log(10.0)));
}

TEST_CASE("confidence machinery through the C API") {
  uinfer_family_spec spec = gaussian_spec();
  const double mu[] = {0.5};
  Owned ds;
  REQUIRE(uinfer_sample(&spec, mu, 1, 80, 4, &ds.d) == UINFER_OK);
  uinfer_split_spec sp = first_half();
  uinfer_scheme single{};
  single.kind = UINFER_SCHEME_SINGLE;

  uinfer_interval iv{};
  REQUIRE(uinfer_confset_interval(&spec, ds.d, &sp, &single, 0.1, nullptr,
                                  &iv) == UINFER_OK);
  CHECK(iv.lo < 0.5);
  CHECK(iv.hi > 0.5);

  int inside = 0;
  REQUIRE(uinfer_universal_set_contains(&spec, ds.d, &sp, &single, mu, 1, 0.1,
                                        nullptr, &inside) == UINFER_OK);
  CHECK(inside == 1);

  std::vector<int> flags(21, -1);
  REQUIRE(uinfer_confset_grid(&spec, ds.d, &sp, &single, 0.1, nullptr, -2.0,
                              3.0, 21, flags.data()) == UINFER_OK);
  int n_inside = 0;
  for (int f : flags) {
    CHECK(f >= 0);
    n_inside += f;
  }
  CHECK(n_inside > 0);

  double center[1] = {0};
  double r2 = 0.0;
  REQUIRE(uinfer_gaussian_region(ds.d, &sp, 0.1, center, &r2) == UINFER_OK);
  CHECK(r2 > 0.0);
  CHECK(std::abs(center[0] - (iv.lo + iv.hi) / 2.0) < 1e-6);
}

TEST_CASE("uniform intervals accept any subset of outputs") {
  uinfer_family_spec uspec{};
  uspec.family = UINFER_FAMILY_UNIFORM_SCALE;
  const double theta[] = {2.0};
  Owned ds;
  REQUIRE(uinfer_sample(&uspec, theta, 1, 40, 5, &ds.d) == UINFER_OK);
  uinfer_split_spec sp = first_half();
  uinfer_interval plain{}, classical{};
  REQUIRE(uinfer_uniform_intervals(ds.d, &sp, 0.1, &plain, nullptr,
                                   &classical) == UINFER_OK);
  CHECK(plain.hi > plain.lo);
  CHECK(classical.hi > classical.lo);
  CHECK(plain.hi > classical.hi);  // universal pays a factor over the pivot
}

TEST_CASE("sequential lifecycle through the C API") {
  uinfer_family_spec spec = gaussian_spec();
  const double mu0[] = {0.0};
  uinfer_null_spec null_pt{};
  null_pt.kind = UINFER_NULL_FIXED_POINT;
  null_pt.point = mu0;
  null_pt.point_len = 1;

  uinfer_seq* seq = nullptr;
  REQUIRE(uinfer_seq_create(&spec, &null_pt, mu0, 1, 1, nullptr, &seq) ==
          UINFER_OK);
  double y = 2.0;
  REQUIRE(uinfer_seq_update(seq, &y, 1) == UINFER_OK);
  REQUIRE(uinfer_seq_update(seq, &y, 1) == UINFER_OK);
  uinfer_seq_snapshot snap{};
  REQUIRE(uinfer_seq_snapshot_get(seq, &snap) == UINFER_OK);
  CHECK(snap.t == 2);
  CHECK(snap.log_m == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(snap.p_t == doctest::Approx(std::exp(-2.0)).epsilon(1e-12));

  int stop = -1;
  REQUIRE(uinfer_seq_should_stop(seq, 0.2, &stop) == UINFER_OK);
  CHECK(stop == 1);  // log(1/0.2) ~ 1.61 < 2
  REQUIRE(uinfer_seq_should_stop(seq, 0.05, &stop) == UINFER_OK);
  CHECK(stop == 0);

  int contains = -1;
  REQUIRE(uinfer_seq_confseq_contains(seq, mu0, 1, 0.1, &contains) ==
          UINFER_OK);
  CHECK(contains >= 0);
  uinfer_seq_free(seq);
  uinfer_seq_free(nullptr);  // harmless on null
}

TEST_CASE("sieve selection through the C API") {
  uinfer_family_spec m2{};
  m2.family = UINFER_FAMILY_MIXTURE;
  m2.k = 2;
  m2.fixed_sigma = 1;
  m2.sigma = 1.0;
  const double packed[] = {0.5, 0.5, -2.5, 2.5, 1.0, 1.0};
  Owned ds;
  REQUIRE(uinfer_sample(&m2, packed, 6, 600, 9, &ds.d) == UINFER_OK);
  uinfer_split_spec sp = first_half();
  uinfer_sieve_result res{};
  double stats[3] = {0};
  std::size_t n_stats = 0;
  REQUIRE(uinfer_sieve_mixture(ds.d, &sp, 0.1, 3, 1, 1.0, nullptr, &res,
                               stats, &n_stats) == UINFER_OK);
  CHECK(res.j_hat == 2);
  CHECK(n_stats == res.levels_tested);
  // outputs are optional
  REQUIRE(uinfer_sieve_mixture(ds.d, &sp, 0.1, 3, 1, 1.0, nullptr, &res,
                               nullptr, nullptr) == UINFER_OK);
}

TEST_CASE("simulation wrappers mirror the C++ reports") {
  uinfer_type1_config cfg{};
  cfg.family = "gaussian";
  cfg.variant = "split";
  cfg.n = 40;
  cfg.alpha = 0.1;
  cfg.reps = 150;
  cfg.seed = 21;
  cfg.threads = 1;
  uinfer_rate_report rr{};
  REQUIRE(uinfer_sim_type1(&cfg, &rr) == UINFER_OK);
  CHECK(rr.reps == 150);
  CHECK(rr.rate >= 0.0);
  CHECK(rr.rate <= 1.0);

  cfg.variant = "warp";
  CHECK(uinfer_sim_type1(&cfg, &rr) == UINFER_ERR_INVALID);

  uinfer_rate_report cov{};
  REQUIRE(uinfer_sim_coverage("gaussian", 40, 0.1, 150, 0.5, 3, 1, &cov) ==
          UINFER_OK);
  CHECK(cov.rate > 0.5);

  uinfer_radius_report rad{};
  REQUIRE(uinfer_sim_radius(2, 20, 0.1, 200, 5, 1, &rad) == UINFER_OK);
  CHECK(rad.d == 2);
  CHECK(rad.n == 40);
  CHECK(rad.emp_mean_r2 > 0.0);

  uinfer_seq_sim_report seqr{};
  REQUIRE(uinfer_sim_seq(50, 0.1, 100, 0.0, 0.0, 1, 4, 1, &seqr) == UINFER_OK);
  CHECK(seqr.horizon == 50);
  CHECK(seqr.crossing_rate <= 0.2);

  // power: default grid needs a 13-slot buffer; short buffers report the need
  std::vector<uinfer_power_point> pts(13);
  std::size_t len = 0;
  REQUIRE(uinfer_sim_power(nullptr, 0, 30, 0.1, 2, 100, 0, 6, 1, pts.data(), 2,
                           &len) == UINFER_ERR_INVALID);
  CHECK(len == 13);
  REQUIRE(uinfer_sim_power(nullptr, 0, 30, 0.1, 2, 100, 0, 6, 1, pts.data(),
                           pts.size(), &len) == UINFER_OK);
  CHECK(len == 13);
  CHECK(pts[12].mu == doctest::Approx(3.0));
}

TEST_CASE("chi-square quantile is exported") {
  double x = 0.0;
  REQUIRE(uinfer_chi_square_quantile(0.9, 10.0, &x) == UINFER_OK);
  CHECK(x == doctest::Approx(15.9871791721053).epsilon(1e-9));
  CHECK(uinfer_chi_square_quantile(1.2, 10.0, &x) == UINFER_ERR_INVALID);
}

TEST_CASE("em options default filler") {
  uinfer_em_options em{};
  uinfer_em_defaults(&em);
  CHECK(em.restarts == 10);
  CHECK(em.tol == 1e-8);
  CHECK(em.max_iter == 500);
}
