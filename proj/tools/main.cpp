// Command line front end. Everything statistical goes through the C API in
// uinfer/uinfer.h. Exit codes: 0 success, 2 invalid input (bad flags, bad
// CSV, alpha out of range), 1 runtime failure.

#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "uinfer/uinfer.h"

namespace {

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

int exit_code_for(int status) {
  if (status == UINFER_OK) return 0;
  if (status == UINFER_ERR_INVALID || status == UINFER_ERR_UNSUPPORTED) return 2;
  return 1;
}

[[noreturn]] void die_status(int status) {
  std::fprintf(stderr, "error: %s\n", uinfer_last_error());
  std::exit(exit_code_for(status));
}

[[noreturn]] void die(const std::string& msg, int code) {
  std::fprintf(stderr, "error: %s\n", msg.c_str());
  std::exit(code);
}

void check(int status) {
  if (status != UINFER_OK) die_status(status);
}

void emit(const std::string& text, const std::string& out_path) {
  if (out_path.empty() || out_path == "-") {
    std::fwrite(text.data(), 1, text.size(), stdout);
    return;
  }
  std::ofstream f(out_path, std::ios::binary);
  if (!f) die("cannot open output file: " + out_path, 2);
  f.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!f) die("cannot write output file: " + out_path, 1);
}

std::vector<double> parse_double_list(const std::string& s, const char* what) {
  std::vector<double> out;
  std::size_t pos = 0;
  while (pos <= s.size()) {
    std::size_t comma = s.find(',', pos);
    std::string tok = s.substr(pos, comma == std::string::npos ? std::string::npos
                                                               : comma - pos);
    std::size_t a = tok.find_first_not_of(" \t");
    std::size_t b = tok.find_last_not_of(" \t");
    if (a == std::string::npos) die(std::string(what) + ": empty entry", 2);
    tok = tok.substr(a, b - a + 1);
    char* end = nullptr;
    double v = std::strtod(tok.c_str(), &end);
    if (end != tok.c_str() + tok.size()) {
      die(std::string(what) + ": cannot parse '" + tok + "'", 2);
    }
    out.push_back(v);
    if (comma == std::string::npos) break;
    pos = comma + 1;
  }
  if (out.empty()) die(std::string(what) + " is empty", 2);
  return out;
}

struct DatasetHandle {
  uinfer_dataset* d = nullptr;
  ~DatasetHandle() { uinfer_dataset_free(d); }
  DatasetHandle() = default;
  DatasetHandle(const DatasetHandle&) = delete;
  DatasetHandle& operator=(const DatasetHandle&) = delete;
};

struct SeqHandle {
  uinfer_seq* s = nullptr;
  ~SeqHandle() { uinfer_seq_free(s); }
  SeqHandle() = default;
  SeqHandle(const SeqHandle&) = delete;
  SeqHandle& operator=(const SeqHandle&) = delete;
};

unsigned resolve_threads(long long flag_value) {
  if (flag_value >= 0) return static_cast<unsigned>(flag_value);
  if (const char* env = std::getenv("UINFER_THREADS")) {
    char* end = nullptr;
    unsigned long v = std::strtoul(env, &end, 10);
    if (*env != '\0' && end != nullptr && *end == '\0') {
      return static_cast<unsigned>(v);
    }
    die("UINFER_THREADS must be a nonnegative integer", 2);
  }
  return 1;
}

// ---- shared option bundles ----

struct FamilyOpts {
  std::string family = "gaussian";
  std::size_t k = 2;
  std::size_t dim = 1;
  double sigma = 1.0;
  bool fixed_sigma = false;

  void add_to(CLI::App* cmd) {
    cmd->add_option("--family", family,
                    "family: gaussian, gaussian-unknown-var, mixture, uniform, mvn")
        ->capture_default_str();
    cmd->add_option("--k", k, "mixture component count")->capture_default_str();
    cmd->add_option("--dim", dim, "mvn observation dimension")
        ->capture_default_str();
    cmd->add_option("--sigma", sigma,
                    "known scale for gaussian; component scale when fixed")
        ->capture_default_str();
    cmd->add_flag("--fixed-sigma", fixed_sigma,
                  "freeze all mixture component scales at --sigma");
  }

  uinfer_family_spec spec() const {
    uinfer_family_spec s{};
    if (family == "gaussian") {
      s.family = UINFER_FAMILY_GAUSSIAN;
    } else if (family == "gaussian-unknown-var") {
      s.family = UINFER_FAMILY_GAUSSIAN_UNKNOWN_VAR;
    } else if (family == "mixture") {
      s.family = UINFER_FAMILY_MIXTURE;
    } else if (family == "uniform") {
      s.family = UINFER_FAMILY_UNIFORM_SCALE;
    } else if (family == "mvn") {
      s.family = UINFER_FAMILY_MVN_IDENTITY;
    } else {
      die("unknown family: " + family, 2);
    }
    s.k = k;
    s.dim = dim;
    s.sigma = sigma;
    s.fixed_sigma = fixed_sigma ? 1 : 0;
    return s;
  }
};

struct NullOpts {
  std::string point_str;
  std::optional<double> mean_at_most;
  std::optional<std::size_t> components;
  std::optional<double> fixed_mean;
  std::vector<double> point;  // storage backing the spec

  void add_to(CLI::App* cmd) {
    cmd->add_option("--null-point", point_str,
                    "simple null: packed parameter, comma separated");
    cmd->add_option("--null-mean-at-most", mean_at_most,
                    "composite null: mean <= bound");
    cmd->add_option("--null-components", components,
                    "composite null: mixture with at most k components");
    cmd->add_option("--null-fixed-mean", fixed_mean,
                    "profile null: mean pinned, scale free");
  }

  uinfer_null_spec spec() {
    int given = (!point_str.empty() ? 1 : 0) + (mean_at_most ? 1 : 0) +
                (components ? 1 : 0) + (fixed_mean ? 1 : 0);
    if (given > 1) die("choose exactly one null constraint", 2);
    uinfer_null_spec n{};
    n.kind = UINFER_NULL_FULL;
    if (!point_str.empty()) {
      point = parse_double_list(point_str, "--null-point");
      n.kind = UINFER_NULL_FIXED_POINT;
      n.point = point.data();
      n.point_len = point.size();
    } else if (mean_at_most) {
      n.kind = UINFER_NULL_MEAN_AT_MOST;
      n.bound = *mean_at_most;
    } else if (components) {
      n.kind = UINFER_NULL_COMPONENTS;
      n.k = *components;
    } else if (fixed_mean) {
      n.kind = UINFER_NULL_FIXED_MEAN;
      n.psi = *fixed_mean;
    }
    return n;
  }

  uinfer_null_spec required_spec() {
    uinfer_null_spec n = spec();
    if (n.kind == UINFER_NULL_FULL) {
      die("a null constraint is required (--null-point, --null-mean-at-most, "
          "--null-components or --null-fixed-mean)",
          2);
    }
    return n;
  }
};

struct SplitOpts {
  std::string mode = "seeded";
  std::uint64_t seed = 0;

  void add_to(CLI::App* cmd) {
    cmd->add_option("--split", mode, "data split: seeded or first-half")
        ->capture_default_str();
    cmd->add_option("--split-seed", seed, "seed for the random split")
        ->capture_default_str();
  }

  uinfer_split_spec spec() const {
    if (mode == "first-half") return {UINFER_SPLIT_FIRST_HALF, 0};
    if (mode == "seeded") return {UINFER_SPLIT_SEEDED, seed};
    die("unknown split mode: " + mode, 2);
  }
};

struct SchemeOpts {
  std::string scheme = "single";
  std::size_t folds = 5;
  std::size_t draws = 10;
  std::uint64_t seed = 0;

  void add_to(CLI::App* cmd) {
    cmd->add_option("--scheme", scheme,
                    "averaging scheme: single, crossfit, kfold, subsample")
        ->capture_default_str();
    cmd->add_option("--folds", folds, "folds for kfold and subsample")
        ->capture_default_str();
    cmd->add_option("--draws", draws, "partitions drawn for subsample")
        ->capture_default_str();
    cmd->add_option("--scheme-seed", seed, "seed for subsample partitions")
        ->capture_default_str();
  }

  uinfer_scheme spec() const {
    uinfer_scheme s{};
    if (scheme == "single") {
      s.kind = UINFER_SCHEME_SINGLE;
    } else if (scheme == "crossfit") {
      s.kind = UINFER_SCHEME_CROSSFIT;
    } else if (scheme == "kfold") {
      s.kind = UINFER_SCHEME_KFOLD;
    } else if (scheme == "subsample") {
      s.kind = UINFER_SCHEME_SUBSAMPLE;
    } else {
      die("unknown scheme: " + scheme, 2);
    }
    s.folds = folds;
    s.draws = draws;
    s.seed = seed;
    return s;
  }
};

struct EmOpts {
  uinfer_em_options em{};

  EmOpts() { uinfer_em_defaults(&em); }

  void add_to(CLI::App* cmd) {
    cmd->add_option("--em-restarts", em.restarts, "EM restarts")
        ->capture_default_str();
    cmd->add_option("--em-tol", em.tol, "EM log-likelihood gain tolerance")
        ->capture_default_str();
    cmd->add_option("--em-max-iter", em.max_iter, "EM iteration cap")
        ->capture_default_str();
    cmd->add_option("--em-seed", em.seed, "EM restart seed")
        ->capture_default_str();
  }
};

// ---- subcommands ----

struct TestCmd {
  bool crossfit = false;
  std::string data;
  double alpha = 0.1;
  std::string out = "-";
  FamilyOpts fam;
  NullOpts null_c;
  SplitOpts split;
  EmOpts em;

  void add_to(CLI::App* cmd) {
    cmd->add_option("--data", data, "input CSV with header y1,...,yd")
        ->required();
    cmd->add_option("--alpha", alpha, "test level")->capture_default_str();
    cmd->add_option("--out", out, "output path, - for stdout")
        ->capture_default_str();
    fam.add_to(cmd);
    null_c.add_to(cmd);
    split.add_to(cmd);
    em.add_to(cmd);
  }

  void run() {
    DatasetHandle ds;
    check(uinfer_dataset_read_csv(data.c_str(), &ds.d));
    uinfer_family_spec fs = fam.spec();
    uinfer_null_spec ns = null_c.required_spec();
    uinfer_split_spec sp = split.spec();
    uinfer_test_outcome o{};
    if (crossfit) {
      check(uinfer_crossfit_lrt(&fs, ds.d, &sp, &ns, alpha, &em.em, &o));
    } else {
      check(uinfer_split_lrt(&fs, ds.d, &sp, &ns, alpha, &em.em, &o));
    }
    std::string text = "log_statistic,log_threshold,reject,p_bound\n";
    text += fmt(o.log_statistic) + "," + fmt(o.log_threshold) + "," +
            (o.reject ? "1" : "0") + "," + fmt(o.p_bound) + "\n";
    emit(text, out);
  }
};

struct ConfsetCmd {
  std::string data;
  double alpha = 0.1;
  std::string out = "-";
  double grid_lo = 0.0;
  double grid_hi = 0.0;
  std::size_t grid_points = 0;
  FamilyOpts fam;
  SplitOpts split;
  SchemeOpts scheme;
  EmOpts em;

  void add_to(CLI::App* cmd) {
    cmd->add_option("--data", data, "input CSV with header y1,...,yd")
        ->required();
    cmd->add_option("--alpha", alpha, "coverage level is 1 - alpha")
        ->capture_default_str();
    cmd->add_option("--out", out, "output path, - for stdout")
        ->capture_default_str();
    cmd->add_option("--grid-lo", grid_lo, "grid mode: lowest point");
    cmd->add_option("--grid-hi", grid_hi, "grid mode: highest point");
    cmd->add_option("--grid-points", grid_points,
                    "grid mode: point count (0 = boundary interval mode)")
        ->capture_default_str();
    fam.add_to(cmd);
    split.add_to(cmd);
    scheme.add_to(cmd);
    em.add_to(cmd);
  }

  void run() {
    DatasetHandle ds;
    check(uinfer_dataset_read_csv(data.c_str(), &ds.d));
    uinfer_family_spec fs = fam.spec();
    uinfer_split_spec sp = split.spec();
    uinfer_scheme sc = scheme.spec();
    std::string text;
    if (fs.family == UINFER_FAMILY_GAUSSIAN_UNKNOWN_VAR) {
      if (grid_points > 0) {
        die("grid output is not supported for the profile interval", 2);
      }
      uinfer_interval iv{};
      check(uinfer_profile_interval(&fs, ds.d, &sp, alpha, &iv));
      text = "lo,hi\n" + fmt(iv.lo) + "," + fmt(iv.hi) + "\n";
    } else if (grid_points > 0) {
      std::vector<int> flags(grid_points, 0);
      check(uinfer_confset_grid(&fs, ds.d, &sp, &sc, alpha, &em.em, grid_lo,
                                grid_hi, grid_points, flags.data()));
      text = "theta,contained\n";
      for (std::size_t i = 0; i < grid_points; ++i) {
        double theta =
            grid_lo + (grid_hi - grid_lo) * static_cast<double>(i) /
                          static_cast<double>(grid_points - 1);
        text += fmt(theta) + "," + (flags[i] ? "1" : "0") + "\n";
      }
    } else {
      uinfer_interval iv{};
      check(uinfer_confset_interval(&fs, ds.d, &sp, &sc, alpha, &em.em, &iv));
      text = "lo,hi\n" + fmt(iv.lo) + "," + fmt(iv.hi) + "\n";
    }
    emit(text, out);
  }
};

struct IntervalUniformCmd {
  std::string data;
  double alpha = 0.1;
  std::string out = "-";
  SplitOpts split;

  void add_to(CLI::App* cmd) {
    cmd->add_option("--data", data, "input CSV with header y1")->required();
    cmd->add_option("--alpha", alpha, "coverage level is 1 - alpha")
        ->capture_default_str();
    cmd->add_option("--out", out, "output path, - for stdout")
        ->capture_default_str();
    split.add_to(cmd);
  }

  void run() {
    DatasetHandle ds;
    check(uinfer_dataset_read_csv(data.c_str(), &ds.d));
    uinfer_split_spec sp = split.spec();
    uinfer_interval plain{}, support{}, classical{};
    check(uinfer_uniform_intervals(ds.d, &sp, alpha, &plain, &support,
                                   &classical));
    std::string text = "form,lo,hi\n";
    text += "crossfit," + fmt(plain.lo) + "," + fmt(plain.hi) + "\n";
    text += "crossfit_support," + fmt(support.lo) + "," + fmt(support.hi) + "\n";
    text += "classical," + fmt(classical.lo) + "," + fmt(classical.hi) + "\n";
    emit(text, out);
  }
};

struct SeqMonitorCmd {
  std::string data;
  std::string init_param;
  std::size_t t0 = 1;
  std::string out = "-";
  FamilyOpts fam;
  NullOpts null_c;
  EmOpts em;

  void add_to(CLI::App* cmd) {
    cmd->add_option("--data", data, "stream CSV, rows in arrival order")
        ->required();
    cmd->add_option("--init-param", init_param,
                    "packed plug-in before any data (default: the null point)");
    cmd->add_option("--t0", t0, "burn-in horizon")->capture_default_str();
    cmd->add_option("--out", out, "output path, - for stdout")
        ->capture_default_str();
    fam.add_to(cmd);
    null_c.add_to(cmd);
    em.add_to(cmd);
  }

  void run() {
    DatasetHandle ds;
    check(uinfer_dataset_read_csv(data.c_str(), &ds.d));
    uinfer_family_spec fs = fam.spec();
    uinfer_null_spec ns = null_c.required_spec();
    std::vector<double> theta1;
    if (!init_param.empty()) {
      theta1 = parse_double_list(init_param, "--init-param");
    } else if (ns.kind == UINFER_NULL_FIXED_POINT) {
      theta1.assign(ns.point, ns.point + ns.point_len);
    } else {
      die("--init-param is required unless the null is a fixed point", 2);
    }
    SeqHandle seq;
    check(uinfer_seq_create(&fs, &ns, theta1.data(), theta1.size(), t0,
                            &em.em, &seq.s));
    const std::size_t n = uinfer_dataset_size(ds.d);
    const std::size_t dim = uinfer_dataset_dim(ds.d);
    std::vector<double> row(dim, 0.0);
    std::string text = "t,log_m,p_t,p_bar_t\n";
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < dim; ++j) {
        check(uinfer_dataset_value(ds.d, i, j, &row[j]));
      }
      check(uinfer_seq_update(seq.s, row.data(), dim));
      uinfer_seq_snapshot snap{};
      check(uinfer_seq_snapshot_get(seq.s, &snap));
      text += std::to_string(snap.t) + "," + fmt(snap.log_m) + "," +
              fmt(snap.p_t) + "," + fmt(snap.p_bar_t) + "\n";
    }
    emit(text, out);
  }
};

struct SieveCmd {
  std::string data;
  double alpha = 0.1;
  std::size_t j_max = 3;
  double sigma = 1.0;
  bool fixed_sigma = false;
  std::string out = "-";
  SplitOpts split;
  EmOpts em;

  void add_to(CLI::App* cmd) {
    cmd->add_option("--data", data, "input CSV with header y1")->required();
    cmd->add_option("--alpha", alpha, "per-level test level")
        ->capture_default_str();
    cmd->add_option("--j-max", j_max, "largest candidate order")
        ->capture_default_str();
    cmd->add_option("--sigma", sigma, "component scale when fixed")
        ->capture_default_str();
    cmd->add_flag("--fixed-sigma", fixed_sigma,
                  "freeze all component scales at --sigma");
    cmd->add_option("--out", out, "output path, - for stdout")
        ->capture_default_str();
    split.add_to(cmd);
    em.add_to(cmd);
  }

  void run() {
    DatasetHandle ds;
    check(uinfer_dataset_read_csv(data.c_str(), &ds.d));
    uinfer_split_spec sp = split.spec();
    uinfer_sieve_result res{};
    std::vector<double> stats(j_max, 0.0);
    std::size_t n_stats = 0;
    check(uinfer_sieve_mixture(ds.d, &sp, alpha, j_max, fixed_sigma ? 1 : 0,
                               sigma, &em.em, &res, stats.data(), &n_stats));
    nlohmann::json j;
    j["alpha"] = alpha;
    j["j_hat"] = res.j_hat;
    j["j_max"] = j_max;
    j["levels_tested"] = res.levels_tested;
    j["log_statistics"] = std::vector<double>(stats.begin(),
                                              stats.begin() + n_stats);
    emit(j.dump(2) + "\n", out);
  }
};

struct SimType1Cmd {
  std::string family = "gaussian";
  std::string variant = "split";
  std::size_t n = 100;
  double alpha = 0.1;
  std::size_t reps = 10000;
  double eta = 0.5;
  std::size_t folds = 5;
  std::size_t draws = 10;
  std::uint64_t seed = 1;
  long long threads = -1;
  std::string out = "-";

  void add_to(CLI::App* cmd) {
    cmd->add_option("--family", family,
                    "gaussian, gaussian-bounded-mean, mixture, uniform, or all")
        ->capture_default_str();
    cmd->add_option("--variant", variant,
                    "split, crossfit, kfold, powered, relaxed, subsample, or all")
        ->capture_default_str();
    cmd->add_option("--n", n, "observations per replication")
        ->capture_default_str();
    cmd->add_option("--alpha", alpha, "test level")->capture_default_str();
    cmd->add_option("--reps", reps, "replications")->capture_default_str();
    cmd->add_option("--eta", eta, "power for the powered variant")
        ->capture_default_str();
    cmd->add_option("--folds", folds, "folds for kfold and subsample")
        ->capture_default_str();
    cmd->add_option("--draws", draws, "partitions for subsample")
        ->capture_default_str();
    cmd->add_option("--seed", seed, "master seed")->capture_default_str();
    cmd->add_option("--threads", threads,
                    "worker threads (default: UINFER_THREADS or 1)");
    cmd->add_option("--out", out, "output path, - for stdout")
        ->capture_default_str();
  }

  void run() {
    static const char* kFamilies[] = {"gaussian", "gaussian-bounded-mean",
                                      "mixture", "uniform"};
    static const char* kVariants[] = {"split",   "crossfit", "kfold",
                                      "powered", "relaxed",  "subsample"};
    std::vector<std::string> fams;
    if (family == "all") {
      fams.assign(std::begin(kFamilies), std::end(kFamilies));
    } else {
      fams.push_back(family);
    }
    std::vector<std::string> vars;
    if (variant == "all") {
      vars.assign(std::begin(kVariants), std::end(kVariants));
    } else {
      vars.push_back(variant);
    }
    unsigned nthreads = resolve_threads(threads);
    std::string text = "variant,rate,se\n";
    std::uint64_t cell = 0;
    for (const auto& f : fams) {
      for (const auto& v : vars) {
        uinfer_type1_config cfg{};
        cfg.family = f.c_str();
        cfg.variant = v.c_str();
        cfg.n = n;
        cfg.alpha = alpha;
        cfg.reps = reps;
        cfg.seed = seed ^ (0x9e3779b97f4a7c15ULL * (cell + 1));
        cfg.threads = nthreads;
        cfg.eta = eta;
        cfg.folds = folds;
        cfg.draws = draws;
        uinfer_rate_report r{};
        check(uinfer_sim_type1(&cfg, &r));
        text += f + ":" + v + "," + fmt(r.rate) + "," + fmt(r.se) + "\n";
        ++cell;
      }
    }
    emit(text, out);
  }
};

struct SimPowerCmd {
  std::string mu_grid;
  std::size_t n = 200;
  double alpha = 0.1;
  std::size_t reps = 1000;
  std::size_t boot_b = 200;
  bool no_bootstrap = false;
  std::uint64_t seed = 1;
  long long threads = -1;
  std::string out = "-";

  void add_to(CLI::App* cmd) {
    cmd->add_option("--mu-grid", mu_grid,
                    "comma separated mean separations (default 0,0.25,...,3)");
    cmd->add_option("--n", n, "observations per replication")
        ->capture_default_str();
    cmd->add_option("--alpha", alpha, "test level")->capture_default_str();
    cmd->add_option("--reps", reps, "replications per grid point")
        ->capture_default_str();
    cmd->add_option("--boot-b", boot_b, "bootstrap resamples")
        ->capture_default_str();
    cmd->add_flag("--no-bootstrap", no_bootstrap,
                  "skip the bootstrap comparator");
    cmd->add_option("--seed", seed, "master seed")->capture_default_str();
    cmd->add_option("--threads", threads,
                    "worker threads (default: UINFER_THREADS or 1)");
    cmd->add_option("--out", out, "output path, - for stdout")
        ->capture_default_str();
  }

  void run() {
    std::vector<double> grid;
    if (!mu_grid.empty()) grid = parse_double_list(mu_grid, "--mu-grid");
    std::size_t cap = grid.empty() ? 13 : grid.size();
    std::vector<uinfer_power_point> pts(cap);
    std::size_t len = 0;
    check(uinfer_sim_power(grid.empty() ? nullptr : grid.data(), grid.size(),
                           n, alpha, reps, boot_b, no_bootstrap ? 0 : 1, seed,
                           resolve_threads(threads), pts.data(), pts.size(),
                           &len));
    std::string text = "mu,power_universal,se_u,power_bootstrap,se_b\n";
    for (std::size_t i = 0; i < len; ++i) {
      text += fmt(pts[i].mu) + "," + fmt(pts[i].power_universal) + "," +
              fmt(pts[i].se_u) + "," + fmt(pts[i].power_bootstrap) + "," +
              fmt(pts[i].se_b) + "\n";
    }
    emit(text, out);
  }
};

struct SimRadiusCmd {
  std::size_t d = 10;
  std::size_t m = 50;
  double alpha = 0.1;
  std::size_t reps = 10000;
  std::uint64_t seed = 1;
  long long threads = -1;
  std::string out = "-";

  void add_to(CLI::App* cmd) {
    cmd->add_option("--d", d, "dimension")->capture_default_str();
    cmd->add_option("--m", m, "observations per half")->capture_default_str();
    cmd->add_option("--alpha", alpha, "coverage level is 1 - alpha")
        ->capture_default_str();
    cmd->add_option("--reps", reps, "replications")->capture_default_str();
    cmd->add_option("--seed", seed, "master seed")->capture_default_str();
    cmd->add_option("--threads", threads,
                    "worker threads (default: UINFER_THREADS or 1)");
    cmd->add_option("--out", out, "output path, - for stdout")
        ->capture_default_str();
  }

  void run() {
    uinfer_radius_report r{};
    check(uinfer_sim_radius(d, m, alpha, reps, seed, resolve_threads(threads),
                            &r));
    std::string text = "d,n,alpha,emp_mean_r2,theory_r2,ratio_to_classical\n";
    text += std::to_string(r.d) + "," + std::to_string(r.n) + "," +
            fmt(r.alpha) + "," + fmt(r.emp_mean_r2) + "," + fmt(r.theory_r2) +
            "," + fmt(r.ratio_to_classical) + "\n";
    emit(text, out);
  }
};

struct SimSeqCmd {
  std::size_t horizon = 1000;
  double alpha = 0.1;
  std::size_t reps = 2000;
  double mu_truth = 0.0;
  double mu_null = 0.0;
  std::size_t t0 = 1;
  std::uint64_t seed = 1;
  long long threads = -1;
  std::string out = "-";

  void add_to(CLI::App* cmd) {
    cmd->add_option("--horizon", horizon, "monitoring horizon T")
        ->capture_default_str();
    cmd->add_option("--alpha", alpha, "test level")->capture_default_str();
    cmd->add_option("--reps", reps, "replications")->capture_default_str();
    cmd->add_option("--mu-truth", mu_truth, "data generating mean")
        ->capture_default_str();
    cmd->add_option("--mu-null", mu_null, "simple null mean")
        ->capture_default_str();
    cmd->add_option("--t0", t0, "burn-in horizon")->capture_default_str();
    cmd->add_option("--seed", seed, "master seed")->capture_default_str();
    cmd->add_option("--threads", threads,
                    "worker threads (default: UINFER_THREADS or 1)");
    cmd->add_option("--out", out, "output path, - for stdout")
        ->capture_default_str();
  }

  void run() {
    uinfer_seq_sim_report r{};
    check(uinfer_sim_seq(horizon, alpha, reps, mu_truth, mu_null, t0, seed,
                         resolve_threads(threads), &r));
    std::string text = "T,alpha,crossing_rate,se\n";
    text += std::to_string(r.horizon) + "," + fmt(r.alpha) + "," +
            fmt(r.crossing_rate) + "," + fmt(r.se) + "\n";
    emit(text, out);
  }
};

std::string json_scalar_to_string(const nlohmann::json& v,
                                  const std::string& key) {
  if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
  if (v.is_number_unsigned()) {
    return std::to_string(v.get<unsigned long long>());
  }
  if (v.is_number_integer()) return std::to_string(v.get<long long>());
  if (v.is_number_float()) return fmt(v.get<double>());
  if (v.is_string()) return v.get<std::string>();
  die("config key '" + key + "' must be a scalar", 2);
}

}  // namespace

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);

  CLI::App app{"split-likelihood inference toolkit"};
  app.require_subcommand(1);

  std::string config_path_opt;  // registered for help; handled by pre-scan

  TestCmd test_split;
  TestCmd test_crossfit;
  test_crossfit.crossfit = true;
  ConfsetCmd confset;
  IntervalUniformCmd interval_uniform;
  SeqMonitorCmd seq_monitor;
  SieveCmd sieve;
  SimType1Cmd sim_type1;
  SimPowerCmd sim_power;
  SimRadiusCmd sim_radius;
  SimSeqCmd sim_seq;

  struct Entry {
    const char* name;
    CLI::App* sub;
  };
  std::vector<Entry> entries;

  auto add = [&](const char* name, const char* desc, auto& cmd) {
    CLI::App* sub = app.add_subcommand(name, desc);
    cmd.add_to(sub);
    sub->add_option("--config", config_path_opt,
                    "JSON file with defaults; explicit flags win");
    sub->callback([&cmd] { cmd.run(); });
    entries.push_back({name, sub});
  };

  add("test-split", "split likelihood ratio test on one data split", test_split);
  add("test-crossfit", "crossfit test averaging both split orders",
      test_crossfit);
  add("confset", "confidence set for a scalar parameter", confset);
  add("interval-uniform", "uniform scale intervals, crossfit and classical",
      interval_uniform);
  add("seq-monitor", "sequential monitor: log_M and anytime p per step",
      seq_monitor);
  add("sieve", "mixture order selection by ordered tests", sieve);
  add("sim-type1", "type I error of the split tests under the null", sim_type1);
  add("sim-power", "power curve against a two-component alternative", sim_power);
  add("sim-radius", "confidence set squared radius against theory", sim_radius);
  add("sim-seq", "sequential crossing rate under the null", sim_seq);

  // Config values and repeated flags both resolve to the last occurrence.
  for (auto& e : entries) {
    for (CLI::Option* opt : e.sub->get_options()) {
      opt->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
    }
  }

  // --config is applied by injecting its entries as flags right after the
  // subcommand token, so anything typed explicitly still wins.
  std::string config_path;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) {
      config_path = args[i + 1];
    } else if (args[i].rfind("--config=", 0) == 0) {
      config_path = args[i].substr(9);
    }
  }
  if (!config_path.empty()) {
    std::size_t sub_idx = args.size();
    CLI::App* sub = nullptr;
    for (std::size_t i = 0; i < args.size() && !sub; ++i) {
      for (auto& e : entries) {
        if (args[i] == e.name) {
          sub_idx = i;
          sub = e.sub;
          break;
        }
      }
    }
    if (!sub) die("--config requires a subcommand", 2);
    std::ifstream f(config_path);
    if (!f) die("cannot open config file: " + config_path, 2);
    nlohmann::json cfg;
    try {
      f >> cfg;
    } catch (const std::exception& e) {
      die(std::string("config parse: ") + e.what(), 2);
    }
    if (!cfg.is_object()) die("config must be a JSON object", 2);
    std::vector<std::string> inject;
    for (auto it = cfg.begin(); it != cfg.end(); ++it) {
      const std::string& key = it.key();
      if (!sub->get_option_no_throw("--" + key)) {
        die("config key '" + key + "' is not an option of " +
                std::string(sub->get_name()),
            2);
      }
      inject.push_back("--" + key + "=" + json_scalar_to_string(it.value(), key));
    }
    args.insert(args.begin() + static_cast<std::ptrdiff_t>(sub_idx) + 1,
                inject.begin(), inject.end());
  }

  std::vector<const char*> cargv;
  cargv.push_back("uinfer");
  for (const auto& a : args) cargv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(cargv.size()), cargv.data());
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }
  return 0;
}
