// Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any fail.
#include <sys/wait.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <ccep/estimator.hpp>
#include <ccep/matops.hpp>
#include <ccep/montecarlo.hpp>
#include <ccep/serialize.hpp>
#include <ccep/variance.hpp>

#include "../support/oracles.hpp"

namespace fs = std::filesystem;
using namespace ccep;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

Matrix random_full_rank(std::mt19937_64& rng, Index rows, Index cols) {
  std::normal_distribution<double> z;
  Matrix d(rows, cols);
  for (Index j = 0; j < cols; ++j)
    for (Index i = 0; i < rows; ++i) d(i, j) = z(rng);
  return d;
}

EstimatorSpec spec_of(const std::string& proxy, DeterministicSpec det = {}) {
  return {parse_proxy_list(proxy), std::move(det)};
}

McConfig mc(const std::string& dgp, std::vector<std::string> presets, Index units, Index reps, std::uint64_t seed) {
  McConfig c;
  c.dgp = preset(dgp);
  for (const auto& p : presets) c.estimators.push_back({p, {preset_proxy(parse_preset(p)), {}}});
  c.units = units;
  c.reps = reps;
  c.master_seed = seed;
  return c;
}

// Invariance instances: N = 60, T = 8, k = 3.
Outcome beta_invariance() {
  std::mt19937_64 rng(101);
  std::uniform_int_distribution<int> r_draw(1, 3);
  const char* proxies[] = {"mean_x", "const,mean_x", "mean_x,mean_y", "trend:1,mean_x"};
  double worst = 0.0;
  int fits = 0;
  for (int rep = 0; rep < 200; ++rep) {
    const auto ds = oracle::random_panel(rng, 60, 8, 3);
    const Matrix d = random_full_rank(rng, 8, r_draw(rng));
    for (const char* proxy : proxies) {
      const auto bare = ccep_fit(ds, spec_of(proxy));
      const auto with_d = ccep_fit(ds, spec_of(proxy, DeterministicSpec::explicit_matrix(d)));
      worst = std::max(worst, oracle::max_abs(with_d.beta - bare.beta) / oracle::max_abs(bare.beta));
      // Long regression with D and unit-specific proxy coefficients, solved by SVD.
      const Vector joint = oracle::joint_regression(ds, bare.proxy.psi_hat, d);
      worst = std::max(worst, oracle::max_abs(joint.head(3) - bare.beta) / oracle::max_abs(bare.beta));
      ++fits;
    }
  }
  return {worst <= 1e-10, std::to_string(fits) + " (dataset, D, proxy) cases, max relative gap " + fmt(worst) +
                              " (tol 1e-10)"};
}

Outcome alpha_zero() {
  std::mt19937_64 rng(101);
  std::uniform_int_distribution<int> r_draw(1, 3);
  double lib = 0.0, joint_worst = 0.0;
  for (int rep = 0; rep < 200; ++rep) {
    const auto ds = oracle::random_panel(rng, 60, 8, 3);
    (void)random_full_rank(rng, 8, r_draw(rng));  // keep the instance stream aligned with criterion 1
    const auto fit = ccep_fit(ds, spec_of("mean_x,mean_y", DeterministicSpec::time_dummies()));
    lib = std::max(lib, oracle::max_abs(fit.alpha));
    const Vector joint = oracle::partialled_joint(ds, fit.proxy.psi_hat, fit.d);
    joint_worst = std::max(joint_worst, oracle::max_abs(joint.tail(fit.d.cols())));
  }
  const double worst = std::max(lib, joint_worst);
  return {worst <= 1e-10, "200 datasets, time dummies: max |alpha| " + fmt(lib) + " (fit), " + fmt(joint_worst) +
                              " (joint partialled-regression oracle) (tol 1e-10)"};
}

Outcome oracle_equivalences() {
  std::mt19937_64 rng(202);
  double within = 0.0, detrend = 0.0, direct = 0.0, two_step = 0.0;
  for (int rep = 0; rep < 100; ++rep) {
    const auto ds = oracle::random_panel(rng, 60, 8, 3);
    within = std::max(within, oracle::rel_diff(ccep_fit(ds, spec_of("const")).beta, oracle::within(ds)));
    detrend = std::max(detrend,
                       oracle::rel_diff(ccep_fit(ds, spec_of("const,trend:1")).beta, oracle::detrend_estimator(ds)));
    const Vector b = ccep_fit(ds, spec_of("mean_x")).beta;
    const Matrix xb = oracle::x_bar(ds);
    const Vector d = oracle::direct_formula(ds, xb);
    direct = std::max(direct, oracle::rel_diff(b, d));
    two_step = std::max(two_step, std::max(oracle::rel_diff(oracle::two_step(ds, xb), d), oracle::rel_diff(b, oracle::two_step(ds, xb))));
  }
  const bool ok = within <= 1e-10 && detrend <= 1e-10 && direct <= 1e-10 && two_step <= 1e-10;
  return {ok, "100 instances: within " + fmt(within) + ", detrend " + fmt(detrend) + ", direct " + fmt(direct) +
                  ", two-step " + fmt(two_step) + " (tol 1e-10)"};
}

Outcome projector_numerics() {
  std::mt19937_64 rng(303);
  double sym = 0.0, idem = 0.0, annih = 0.0, fd_gap = 0.0;
  bool commutation = true;
  for (int rep = 0; rep < 50; ++rep) {
    const Matrix psi = random_full_rank(rng, 8, 1 + rep % 5);
    const Matrix m = residual_maker(psi);
    sym = std::max(sym, oracle::max_abs(m - m.transpose()));
    idem = std::max(idem, oracle::max_abs(m * m - m));
    annih = std::max(annih, oracle::max_abs(m * psi));
  }
  for (int rep = 0; rep < 20; ++rep) {
    const Matrix psi = random_full_rank(rng, 4, 2);
    ProxySpec spec;
    for (Index j = 0; j < 2; ++j) spec.columns.push_back(ProxyColumn::deterministic(psi.col(j), "c"));
    const std::vector<Vector> ys(2, Vector::Zero(4));
    const std::vector<Matrix> xs(2, Matrix::Zero(4, 1));
    const Matrix j = jacobian_correction(build_proxy(PanelDataset::from_units(ys, xs), spec));
    const double h = 1e-6;
    for (Index e = 0; e < 8; ++e) {
      Matrix up = psi, down = psi;
      up(e % 4, e / 4) += h;
      down(e % 4, e / 4) -= h;
      const Vector fd = (vec(oracle::annihilator_inverse(up)) - vec(oracle::annihilator_inverse(down))) / (2 * h);
      fd_gap = std::max(fd_gap, oracle::max_abs(fd + j.col(e)));
    }
  }
  for (Index t = 1; t <= 8; ++t) {
    const Matrix k = commutation_matrix(t);
    commutation = commutation && identical(k, oracle::commutation_loops(t));
    for (int rep = 0; rep < 5; ++rep) {
      const Matrix a = random_full_rank(rng, t, t);
      commutation = commutation && identical(Vector(k * vec(a)), vec(a.transpose()));
    }
  }
  const bool ok = sym <= 1e-10 && idem <= 1e-10 && annih <= 1e-10 && fd_gap <= 1e-5 && commutation;
  return {ok, "M symmetric " + fmt(sym) + ", idempotent " + fmt(idem) + ", annihilating " + fmt(annih) +
                  " (tol 1e-10); central differences vs -J " + fmt(fd_gap) + " (tol 1e-5); K vec(A) = vec(A') " +
                  (commutation ? "exact" : "NOT exact")};
}

Outcome consistency() {
  const auto small = run(mc("bsw-correlated-loadings", {"CCEP_X"}, 500, 1000, 505));
  const auto large = run(mc("bsw-correlated-loadings", {"CCEP_X"}, 2000, 1000, 506));
  const auto d = rate_check(small, large, "CCEP_X");
  bool ok = true;
  std::string per;
  for (Index j = 0; j < d.ratio.size(); ++j) {
    ok = ok && d.ratio(j) >= 1.5 && d.ratio(j) <= 2.7;
    per += (j ? ", " : "") + fmt(d.ratio(j));
  }
  return {ok, "RMSE(N=500)/RMSE(N=2000) per coefficient [" + per + "], pooled " + fmt(d.overall) +
                  " (window [1.5, 2.7], target " + fmt(d.expected) + ")"};
}

McReport coverage_report() {
  static const McReport report = run(mc("bsw-correlated-loadings", {"CCEP_X"}, 1000, 2000, 606));
  return report;
}

Outcome coverage() {
  const auto rep = coverage_report();
  const auto& s = rep.estimator("CCEP_X");
  bool ok = rep.periods == 6 && rep.truth.size() == 2 && s.reps_used == 2000;
  std::string per;
  for (std::size_t j = 0; j < s.coefficients.size(); ++j) {
    const auto& c = s.coefficients[j];
    ok = ok && c.coverage_corrected >= 0.93 && c.coverage_corrected <= 0.97;
    per += (j ? ", " : "") + fmt(c.coverage_corrected) + " (mc se " + fmt(c.coverage_mc_se_corrected) + ")";
  }
  return {ok, "N=1000, T=6, k=2, reps=2000: corrected coverage [" + per + "] (window [0.93, 0.97])"};
}

Outcome random_slopes() {
  const auto sat = run(mc("random-slopes-a6-satisfied", {"CCEP_X_PLUS_INTERCEPT"}, 2000, 1000, 707));
  const auto vio = run(mc("random-slopes-a6-violated", {"CCEP_X_PLUS_INTERCEPT"}, 2000, 1000, 708));
  const auto& s = sat.estimator("CCEP_X_PLUS_INTERCEPT");
  const auto& v = vio.estimator("CCEP_X_PLUS_INTERCEPT");
  double sat_worst = 0.0, vio_best = 0.0;
  for (const auto& c : s.coefficients) sat_worst = std::max(sat_worst, std::abs(c.mean_bias) / c.bias_mc_se);
  for (const auto& c : v.coefficients) vio_best = std::max(vio_best, std::abs(c.mean_bias) / c.bias_mc_se);
  return {sat_worst < 3.0 && vio_best > 5.0, "N=2000, reps=1000: satisfied max |bias|/mc se " + fmt(sat_worst) +
                                                  " (< 3); violated " + fmt(vio_best) + " (> 5)"};
}

Outcome se_equivalence() {
  const auto re = run(mc("re-style", {"CCEP_X"}, 1000, 1000, 808));
  const auto& r = re.estimator("CCEP_X");
  bool re_ok = true;
  std::string per;
  for (std::size_t j = 0; j < r.coefficients.size(); ++j) {
    const double ratio = r.coefficients[j].mean_corrected_over_naive;
    re_ok = re_ok && ratio >= 0.95 && ratio <= 1.05;
    per += (j ? ", " : "") + fmt(ratio);
  }
  const auto& c = coverage_report().estimator("CCEP_X");
  bool corr_ok = true;
  std::string cper;
  for (std::size_t j = 0; j < c.coefficients.size(); ++j) {
    const auto& k = c.coefficients[j];
    const bool differ = k.mean_corrected_over_naive < 0.95 || k.mean_corrected_over_naive > 1.05;
    const bool corrected_in = k.coverage_corrected >= 0.93 && k.coverage_corrected <= 0.97;
    const bool naive_out = k.coverage_naive < 0.93 || k.coverage_naive > 0.97;
    corr_ok = corr_ok && differ && corrected_in && naive_out;
    cper += (j ? "; " : "") + std::string("ratio ") + fmt(k.mean_corrected_over_naive) + ", coverage " +
            fmt(k.coverage_corrected) + " vs naive " + fmt(k.coverage_naive);
  }
  return {re_ok && corr_ok, "re-style corrected/naive se [" + per + "] (window [0.95, 1.05]); correlated loadings [" +
                                cper + "]"};
}

Outcome efficiency() {
  auto c = mc("ideal-homoskedastic", {"CCEP_X", "CCEP_XY"}, 500, 2000, 909);
  c.efficiency = EfficiencyPair{"CCEP_X", "CCEP_XY"};
  const auto rep = run(c);
  const auto& e = *rep.efficiency;
  return {e.min_eigenvalue >= -3.0 * e.mc_se, "reps=2000, N=500: min eig of Var(CCEP_XY) - Var(CCEP_X) " +
                                                   fmt(e.min_eigenvalue) + " vs -3 mc se " + fmt(-3.0 * e.mc_se)};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int shell(const std::string& cmd) {
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

Outcome determinism(const std::string& cli) {
  const fs::path dir = fs::temp_directory_path() / "ccep_acceptance";
  fs::create_directories(dir);
  const std::string bin = "\"" + cli + "\"";
  const std::string data = (dir / "panel.csv").string();
  std::vector<std::string> mismatches;
  int runs = 0;

  auto compare = [&](const std::string& name, const std::string& args, const std::vector<std::string>& files) {
    std::vector<std::string> first;
    for (const char* jobs : {"1", "4", "1", "2"}) {
      const std::string out = (dir / (name + "_" + std::to_string(runs) + ".out")).string();
      const int code = shell(bin + " " + args + " --jobs " + jobs + " > " + out + " 2>/dev/null");
      ++runs;
      std::vector<std::string> got{std::to_string(code), slurp(out)};
      for (const auto& f : files) got.push_back(slurp(f));
      if (code != 0) mismatches.push_back(name + " exit " + std::to_string(code));
      if (first.empty()) {
        first = got;
      } else if (got != first) {
        mismatches.push_back(name + " --jobs " + jobs);
      }
    }
  };

  compare("simulate", "simulate --preset bsw-correlated-loadings --units 1500 --seed 42 --out " + data,
          {data, data + ".truth.json"});
  compare("estimate", "estimate --data " + data + " --proxy const,mean_x,mean_y --det time_dummies", {});
  compare("compare", "compare --data " + data + " --spec CCEP_X --spec CCEP_XY --spec 'proxy=mean_x;det=trend:1'", {});
  compare("mc", "mc --preset ideal-homoskedastic --units 600 --reps 40 --seed 7 --estimator CCEP_X --estimator CCEP_XY "
                "--efficiency CCEP_X,CCEP_XY --reps-csv " + (dir / "reps.csv").string(),
          {(dir / "reps.csv").string()});

  // Library-level check on a larger study.
  auto c = mc("bsw-correlated-loadings", {"CCEP_X", "CCEP_XY"}, 800, 60, 3);
  c.keep_replications = true;
  c.workers = 1;
  const std::string one = Json(run(c)).dump();
  c.workers = 4;
  if (Json(run(c)).dump() != one) mismatches.push_back("library mc workers 1 vs 4");

  std::string detail = std::to_string(runs) + " CLI runs over estimate/simulate/mc/compare with --jobs 1,4,1,2";
  for (const auto& m : mismatches) detail += "; differs: " + m;
  return {mismatches.empty(), detail + (mismatches.empty() ? "; all byte-identical" : "")};
}

}  // namespace

int main(int argc, char** argv) {
  const std::string cli = argc > 1 ? argv[1] : CCEP_CLI_PATH;
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"1 beta invariant to D with mean_x proxies", beta_invariance},
      {"2 alpha zero with mean_x and mean_y proxies", alpha_zero},
      {"3 within / detrend / direct / two-step oracles", oracle_equivalences},
      {"4 projector and Jacobian numerics", projector_numerics},
      {"5 root-N consistency", consistency},
      {"6 corrected CI coverage", coverage},
      {"7 random slopes bias", random_slopes},
      {"8 corrected vs naive standard errors", se_equivalence},
      {"9 efficiency of CCEP_X over CCEP_XY", efficiency},
      {"10 determinism across runs and --jobs", [&] { return determinism(cli); }},
  };
  int failed = 0;
  for (const auto& [name, check] : criteria) {
    Outcome o;
    try {
      o = check();
    } catch (const std::exception& e) {
      o = {false, std::string("threw: ") + e.what()};
    }
    if (!o.pass) ++failed;
    std::cout << (o.pass ? "PASS " : "FAIL ") << name << ": " << o.detail << std::endl;
  }
  std::cout << (failed == 0 ? "all criteria passed" : std::to_string(failed) + " criteria failed") << std::endl;
  return failed == 0 ? 0 : 1;
}
