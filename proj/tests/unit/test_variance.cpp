#include <cmath>
#include <random>

#include <boost/math/distributions/normal.hpp>
#include <doctest.h>

#include <ccep/error.hpp>
#include <ccep/estimator.hpp>
#include <ccep/variance.hpp>

#include "../support/oracles.hpp"

using namespace ccep;

namespace {

EstimatorSpec spec_of(const std::string& proxy) { return EstimatorSpec{parse_proxy_list(proxy), {}}; }

ProxyMatrix proxy_from(const Matrix& psi) {
  // Realize through a panel whose only proxy is a deterministic block equal to psi.
  ProxySpec spec;
  for (Index j = 0; j < psi.cols(); ++j) spec.columns.push_back(ProxyColumn::deterministic(psi.col(j), "c"));
  std::vector<Vector> ys(2, Vector::Zero(psi.rows()));
  std::vector<Matrix> xs(2, Matrix::Zero(psi.rows(), 1));
  return build_proxy(PanelDataset::from_units(ys, xs), spec);
}

}  // namespace

TEST_CASE("normal quantile against boost") {
  const boost::math::normal_distribution<double> n01;
  for (double p : {1e-300, 1e-12, 1e-6, 0.001, 0.025, 0.1, 0.3, 0.5, 0.7, 0.9, 0.975, 0.999, 1 - 1e-12}) {
    const double want = boost::math::quantile(n01, p);
    CHECK(normal_quantile(p) == doctest::Approx(want).epsilon(1e-14).scale(1.0));
  }
  CHECK(normal_quantile(0.975) == doctest::Approx(1.959963984540054).epsilon(1e-15));
  CHECK_THROWS_AS(normal_quantile(0.0), Error);
  CHECK_THROWS_AS(normal_quantile(1.0), Error);
}

TEST_CASE("Jacobian at T = 2 with a constant proxy") {
  const Matrix j = jacobian_correction(proxy_from(Matrix::Ones(2, 1)));
  // d vec(P) / d psi_1 and d psi_2 at psi = (1, 1)': P = psi psi' / psi'psi.
  Matrix expect(4, 2);
  expect << 0.5, -0.5, 0, 0, 0, 0, -0.5, 0.5;
  REQUIRE(j.rows() == 4);
  REQUIRE(j.cols() == 2);
  CHECK(oracle::max_abs(j - expect) < 1e-15);
}

TEST_CASE("Jacobian matches its loop definition and finite differences") {
  std::mt19937_64 rng(41);
  std::normal_distribution<double> z;
  for (int rep = 0; rep < 10; ++rep) {
    Matrix psi(4, 2);
    for (Index c = 0; c < 2; ++c)
      for (Index r = 0; r < 4; ++r) psi(r, c) = z(rng);
    const Matrix j = jacobian_correction(proxy_from(psi));
    CHECK(j.rows() == 16);
    CHECK(j.cols() == 8);
    CHECK(oracle::max_abs(j - oracle::jacobian_loops(psi)) < 1e-12);

    const double h = 1e-6;
    Matrix fd(16, 8);
    for (Index e = 0; e < 8; ++e) {
      Matrix up = psi, down = psi;
      up(e % 4, e / 4) += h;
      down(e % 4, e / 4) -= h;
      fd.col(e) = (oracle::vec_loops(oracle::annihilator_inverse(up)) -
                   oracle::vec_loops(oracle::annihilator_inverse(down))) / (2 * h);
    }
    // J is the derivative of vec(P); vec(M) moves the other way.
    CHECK(oracle::max_abs(fd + j) < 1e-5);

    Matrix delta(4, 2);
    for (Index c = 0; c < 2; ++c)
      for (Index r = 0; r < 4; ++r) delta(r, c) = z(rng);
    CHECK((j * vec(delta)).size() == 16);
  }
}

TEST_CASE("G hat matches an entrywise sum") {
  // N = 3, T = 2, k = 1.
  Matrix x1(2, 1), x2(2, 1), x3(2, 1);
  x1 << 1.0, 2.0;
  x2 << -1.0, 0.5;
  x3 << 0.25, 3.0;
  Vector y1(2), y2(2), y3(2);
  y1 << 0.3, 1.1;
  y2 << -0.7, 2.0;
  y3 << 1.5, -0.2;
  const auto small = PanelDataset::from_units({y1, y2, y3}, {x1, x2, x3});
  const auto fit_small = ccep_fit(small, spec_of("const"));
  CHECK(oracle::max_abs(compute_G_hat(small, fit_small) - oracle::g_hat_loops(small, fit_small.residuals)) < 1e-12);

  std::mt19937_64 rng(42);
  const auto ds = oracle::random_panel(rng, 700, 5, 2);
  const auto fit = ccep_fit(ds, spec_of("mean_x"));
  const Matrix g1 = compute_G_hat(ds, fit, 1);
  CHECK(oracle::max_abs(g1 - oracle::g_hat_loops(ds, fit.residuals)) < 1e-12);
  CHECK(identical(g1, compute_G_hat(ds, fit, 3)));
}

TEST_CASE("G hat vanishes for a perfect fit or identical units") {
  std::mt19937_64 rng(43);
  const auto base = oracle::random_panel(rng, 20, 5, 2);
  Vector y = base.stacked_x() * Eigen::Vector2d(1.0, -2.0);
  const PanelDataset exact(20, 5, y, base.stacked_x());
  const auto fit = ccep_fit(exact, spec_of("mean_x"));
  CHECK(oracle::max_abs(compute_G_hat(exact, fit)) < 1e-12);

  const auto same = PanelDataset::from_units({base.y(0), base.y(0), base.y(0)},
                                             {Matrix(base.x(0)), Matrix(base.x(0)), Matrix(base.x(0))});
  CHECK(oracle::max_abs(compute_G_hat(same, ccep_fit(same, spec_of("const")))) < 1e-14);
}

TEST_CASE("scores match a loop oracle") {
  // N = 4, T = 3, k = 1, m = 1.
  std::mt19937_64 rng(44);
  const auto ds = oracle::random_panel(rng, 4, 3, 1);
  const auto fit = ccep_fit(ds, spec_of("mean_x"));
  const auto infl = build_influence(ds, fit.spec.proxy);
  const Matrix s = compute_scores(ds, fit, infl);

  const Matrix xb = oracle::x_bar(ds);
  const Matrix m = oracle::annihilator_inverse(xb);
  const Matrix g = oracle::g_hat_loops(ds, fit.residuals);
  const Matrix j = oracle::jacobian_loops(xb);
  for (Index i = 0; i < 4; ++i) {
    const Vector q = oracle::vec_loops(ds.x(i) - xb);
    const Vector u = fit.residuals.col(i);
    double naive = 0.0;
    for (Index t = 0; t < 3; ++t)
      for (Index r = 0; r < 3; ++r) naive += m(t, r) * ds.x(i)(r, 0) * u(t);
    double corr = 0.0;
    for (Index a = 0; a < 9; ++a)
      for (Index b = 0; b < 3; ++b) corr += g(a, 0) * j(a, b) * q(b);
    CHECK(s(0, i) == doctest::Approx(naive + corr).epsilon(1e-12).scale(1.0));
  }

  VarianceOptions minus;
  minus.correction_sign = -1.0;
  const Matrix sm = compute_scores(ds, fit, infl, minus);
  const Matrix naive = naive_scores(fit);
  CHECK(oracle::max_abs((s - naive) + (sm - naive)) < 1e-12);
}

TEST_CASE("deterministic proxies leave the naive sandwich unchanged") {
  std::mt19937_64 rng(45);
  const auto ds = oracle::random_panel(rng, 60, 6, 2);
  const auto fit = ccep_fit(ds, spec_of("const,trend:1"));
  const auto v = estimate_variance(ds, fit);
  CHECK(oracle::max_abs(v.avar_corrected - v.avar_naive) < 1e-12);
  CHECK(oracle::max_abs(v.se_corrected - v.se_naive) < 1e-12);
  CHECK(identical(compute_scores(ds, fit, build_influence(ds, fit.spec.proxy)), naive_scores(fit)));
}

TEST_CASE("sandwich assembly") {
  std::mt19937_64 rng(46);
  const auto ds = oracle::random_panel(rng, 80, 6, 2);
  const auto fit = ccep_fit(ds, spec_of("mean_x"));
  const auto v = estimate_variance(ds, fit);
  const double n = 80.0;

  const Matrix s = compute_scores(ds, fit, build_influence(ds, fit.spec.proxy));
  const Matrix b = s * s.transpose() / n;
  const Matrix a_inv = fit.a_hat.inverse();
  const Matrix avar = a_inv * b * a_inv;
  CHECK(oracle::rel_diff(v.b_corrected, b) < 1e-12);
  CHECK(oracle::rel_diff(v.avar_corrected, avar) < 1e-10);
  for (Index j = 0; j < 2; ++j) {
    CHECK(v.se_corrected(j) == doctest::Approx(std::sqrt(avar(j, j) / n)).epsilon(1e-10));
    CHECK(v.ci_upper(j) - v.ci_lower(j) == doctest::Approx(2 * 1.959963984540054 * v.se_corrected(j)).epsilon(1e-12));
    CHECK(v.ci_lower(j) < fit.beta(j));
  }
  CHECK(v.z == doctest::Approx(1.959964).epsilon(1e-6));
  CHECK_FALSE(v.non_psd);

  Matrix xdd(80 * 6, 2);
  for (Index i = 0; i < 80; ++i) xdd.middleRows(i * 6, 6) = fit.proxy.annihilator * ds.x(i);
  CHECK(oracle::rel_diff(fit.a_hat, xdd.transpose() * xdd / n) < 1e-12);

  VarianceOptions dof;
  dof.dof_correction = true;
  const auto vd = estimate_variance(ds, fit, dof);
  CHECK(vd.dof_multiplier == doctest::Approx(80.0 / (80.0 - 2.0)));
  CHECK(oracle::rel_diff(vd.b_corrected, b * 80.0 / 78.0) < 1e-12);

  VarianceOptions ninety;
  ninety.ci_level = 0.90;
  CHECK(estimate_variance(ds, fit, ninety).z == doctest::Approx(1.6448536269514722).epsilon(1e-14));
}

TEST_CASE("variance is identical across job counts") {
  std::mt19937_64 rng(47);
  const auto ds = oracle::random_panel(rng, 1300, 5, 2);
  const auto fit = ccep_fit(ds, spec_of("mean_x,mean_y"));
  VarianceOptions one, four;
  four.jobs = 4;
  const auto a = estimate_variance(ds, fit, one);
  const auto b = estimate_variance(ds, fit, four);
  CHECK(identical(a.avar_corrected, b.avar_corrected));
  CHECK(identical(a.se_naive, b.se_naive));
}

TEST_CASE("scores reject mismatched influence") {
  std::mt19937_64 rng(48);
  const auto ds = oracle::random_panel(rng, 10, 5, 2);
  const auto fit = ccep_fit(ds, spec_of("mean_x"));
  const auto wrong = build_influence(ds, parse_proxy_list("const"));
  try {
    compute_scores(ds, fit, wrong);
    FAIL("accepted mismatched influence");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::DimensionMismatch);
  }
}
