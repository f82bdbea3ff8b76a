#include "ccep/variance.hpp"

#include <cmath>
#include <string>
#include <vector>

#include "ccep/error.hpp"
#include "ccep/parallel.hpp"

namespace ccep {
namespace {

template <std::size_t N>
double poly(const double (&c)[N], double x) {
  double acc = c[N - 1];
  for (std::size_t i = N - 1; i-- > 0;) acc = acc * x + c[i];
  return acc;
}

// Sum over unit chunks of S_c S_c', added in chunk order.
Matrix outer_sum(const Matrix& s, int jobs) {
  const Index n = s.cols();
  const Index chunks = chunk_count(n);
  std::vector<Matrix> parts(static_cast<std::size_t>(chunks));
  for_each_chunk(n, jobs, [&](const ChunkRange& c) {
    const auto blk = s.middleCols(c.begin, c.size());
    parts[static_cast<std::size_t>(c.index)] = blk * blk.transpose();
  });
  Matrix out = Matrix::Zero(s.rows(), s.rows());
  for (const auto& p : parts) out += p;
  return (out + out.transpose()) / 2.0;
}

Matrix solve_sandwich(const Matrix& a, const Matrix& b) {
  // A symmetric: A^{-1} (A^{-1} B)' = A^{-1} B A^{-1} for symmetric B.
  const Matrix left = ols_solve(a, b).coefficients;
  const Matrix avar = ols_solve(a, left.transpose()).coefficients;
  return (avar + avar.transpose()) / 2.0;
}

bool is_non_psd(const Matrix& b) {
  if (b.size() == 0) return false;
  const Eigen::SelfAdjointEigenSolver<Matrix> eig(b, Eigen::EigenvaluesOnly);
  const double trace = b.trace();
  return eig.eigenvalues().minCoeff() < -1e-10 * std::abs(trace);
}

}  // namespace

double normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) throw Error(ErrorKind::InvalidConfig, "quantile level must lie in (0, 1)");
  static constexpr double a[] = {3.3871328727963666080e0, 1.3314166789178437745e+2, 1.9715909503065514427e+3,
                                 1.3731693765509461125e+4, 4.5921953931549871457e+4, 6.7265770927008700853e+4,
                                 3.3430575583588128105e+4, 2.5090809287301226727e+3};
  static constexpr double b[] = {1.0,
                                 4.2313330701600911252e+1, 6.8718700749205790830e+2, 5.3941960214247511077e+3,
                                 2.1213794301586595867e+4, 3.9307895800092710610e+4, 2.8729085735721942674e+4,
                                 5.2264952788528545610e+3};
  static constexpr double c[] = {1.42343711074968357734e0, 4.63033784615654529590e0, 5.76949722146069140550e0,
                                 3.64784832476320460504e0, 1.27045825245236838258e0, 2.41780725177450611770e-1,
                                 2.27238449892691845833e-2, 7.74545014278341407640e-4};
  static constexpr double d[] = {1.0,
                                 2.05319162663775882187e0, 1.67638483018380384940e0, 6.89767334985100004550e-1,
                                 1.48103976427480074590e-1, 1.51986665636164571966e-2, 5.47593808499534494600e-4,
                                 1.05075007164441684324e-9};
  static constexpr double e[] = {6.65790464350110377720e0, 5.46378491116411436990e0, 1.78482653991729133580e0,
                                 2.96560571828504891230e-1, 2.65321895265761230930e-2, 1.24266094738807843860e-3,
                                 2.71155556874348757815e-5, 2.01033439929228813265e-7};
  static constexpr double f[] = {1.0,
                                 5.99832206555887937690e-1, 1.36929880922735805310e-1, 1.48753612908506148525e-2,
                                 7.86869131145613259100e-4, 1.84631831751005468180e-5, 1.42151175831644588870e-7,
                                 2.04426310338993978564e-15};

  const double q = p - 0.5;
  if (std::abs(q) <= 0.425) {
    const double r = 0.180625 - q * q;
    return q * poly(a, r) / poly(b, r);
  }
  double r = q < 0.0 ? p : 1.0 - p;
  r = std::sqrt(-std::log(r));
  double x;
  if (r <= 5.0) {
    r -= 1.6;
    x = poly(c, r) / poly(d, r);
  } else {
    r -= 5.0;
    x = poly(e, r) / poly(f, r);
  }
  return q < 0.0 ? -x : x;
}

Matrix compute_G_hat(const PanelDataset& ds, const EstimateResult& fit, int jobs) {
  const Index n = ds.units();
  const Index t = ds.periods();
  const Index k = ds.regressors();
  if (fit.residuals.rows() != t || fit.residuals.cols() != n) {
    throw Error(ErrorKind::DimensionMismatch, "residuals do not match the panel");
  }
  const Matrix x_bar = cross_section_means(ds).x_bar;
  const Index chunks = chunk_count(n);
  std::vector<Matrix> parts(static_cast<std::size_t>(chunks));
  // Column j of G is vec(N^{-1} sum_i (x_ij - x_bar_j) u_i').
  for_each_chunk(n, jobs, [&](const ChunkRange& c) {
    Matrix part(t * t, k);
    const auto u = fit.residuals.middleCols(c.begin, c.size());
    for (Index j = 0; j < k; ++j) {
      const Matrix dev = ds.x_by_unit(j).middleCols(c.begin, c.size()).colwise() - x_bar.col(j);
      const Matrix outer = dev * u.transpose();
      part.col(j) = Eigen::Map<const Vector>(outer.data(), t * t);
    }
    parts[static_cast<std::size_t>(c.index)] = std::move(part);
  });
  Matrix g = Matrix::Zero(t * t, k);
  for (const auto& p : parts) g += p;
  return g / static_cast<double>(n);
}

Matrix jacobian_correction(const ProxyMatrix& proxy) {
  const Matrix dual = proxy.dual.size() ? proxy.dual : dual_basis(proxy.psi_hat);
  const Matrix annihilator = proxy.annihilator.size() ? proxy.annihilator : residual_maker(proxy.psi_hat);
  const Index t = annihilator.rows();
  const Matrix inner = kron(dual, annihilator);
  // (I + K) B: row j + i t of K B is row i + j t of B.
  Matrix j = inner;
  for (Index a = 0; a < t; ++a) {
    for (Index b = 0; b < t; ++b) j.row(b + a * t) += inner.row(a + b * t);
  }
  return j;
}

Matrix naive_scores(const EstimateResult& fit) {
  const Index n = fit.units;
  const Index t = fit.periods;
  const Index k = fit.x_ddot.cols();
  Matrix s(k, n);
  for (Index j = 0; j < k; ++j) {
    const Eigen::Map<const Matrix> xj(fit.x_ddot.col(j).data(), t, n);
    s.row(j) = xj.cwiseProduct(fit.residuals).colwise().sum();
  }
  return s;
}

Matrix compute_scores(const PanelDataset& ds, const EstimateResult& fit, const InfluenceSet& influence,
                      const VarianceOptions& options) {
  const Index t = ds.periods();
  const Index m = fit.proxy.m;
  if (influence.periods != t || influence.m != m || influence.q.rows() != t * m ||
      influence.q.cols() != ds.units() || fit.units != ds.units() || fit.periods != t) {
    throw Error(ErrorKind::DimensionMismatch,
                "influence vectors have layout " + std::to_string(influence.q.rows()) + " x " +
                    std::to_string(influence.q.cols()) + ", expected " + std::to_string(t * m) + " x " +
                    std::to_string(ds.units()));
  }
  Matrix s = naive_scores(fit);
  if (influence.q.isZero(0.0)) return s;
  const Matrix g = compute_G_hat(ds, fit, options.jobs);
  const Matrix gj = options.correction_sign * (g.transpose() * jacobian_correction(fit.proxy));  // k x Tm
  s.noalias() += gj * influence.q;
  return s;
}

VarianceResult sandwich(const EstimateResult& fit, const Matrix& scores, const VarianceOptions& options) {
  const Index n = fit.units;
  const Index k = fit.beta.size();
  if (scores.rows() != k || scores.cols() != n) {
    throw Error(ErrorKind::DimensionMismatch, "scores must be k x N");
  }
  if (!(options.ci_level > 0.0 && options.ci_level < 1.0)) {
    throw Error(ErrorKind::InvalidConfig, "ci level must lie in (0, 1)");
  }
  VarianceResult v;
  v.a_hat = fit.a_hat;
  v.ci_level = options.ci_level;
  const double nn = static_cast<double>(n);
  if (options.dof_correction) {
    const double denom = nn - static_cast<double>(k) - static_cast<double>(fit.alpha.size());
    if (denom <= 0.0) throw Error(ErrorKind::InvalidConfig, "degrees-of-freedom correction needs N > k + r");
    v.dof_multiplier = nn / denom;
  }
  v.b_corrected = outer_sum(scores, options.jobs) * (v.dof_multiplier / nn);
  v.b_naive = outer_sum(naive_scores(fit), options.jobs) * (v.dof_multiplier / nn);
  try {
    v.avar_corrected = solve_sandwich(fit.a_hat, v.b_corrected);
    v.avar_naive = solve_sandwich(fit.a_hat, v.b_naive);
  } catch (const Error&) {
    throw Error(ErrorKind::RankDeficient, "A_hat is singular");
  }
  v.non_psd = is_non_psd(v.b_corrected) || is_non_psd(v.b_naive);
  v.se_corrected = (v.avar_corrected.diagonal().cwiseMax(0.0) / nn).cwiseSqrt();
  v.se_naive = (v.avar_naive.diagonal().cwiseMax(0.0) / nn).cwiseSqrt();
  v.z = normal_quantile(1.0 - (1.0 - options.ci_level) / 2.0);
  v.ci_lower = fit.beta - v.z * v.se_corrected;
  v.ci_upper = fit.beta + v.z * v.se_corrected;
  v.ci_lower_naive = fit.beta - v.z * v.se_naive;
  v.ci_upper_naive = fit.beta + v.z * v.se_naive;
  return v;
}

VarianceResult estimate_variance(const PanelDataset& ds, const EstimateResult& fit, const VarianceOptions& options) {
  const InfluenceSet influence = build_influence(ds, fit.spec.proxy);
  const Matrix scores = compute_scores(ds, fit, influence, options);
  VarianceResult v = sandwich(fit, scores, options);
  v.g_hat = compute_G_hat(ds, fit, options.jobs);
  return v;
}

}  // namespace ccep
