#pragma once

// Reference computations for the tests. Nothing here calls into the library's
// QR-based paths: projections use an SVD pseudo-inverse or an explicit
// inverse, Kronecker and commutation structure is spelled out with loops.

#include <cmath>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include <ccep/panel.hpp>

namespace oracle {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

inline Matrix pinv(const Matrix& a) {
  Eigen::JacobiSVD<Matrix> svd(a, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const Vector& s = svd.singularValues();
  const double tol = 1e-13 * s(0) * static_cast<double>(std::max(a.rows(), a.cols()));
  Matrix s_inv = Matrix::Zero(a.cols(), a.rows());
  for (Index i = 0; i < s.size(); ++i) {
    if (s(i) > tol) s_inv(i, i) = 1.0 / s(i);
  }
  return svd.matrixV() * s_inv * svd.matrixU().transpose();
}

inline Matrix annihilator_pinv(const Matrix& a) {
  return Matrix::Identity(a.rows(), a.rows()) - a * pinv(a);
}

inline Matrix annihilator_inverse(const Matrix& a) {
  const Matrix ata = a.transpose() * a;
  return Matrix::Identity(a.rows(), a.rows()) - a * ata.inverse() * a.transpose();
}

inline Matrix kron_loops(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Index i = 0; i < a.rows(); ++i)
    for (Index j = 0; j < a.cols(); ++j)
      for (Index p = 0; p < b.rows(); ++p)
        for (Index q = 0; q < b.cols(); ++q) out(i * b.rows() + p, j * b.cols() + q) = a(i, j) * b(p, q);
  return out;
}

inline Vector vec_loops(const Matrix& a) {
  Vector v(a.size());
  Index n = 0;
  for (Index j = 0; j < a.cols(); ++j)
    for (Index i = 0; i < a.rows(); ++i) v(n++) = a(i, j);
  return v;
}

// K with K vec(A) = vec(A') for t x t A: entry A(i,j) sits at i + j t.
inline Matrix commutation_loops(Index t) {
  Matrix k = Matrix::Zero(t * t, t * t);
  for (Index i = 0; i < t; ++i)
    for (Index j = 0; j < t; ++j) k(j + i * t, i + j * t) = 1.0;
  return k;
}

// (I + K)(psi (psi'psi)^{-1} (x) M) assembled from explicit products.
inline Matrix jacobian_loops(const Matrix& psi) {
  const Index t = psi.rows();
  const Matrix dual = psi * (psi.transpose() * psi).inverse();
  const Matrix m = annihilator_inverse(psi);
  const Matrix i_plus_k = Matrix::Identity(t * t, t * t) + commutation_loops(t);
  return i_plus_k * kron_loops(dual, m);
}

// Pooled OLS through normal equations with an explicit inverse.
inline Vector pooled_ols(const std::vector<Matrix>& x, const std::vector<Vector>& y) {
  const Index k = x.front().cols();
  Matrix a = Matrix::Zero(k, k);
  Vector b = Vector::Zero(k);
  for (std::size_t i = 0; i < x.size(); ++i) {
    a += x[i].transpose() * x[i];
    b += x[i].transpose() * y[i];
  }
  return a.inverse() * b;
}

inline std::vector<Matrix> unit_x(const ccep::PanelDataset& ds) {
  std::vector<Matrix> out;
  for (Index i = 0; i < ds.units(); ++i) out.emplace_back(ds.x(i));
  return out;
}

inline std::vector<Vector> unit_y(const ccep::PanelDataset& ds) {
  std::vector<Vector> out;
  for (Index i = 0; i < ds.units(); ++i) out.emplace_back(ds.y(i));
  return out;
}

inline Matrix x_bar(const ccep::PanelDataset& ds) {
  Matrix s = Matrix::Zero(ds.periods(), ds.regressors());
  for (Index i = 0; i < ds.units(); ++i) s += ds.x(i);
  return s / static_cast<double>(ds.units());
}

inline Vector y_bar(const ccep::PanelDataset& ds) {
  Vector s = Vector::Zero(ds.periods());
  for (Index i = 0; i < ds.units(); ++i) s += ds.y(i);
  return s / static_cast<double>(ds.units());
}

// Within estimator: subtract each unit's time mean, then pool.
inline Vector within(const ccep::PanelDataset& ds) {
  std::vector<Matrix> xs;
  std::vector<Vector> ys;
  for (Index i = 0; i < ds.units(); ++i) {
    Matrix xi = ds.x(i);
    Vector yi = ds.y(i);
    xi.rowwise() -= xi.colwise().mean();
    yi.array() -= yi.mean();
    xs.push_back(xi);
    ys.push_back(yi);
  }
  return pooled_ols(xs, ys);
}

// Removes a unit-specific straight line from every series via the textbook
// slope formula on centred time.
inline Vector detrended(const Vector& s) {
  const Index t = s.size();
  const double tbar = (t + 1) / 2.0;
  const double sbar = s.mean();
  double sxy = 0.0, sxx = 0.0;
  for (Index i = 0; i < t; ++i) {
    const double d = (i + 1) - tbar;
    sxy += d * (s(i) - sbar);
    sxx += d * d;
  }
  const double slope = sxy / sxx;
  Vector out(t);
  for (Index i = 0; i < t; ++i) out(i) = s(i) - sbar - slope * ((i + 1) - tbar);
  return out;
}

inline Vector detrend_estimator(const ccep::PanelDataset& ds) {
  std::vector<Matrix> xs;
  std::vector<Vector> ys;
  for (Index i = 0; i < ds.units(); ++i) {
    Matrix xi = ds.x(i);
    for (Index j = 0; j < xi.cols(); ++j) xi.col(j) = detrended(xi.col(j));
    xs.push_back(xi);
    ys.push_back(detrended(ds.y(i)));
  }
  return pooled_ols(xs, ys);
}

// (sum X_i' M X_i)^{-1} sum X_i' M y_i with M from an explicit inverse.
inline Vector direct_formula(const ccep::PanelDataset& ds, const Matrix& psi) {
  const Matrix m = annihilator_inverse(psi);
  const Index k = ds.regressors();
  Matrix a = Matrix::Zero(k, k);
  Vector b = Vector::Zero(k);
  for (Index i = 0; i < ds.units(); ++i) {
    a += ds.x(i).transpose() * m * ds.x(i);
    b += ds.x(i).transpose() * m * ds.y(i);
  }
  return a.inverse() * b;
}

// Two steps: regress every column of X_i on psi unit by unit and keep the
// residuals, then pool the residualized X against y_i.
inline Vector two_step(const ccep::PanelDataset& ds, const Matrix& psi) {
  const Matrix pp = psi.transpose() * psi;
  std::vector<Matrix> xs;
  std::vector<Vector> ys;
  for (Index i = 0; i < ds.units(); ++i) {
    const Matrix xi = ds.x(i);
    const Matrix coef = pp.ldlt().solve(psi.transpose() * xi);
    xs.push_back(xi - psi * coef);
    ys.emplace_back(ds.y(i));
  }
  return pooled_ols(xs, ys);
}

// One big regression of stacked y on [X_i, D, unit-specific psi blocks].
// Returns (beta, alpha) stacked.
inline Vector joint_regression(const ccep::PanelDataset& ds, const Matrix& psi, const Matrix& d) {
  const Index n = ds.units(), t = ds.periods(), k = ds.regressors(), m = psi.cols(), r = d.cols();
  Matrix z = Matrix::Zero(n * t, k + r + n * m);
  Vector y(n * t);
  for (Index i = 0; i < n; ++i) {
    z.block(i * t, 0, t, k) = ds.x(i);
    if (r > 0) z.block(i * t, k, t, r) = d;
    z.block(i * t, k + r + i * m, t, m) = psi;
    y.segment(i * t, t) = ds.y(i);
  }
  const Vector coef = pinv(z) * y;
  return coef.head(k + r);
}

// Joint pooled regression of M y_i on [M X_i, M D] with M from the SVD
// pseudo-inverse. Same coefficients as the long regression, far fewer columns.
inline Vector partialled_joint(const ccep::PanelDataset& ds, const Matrix& psi, const Matrix& d) {
  const Index n = ds.units(), t = ds.periods(), k = ds.regressors(), r = d.cols();
  const Matrix m = annihilator_pinv(psi);
  const Matrix md = m * d;
  Matrix z(n * t, k + r);
  Vector y(n * t);
  for (Index i = 0; i < n; ++i) {
    z.block(i * t, 0, t, k) = m * ds.x(i);
    z.block(i * t, k, t, r) = md;
    y.segment(i * t, t) = m * ds.y(i);
  }
  return pinv(z) * y;
}

// G = N^{-1} sum_i u_i (x) (X_i - X_bar), one entry at a time.
inline Matrix g_hat_loops(const ccep::PanelDataset& ds, const Matrix& residuals) {
  const Index n = ds.units(), t = ds.periods(), k = ds.regressors();
  const Matrix xb = x_bar(ds);
  Matrix g = Matrix::Zero(t * t, k);
  for (Index j = 0; j < k; ++j)
    for (Index a = 0; a < t; ++a)
      for (Index b = 0; b < t; ++b) {
        double s = 0.0;
        for (Index i = 0; i < n; ++i) s += residuals(a, i) * (ds.x(i)(b, j) - xb(b, j));
        g(b + a * t, j) = s / static_cast<double>(n);
      }
  return g;
}

// Random balanced panel with y = X beta + noise plus a one-factor component
// loading on X so that estimators differ.
inline ccep::PanelDataset random_panel(std::mt19937_64& rng, Index n, Index t, Index k) {
  std::normal_distribution<double> z(0.0, 1.0);
  Vector f(t);
  for (Index s = 0; s < t; ++s) f(s) = z(rng);
  std::vector<Vector> ys;
  std::vector<Matrix> xs;
  for (Index i = 0; i < n; ++i) {
    const double g = z(rng);
    Matrix x(t, k);
    for (Index s = 0; s < t; ++s)
      for (Index j = 0; j < k; ++j) x(s, j) = z(rng) + 0.5 * g * f(s) + 0.1 * (j + 1) * s;
    Vector y(t);
    for (Index s = 0; s < t; ++s) {
      y(s) = g * f(s) + z(rng);
      for (Index j = 0; j < k; ++j) y(s) += (1.0 + 0.5 * j) * x(s, j);
    }
    xs.push_back(x);
    ys.push_back(y);
  }
  return ccep::PanelDataset::from_units(ys, xs);
}

inline double max_abs(const Matrix& a) { return a.size() == 0 ? 0.0 : a.cwiseAbs().maxCoeff(); }

inline double rel_diff(const Matrix& a, const Matrix& b) {
  return max_abs(a - b) / std::max(1.0, max_abs(b));
}

}  // namespace oracle
