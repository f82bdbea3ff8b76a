#include "ccep/matops.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "ccep/error.hpp"

namespace ccep {
namespace {

using Qr = Eigen::ColPivHouseholderQR<Matrix>;

Qr factor(const Matrix& a) {
  Qr qr(a);
  qr.setThreshold(kRankTolerance);
  return qr;
}

double pivot_condition(const Qr& qr) {
  const Index q = std::min(qr.rows(), qr.cols());
  if (q == 0) return std::numeric_limits<double>::infinity();
  const auto diag = qr.matrixQR().diagonal().head(q).cwiseAbs();
  const double largest = diag(0);
  const double smallest = diag(q - 1);
  if (smallest == 0.0) return std::numeric_limits<double>::infinity();
  return largest / smallest;
}

void require_full_column_rank(const Qr& qr, const char* what) {
  if (qr.rank() < qr.cols() || qr.rows() < qr.cols()) {
    std::ostringstream msg;
    msg << what << " has numerical rank " << qr.rank() << " < " << qr.cols()
        << " columns (condition " << pivot_condition(qr) << ")";
    throw Error(ErrorKind::RankDeficient, msg.str());
  }
}

}  // namespace

LeastSquares ols_solve(const Matrix& design, const Matrix& rhs, bool require_full_rank) {
  if (design.rows() != rhs.rows()) {
    throw Error(ErrorKind::DimensionMismatch, "design and rhs row counts differ");
  }
  if (design.rows() < design.cols()) {
    throw Error(ErrorKind::RankDeficient, "fewer observations than coefficients");
  }
  const Qr qr = factor(design);
  if (require_full_rank) require_full_column_rank(qr, "design");
  return LeastSquares{qr.solve(rhs), qr.rank(), pivot_condition(qr)};
}

RankReport rank_report(const Matrix& a) {
  const Qr qr = factor(a);
  return RankReport{qr.rank(), pivot_condition(qr)};
}

Matrix residual_maker(const Matrix& a) {
  const Qr qr = factor(a);
  require_full_column_rank(qr, "projection basis");
  const Index t = a.rows();
  const Matrix q = qr.householderQ() * Matrix::Identity(t, a.cols());
  Matrix m = -q * q.transpose();
  m.diagonal().array() += 1.0;
  return m;
}

Matrix dual_basis(const Matrix& a) {
  // A P = Q R  =>  A (A'A)^{-1} = Q R^{-T} P'.
  const Qr qr = factor(a);
  require_full_column_rank(qr, "projection basis");
  const Index m = a.cols();
  const Matrix q = qr.householderQ() * Matrix::Identity(a.rows(), m);
  const auto r = qr.matrixQR().topLeftCorner(m, m).triangularView<Eigen::Upper>();
  // Q R^{-T} = (R^{-1} Q')'
  const Matrix rinv_qt = r.solve(q.transpose());
  return rinv_qt.transpose() * qr.colsPermutation().transpose();
}

Matrix kron(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Index j = 0; j < a.cols(); ++j) {
    for (Index i = 0; i < a.rows(); ++i) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

Vector vec(const Matrix& a) {
  return Eigen::Map<const Vector>(a.data(), a.size());
}

Matrix unvec(const Vector& v, Index rows, Index cols) {
  if (rows * cols != v.size()) {
    throw Error(ErrorKind::DimensionMismatch, "unvec: size does not match rows * cols");
  }
  return Eigen::Map<const Matrix>(v.data(), rows, cols);
}

Matrix commutation_matrix(Index t) {
  // vec(A)[i + j t] = A(i, j) and vec(A')[j + i t] = A(i, j).
  const Index n = t * t;
  Matrix k = Matrix::Zero(n, n);
  for (Index i = 0; i < t; ++i) {
    for (Index j = 0; j < t; ++j) k(j + i * t, i + j * t) = 1.0;
  }
  return k;
}

}  // namespace ccep
