#pragma once

// Dense real-matrix primitives shared by every estimation stage.
//
// Storage is Eigen's default column-major layout, so vec() is a plain copy of
// the underlying buffer: columns stacked top to bottom, first column first.

#include <Eigen/Dense>

namespace ccep {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Index = Eigen::Index;

// A matrix is numerically rank-deficient when the ratio of its smallest to
// largest pivot of the rank-revealing QR falls at or below this value.
inline constexpr double kRankTolerance = 1e-10;

struct LeastSquares {
  Matrix coefficients;  // q x c
  Index rank = 0;
  // Ratio of largest to smallest |R_jj| of the column-pivoted QR; infinity
  // when the design is exactly singular.
  double condition = 0.0;
};

/// Column-by-column least squares through a column-pivoted Householder QR.
/// Throws Error{RankDeficient} when `require_full_rank` and rank < q.
LeastSquares ols_solve(const Matrix& design, const Matrix& rhs, bool require_full_rank = true);

struct RankReport {
  Index rank = 0;
  double condition = 0.0;
};

/// Rank and pivot-ratio condition estimate of `a` at kRankTolerance.
RankReport rank_report(const Matrix& a);

/// M_A = I - A (A'A)^{-1} A', built from the thin Q factor of A.
/// Throws Error{RankDeficient} if A does not have full column rank.
Matrix residual_maker(const Matrix& a);

/// A (A'A)^{-1}, the dual basis of A's column space, computed by triangular
/// solves against the QR factor. Same rank requirement as residual_maker.
Matrix dual_basis(const Matrix& a);

Matrix kron(const Matrix& a, const Matrix& b);

Vector vec(const Matrix& a);
Matrix unvec(const Vector& v, Index rows, Index cols);

/// Same shape and bitwise-equal entries. Safe on mismatched shapes, unlike
/// Eigen's operator==.
template <typename A, typename B>
bool identical(const Eigen::MatrixBase<A>& a, const Eigen::MatrixBase<B>& b) {
  return a.rows() == b.rows() && a.cols() == b.cols() && (a.array() == b.array()).all();
}

/// The t^2 x t^2 permutation K with K vec(A) = vec(A') for every t x t A.
Matrix commutation_matrix(Index t);

}  // namespace ccep
