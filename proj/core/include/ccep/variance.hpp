#pragma once

#include "ccep/estimator.hpp"
#include "ccep/matops.hpp"
#include "ccep/panel.hpp"
#include "ccep/proxy.hpp"

namespace ccep {

struct VarianceOptions {
  double ci_level = 0.95;
  // Scale B by N / (N - k - r).
  bool dof_correction = false;
  // +1 applies the proxy correction G'J q_i as written; -1 subtracts it.
  double correction_sign = 1.0;
  int jobs = 1;
};

struct VarianceResult {
  Matrix a_hat;             // k x k
  Matrix g_hat;             // T^2 x k
  Matrix b_corrected;       // k x k
  Matrix b_naive;
  Matrix avar_corrected;    // A^{-1} B A^{-1}
  Matrix avar_naive;
  Vector se_corrected;      // sqrt(diag(avar) / N)
  Vector se_naive;
  double ci_level = 0.95;
  double z = 0.0;
  Vector ci_lower;          // corrected
  Vector ci_upper;
  Vector ci_lower_naive;
  Vector ci_upper_naive;
  bool non_psd = false;     // a B matrix has an eigenvalue below -1e-10 trace
  double dof_multiplier = 1.0;
};

/// Standard normal quantile, Wichura's AS 241 (PPND16), |error| ~ 1e-16.
/// Throws Error{InvalidConfig} outside (0, 1).
double normal_quantile(double p);

/// G = N^{-1} sum_i u_i (x) (X_i - X_bar), T^2 x k.
Matrix compute_G_hat(const PanelDataset& ds, const EstimateResult& fit, int jobs = 1);

/// (I + K) [psi_hat (psi_hat' psi_hat)^{-1} (x) M], T^2 x (T m). This is the
/// derivative of vec(P) in vec(psi), i.e. minus the derivative of vec(M).
Matrix jacobian_correction(const ProxyMatrix& proxy);

/// Scores s_i = X_ddot_i' u_i + sign * G' J q_i as a k x N matrix.
/// Throws Error{DimensionMismatch} when the influence layout disagrees with
/// the proxy matrix or the panel.
Matrix compute_scores(const PanelDataset& ds, const EstimateResult& fit, const InfluenceSet& influence,
                      const VarianceOptions& options = {});

/// Naive scores X_ddot_i' u_i, k x N.
Matrix naive_scores(const EstimateResult& fit);

/// Assembles both sandwiches and the intervals from precomputed scores.
/// Throws Error{RankDeficient} when A_hat is singular.
VarianceResult sandwich(const EstimateResult& fit, const Matrix& scores, const VarianceOptions& options = {});

/// Full pipeline: influence, G, J, scores, sandwich.
VarianceResult estimate_variance(const PanelDataset& ds, const EstimateResult& fit,
                                 const VarianceOptions& options = {});

}  // namespace ccep
