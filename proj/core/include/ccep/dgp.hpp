#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ccep/matops.hpp"
#include "ccep/panel.hpp"
#include "ccep/proxy.hpp"

namespace ccep {

// Data-generating process
//
//   y_i = D (alpha + a_i) + X_i (beta + b_i) + F gamma_i + e_i
//
// Every unit draws a shared latent h_i ~ N(0,1), which can enter the
// loadings, the regressors and the slopes, and an independent scale shock
// w_i ~ N(0,1) that can inflate the regressor noise and drive the slopes.

struct FactorModel {
  enum class Kind { Explicit, Bsw, AdditiveEffect, LinearTrendHet };

  Kind kind = Kind::AdditiveEffect;
  Matrix f;          // Explicit: T x p
  // Bsw: F = Psi Lambda, Psi the population analogue of `proxy` (deterministic
  // columns and MeanX evaluated at E[X_i]).
  ProxySpec proxy;
  Matrix lambda;     // m x p
};

// gamma_i = mean + latent * h_i + sd .* eta_i
struct LoadingModel {
  Vector mean;
  Vector latent;
  Vector sd;
};

struct RegressorModel {
  enum class Kind { General, Scf, StaggeredBinary };

  Kind kind = Kind::General;
  // General: X_i = mean + latent_shift * h_i + exp(scale_dispersion * w_i / 2) * noise_sd * V0_i
  Matrix mean;            // T x k
  Matrix latent_shift;    // T x k, empty means zero
  double noise_sd = 1.0;
  double scale_dispersion = 0.0;
  // Scf: X_i = F Gamma_i + noise_sd * V0_i, Gamma_i = gamma_mean + gamma_latent * h_i + gamma_sd * Z_i
  Matrix gamma_mean;      // p x k
  Matrix gamma_latent;    // p x k, empty means zero
  double gamma_sd = 0.0;
  // StaggeredBinary (k = 2): with u_i = Phi(h_i), early adopters (u_i < rho1)
  // have x_1 = 1 from period 2 on, late adopters (rho1 <= u_i < rho1 + rho2)
  // have x_2 = 1 in the last period.
  double rho1 = 0.5;
  double rho2 = 0.25;
};

struct ErrorModel {
  enum class Kind { IidNormal, Ar1, Heteroskedastic };

  Kind kind = Kind::IidNormal;
  double sd = 1.0;
  double rho = 0.0;     // Ar1, stationary start
  double het = 0.0;     // Heteroskedastic: sd_i = sd * sqrt(1 + het * h_i^2)
};

// b_i = b_sd * z_i + b_latent * h_i + b_scale * w_i (same for every
// coefficient, z_i iid per coefficient); a_i = a_sd * xi_i.
struct SlopeModel {
  double b_sd = 0.0;
  double b_latent = 0.0;
  double b_scale = 0.0;
  double a_sd = 0.0;

  bool heterogeneous() const noexcept { return b_sd != 0.0 || b_latent != 0.0 || b_scale != 0.0; }
};

struct DgpConfig {
  std::string name;
  std::string description;
  Index periods = 0;
  Index regressors = 0;
  Vector beta;
  FactorModel factors;
  LoadingModel loadings;
  RegressorModel regressor_model;
  ErrorModel errors;
  SlopeModel slopes;
  Matrix d;        // T x r, may be empty
  Vector alpha;    // r
  bool record_truth = false;

  Index factor_count() const;
  /// Throws Error{InvalidConfig} on any inconsistency.
  void validate() const;
};

struct DgpTruth {
  Vector beta;
  Vector alpha;
  Matrix f;                // T x p
  Matrix population_mean;  // E[X_i], T x k
  // Filled only when record_truth is set:
  Matrix gamma;            // p x N
  Matrix beta_i;           // k x N
  Matrix alpha_i;          // r x N
  Matrix errors;           // T x N
};

struct Simulated {
  PanelDataset data;
  DgpTruth truth;
};

/// E[X_i] implied by the regressor model (Scf uses the realized F).
Matrix population_regressor_mean(const DgpConfig& config);

/// The factor matrix F implied by the config.
Matrix factor_matrix(const DgpConfig& config);

/// Draws N units. Unit i uses the substream (seed, i), so the panel does not
/// depend on `jobs`.
Simulated generate(const DgpConfig& config, Index units, std::uint64_t seed, int jobs = 1);

std::vector<DgpConfig> presets();
/// Throws Error{InvalidConfig} for an unknown name.
DgpConfig preset(const std::string& name);
std::vector<std::string> preset_names();

}  // namespace ccep
