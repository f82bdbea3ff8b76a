#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ccep/error.hpp"
#include "ccep/matops.hpp"
#include "ccep/panel.hpp"
#include "ccep/proxy.hpp"

namespace ccep {

// Aggregate regressors d_t with homogeneous coefficients. Time dummies and
// trends are resolved against (T, m) at fit time.
struct DeterministicSpec {
  enum class Kind { None, TimeDummies, Trend, Explicit };

  Kind kind = Kind::None;
  int power = 1;    // Trend: columns t, ..., t^power
  Matrix values;    // Explicit: T x r

  static DeterministicSpec none() { return {}; }
  static DeterministicSpec time_dummies() { return {Kind::TimeDummies, 1, {}}; }
  static DeterministicSpec trend(int power) { return {Kind::Trend, power, {}}; }
  static DeterministicSpec explicit_matrix(Matrix d) { return {Kind::Explicit, 1, std::move(d)}; }

  bool empty() const noexcept { return kind == Kind::None; }

  friend bool operator==(const DeterministicSpec& a, const DeterministicSpec& b) {
    return a.kind == b.kind && a.power == b.power && identical(a.values, b.values);
  }
};

/// "none" | "time_dummies" | "trend:p" | "file:path" (headerless or headed
/// numeric CSV with T rows). Throws Error{InvalidConfig} or Error{Io}.
DeterministicSpec parse_deterministic(const std::string& text);
std::string format_deterministic(const DeterministicSpec& spec);

/// The T x r matrix D. Time dummies cover periods 2..1+r with
/// r = min(T - 1, T - m): the largest set M D can keep at full column rank.
Matrix resolve_deterministic(const DeterministicSpec& spec, Index periods, Index proxy_width);

struct EstimatorSpec {
  ProxySpec proxy;
  DeterministicSpec deterministic;

  friend bool operator==(const EstimatorSpec&, const EstimatorSpec&) = default;
};

struct LabeledEstimator {
  std::string label;
  EstimatorSpec spec;
};

enum class Preset {
  CcepX,
  CcepXY,
  FeWithin,
  Detrend,
  CcepXPlusIntercept,
  CcepXPlusTrend,
};

ProxySpec preset_proxy(Preset preset);
std::string_view preset_name(Preset preset);
/// Accepts the canonical upper-case names (CCEP_X, ...) case-insensitively.
Preset parse_preset(const std::string& name);

struct FitOptions {
  int jobs = 1;
};

struct EstimateResult {
  Vector beta;                  // k
  Vector alpha;                 // r, empty when no deterministic block
  bool alpha_structural_zero = false;
  Matrix d;                     // T x r
  Matrix d_ddot;                // M D
  Matrix x_ddot;                // (N*T) x k, unit-major like the panel storage
  Matrix residuals;             // T x N, u_i = y_i - D alpha - X_i beta
  Matrix a_hat;                 // N^{-1} sum X_ddot_i' X_ddot_i
  double a_condition = 0.0;
  ProxyMatrix proxy;
  EstimatorSpec spec;
  Index units = 0;
  Index periods = 0;
  Index n_obs = 0;
  Index dof = 0;                // N (T - m) - k - r
  std::vector<std::string> notes;

  auto x_ddot_unit(Index i) const { return x_ddot.middleRows(i * periods, periods); }
  auto residual(Index i) const { return residuals.col(i); }
};

/// Pooled regression of y_i on M X_i (and M D), M the proxy annihilator.
///
/// With the regressor means among the proxies the coefficient on X does not
/// depend on D, so beta comes from the D-free normal equations and alpha is
/// recovered afterwards from M D alone; when the outcome means are proxies as
/// well alpha is identically zero and returned as such. Without regressor
/// means the full partitioned solve is used.
///
/// Errors: TooFewPeriods (T <= m), RankDeficient naming psi_hat,
/// sum X_ddot'X_ddot or D_ddot, InvalidConfig/DimensionMismatch for bad specs.
EstimateResult ccep_fit(const PanelDataset& ds, const EstimatorSpec& spec, const FitOptions& options = {});

EstimateResult ccep_fit_preset(const PanelDataset& ds, Preset preset, const FitOptions& options = {});

struct ComparisonRow {
  std::string label;
  std::optional<Vector> beta;
  std::optional<Vector> alpha;
  Index m = 0;
  double proxy_condition = 0.0;
  std::optional<ErrorKind> error;
  std::string message;
};

/// Fits every spec on the same dataset. A failing spec yields a row with
/// `error` set; the remaining rows are unaffected.
std::vector<ComparisonRow> compare_specs(const PanelDataset& ds, const std::vector<LabeledEstimator>& specs,
                                         const FitOptions& options = {});

}  // namespace ccep
