#pragma once

#include <string>
#include <vector>

#include "ccep/matops.hpp"
#include "ccep/panel.hpp"

namespace ccep {

// One declared entry of a factor-proxy specification. Trend(p) expands to the
// p raw power columns t, t^2, ..., t^p with t = 1..T; MeanX expands to the k
// columns of the cross-sectional regressor means.
struct ProxyColumn {
  enum class Kind { Intercept, Trend, Deterministic, MeanX, MeanY, MeanProduct };

  Kind kind = Kind::Intercept;
  int power = 1;        // Trend
  Index j = 0, l = 0;   // MeanProduct, zero-based regressor indices
  Vector values;        // Deterministic, length T
  std::string label;    // Deterministic

  static ProxyColumn intercept();
  static ProxyColumn trend(int power);
  static ProxyColumn deterministic(Vector values, std::string label);
  static ProxyColumn mean_x();
  static ProxyColumn mean_y();
  static ProxyColumn mean_product(Index j, Index l);

  bool stochastic() const noexcept {
    return kind == Kind::MeanX || kind == Kind::MeanY || kind == Kind::MeanProduct;
  }
  /// Number of realized columns for a panel with k regressors.
  Index width(Index k) const noexcept;

  friend bool operator==(const ProxyColumn& a, const ProxyColumn& b) {
    return a.kind == b.kind && a.power == b.power && a.j == b.j && a.l == b.l && identical(a.values, b.values) &&
           a.label == b.label;
  }
};

struct ProxySpec {
  std::vector<ProxyColumn> columns;

  /// Total realized column count m for k regressors.
  Index width(Index k) const noexcept;
  bool contains(ProxyColumn::Kind kind) const noexcept;

  /// Throws Error{InvalidConfig} for a duplicate MeanX, an empty spec, a bad
  /// trend power or out-of-range product indices; Error{DimensionMismatch}
  /// when a deterministic column length differs from T.
  void validate(Index periods, Index regressors) const;

  friend bool operator==(const ProxySpec&, const ProxySpec&) = default;
};

/// Parses the command-line list form, e.g. "const,trend:1,mean_x,mean_y,prod:1,2".
/// Product indices are one-based in the text form. Throws Error{InvalidConfig}.
ProxySpec parse_proxy_list(const std::string& text);
std::string format_proxy_list(const ProxySpec& spec);

struct ProxyMatrix {
  Matrix psi_hat;                       // T x m
  Index m = 0;
  std::vector<std::string> column_labels;
  std::vector<bool> is_stochastic;
  Matrix annihilator;                   // M = I - P
  Matrix dual;                          // psi_hat (psi_hat' psi_hat)^{-1}
  double condition = 0.0;               // pivot-ratio condition of psi_hat
};

/// Realizes the proxy matrix in declared order. Throws Error{TooManyProxies}
/// when m >= T and Error{RankDeficient} (with the condition estimate) when
/// the realized matrix is numerically rank-deficient.
ProxyMatrix build_proxy(const PanelDataset& ds, const ProxySpec& spec);

// Per-unit influence vectors q_i = vec(H_i - H_bar), stored column-wise as a
// (T*m) x N matrix in the same vec layout as psi_hat. Blocks belonging to
// deterministic columns are exactly zero.
struct InfluenceSet {
  Matrix q;
  Index periods = 0;
  Index m = 0;

  auto unit(Index i) const { return q.col(i); }
};

InfluenceSet build_influence(const PanelDataset& ds, const ProxySpec& spec);

}  // namespace ccep
