#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "ccep/matops.hpp"

namespace ccep {

// Balanced N x T panel with k regressors.
//
// Outcomes are stored unit-major as an (N*T)-vector and regressors as an
// (N*T) x k matrix whose rows i*T .. i*T+T-1 belong to unit i, so each unit's
// T x k block is a strided view and each regressor column reshapes to a T x N
// matrix without copying.
class PanelDataset {
 public:
  using ConstBlock = Eigen::Block<const Matrix>;
  using ConstSegment = Eigen::VectorBlock<const Vector>;
  using ConstTxN = Eigen::Map<const Matrix>;

  /// Validates shape and finiteness. Throws Error{DimensionMismatch} for
  /// inconsistent shapes, Error{MissingValue} for non-finite entries, and
  /// Error{InvalidConfig} when N < 2, T < 2 or k < 1.
  PanelDataset(Index units, Index periods, Vector y, Matrix x,
               std::vector<std::string> unit_ids = {},
               std::vector<std::string> time_ids = {},
               std::vector<std::string> regressor_names = {});

  /// Assemble from per-unit blocks (y_i: T-vector, X_i: T x k).
  static PanelDataset from_units(const std::vector<Vector>& y, const std::vector<Matrix>& x,
                                 std::vector<std::string> unit_ids = {},
                                 std::vector<std::string> time_ids = {},
                                 std::vector<std::string> regressor_names = {});

  Index units() const noexcept { return units_; }
  Index periods() const noexcept { return periods_; }
  Index regressors() const noexcept { return x_.cols(); }

  ConstSegment y(Index unit) const { return y_.segment(unit * periods_, periods_); }
  ConstBlock x(Index unit) const { return x_.middleRows(unit * periods_, periods_); }

  /// Outcomes as a T x N matrix (column i = y_i).
  ConstTxN y_by_unit() const { return ConstTxN(y_.data(), periods_, units_); }
  /// Regressor j as a T x N matrix (column i = unit i's j-th column).
  ConstTxN x_by_unit(Index j) const { return ConstTxN(x_.col(j).data(), periods_, units_); }

  const Vector& stacked_y() const noexcept { return y_; }
  const Matrix& stacked_x() const noexcept { return x_; }

  const std::vector<std::string>& unit_ids() const noexcept { return unit_ids_; }
  const std::vector<std::string>& time_ids() const noexcept { return time_ids_; }
  const std::vector<std::string>& regressor_names() const noexcept { return regressor_names_; }

  friend bool operator==(const PanelDataset& a, const PanelDataset& b);

 private:
  Index units_;
  Index periods_;
  Vector y_;
  Matrix x_;
  std::vector<std::string> unit_ids_;
  std::vector<std::string> time_ids_;
  std::vector<std::string> regressor_names_;
};

struct CrossSectionMeans {
  Matrix x_bar;  // T x k
  Vector y_bar;  // T
};

CrossSectionMeans cross_section_means(const PanelDataset& ds);

// Column mapping for long-format CSV input. An empty `x` selects every column
// other than unit/time/y, in header order.
struct CsvSchema {
  std::string unit = "unit";
  std::string time = "time";
  std::string y = "y";
  std::vector<std::string> x;
};

/// Reads a long-format panel (one row per unit-period). Units and periods are
/// ordered by their labels: numerically when every label parses as a number,
/// lexicographically otherwise.
PanelDataset load_csv(const std::filesystem::path& path, const CsvSchema& schema = {});

/// Writes header `unit,time,y,<regressor names>` and one row per (unit, time),
/// streaming row by row. Floats use the shortest round-trip representation.
void write_csv(const PanelDataset& ds, const std::filesystem::path& path);

}  // namespace ccep
