#include "ccep/estimator.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "ccep/parallel.hpp"

namespace ccep {
namespace {

using Kind = ProxyColumn::Kind;

std::optional<std::vector<double>> parse_numeric_row(const std::string& line) {
  std::vector<double> row;
  std::size_t pos = 0;
  while (pos <= line.size()) {
    std::size_t next = line.find(',', pos);
    if (next == std::string::npos) next = line.size();
    std::string_view cell(line.data() + pos, next - pos);
    while (!cell.empty() && std::isspace(static_cast<unsigned char>(cell.front()))) cell.remove_prefix(1);
    while (!cell.empty() && std::isspace(static_cast<unsigned char>(cell.back()))) cell.remove_suffix(1);
    if (!cell.empty() && cell.front() == '+') cell.remove_prefix(1);
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
    if (cell.empty() || ec != std::errc{} || ptr != cell.data() + cell.size() || !std::isfinite(v)) {
      return std::nullopt;
    }
    row.push_back(v);
    pos = next + 1;
  }
  return row;
}

Matrix read_numeric_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Io, "cannot open deterministic regressor file '" + path + "'");
  std::vector<std::vector<double>> rows;
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    auto row = parse_numeric_row(line);
    if (!row) {
      if (first) {  // header
        first = false;
        continue;
      }
      throw Error(ErrorKind::InvalidConfig, "non-numeric row in '" + path + "': " + line);
    }
    first = false;
    if (!rows.empty() && row->size() != rows.front().size()) {
      throw Error(ErrorKind::DimensionMismatch, "ragged rows in '" + path + "'");
    }
    rows.push_back(std::move(*row));
  }
  if (rows.empty()) throw Error(ErrorKind::InvalidConfig, "deterministic regressor file '" + path + "' is empty");
  Matrix d(static_cast<Index>(rows.size()), static_cast<Index>(rows.front().size()));
  for (Index t = 0; t < d.rows(); ++t) {
    for (Index c = 0; c < d.cols(); ++c) d(t, c) = rows[static_cast<std::size_t>(t)][static_cast<std::size_t>(c)];
  }
  return d;
}

std::string upper(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
  return s;
}

}  // namespace

DeterministicSpec parse_deterministic(const std::string& text) {
  if (text.empty() || text == "none") return DeterministicSpec::none();
  if (text == "time_dummies") return DeterministicSpec::time_dummies();
  if (text == "trend") return DeterministicSpec::trend(1);
  if (text.rfind("trend:", 0) == 0) {
    int p = 0;
    const std::string s = text.substr(6);
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), p);
    if (ec != std::errc{} || ptr != s.data() + s.size() || p < 1) {
      throw Error(ErrorKind::InvalidConfig, "bad trend power in '" + text + "'");
    }
    return DeterministicSpec::trend(p);
  }
  if (text.rfind("file:", 0) == 0) return DeterministicSpec::explicit_matrix(read_numeric_csv(text.substr(5)));
  throw Error(ErrorKind::InvalidConfig, "unknown deterministic block '" + text + "'");
}

std::string format_deterministic(const DeterministicSpec& spec) {
  switch (spec.kind) {
    case DeterministicSpec::Kind::None: return "none";
    case DeterministicSpec::Kind::TimeDummies: return "time_dummies";
    case DeterministicSpec::Kind::Trend: return "trend:" + std::to_string(spec.power);
    case DeterministicSpec::Kind::Explicit: return "explicit";
  }
  return "none";
}

Matrix resolve_deterministic(const DeterministicSpec& spec, Index periods, Index proxy_width) {
  switch (spec.kind) {
    case DeterministicSpec::Kind::None: return Matrix(periods, 0);
    case DeterministicSpec::Kind::TimeDummies: {
      const Index r = std::min(periods - 1, periods - proxy_width);
      if (r < 1) throw Error(ErrorKind::TooFewPeriods, "no room for time dummies with T = " + std::to_string(periods));
      Matrix d = Matrix::Zero(periods, r);
      for (Index c = 0; c < r; ++c) d(c + 1, c) = 1.0;
      return d;
    }
    case DeterministicSpec::Kind::Trend: {
      if (spec.power < 1) throw Error(ErrorKind::InvalidConfig, "trend power must be >= 1");
      Matrix d(periods, spec.power);
      for (Index t = 0; t < periods; ++t) {
        for (int p = 1; p <= spec.power; ++p) d(t, p - 1) = std::pow(static_cast<double>(t + 1), p);
      }
      return d;
    }
    case DeterministicSpec::Kind::Explicit:
      if (spec.values.rows() != periods) {
        throw Error(ErrorKind::DimensionMismatch, "deterministic block has " + std::to_string(spec.values.rows()) +
                                                      " rows, expected T = " + std::to_string(periods));
      }
      if (!spec.values.allFinite()) throw Error(ErrorKind::MissingValue, "deterministic block has non-finite entries");
      return spec.values;
  }
  return Matrix(periods, 0);
}

ProxySpec preset_proxy(Preset preset) {
  ProxySpec s;
  auto& c = s.columns;
  switch (preset) {
    case Preset::CcepX: c = {ProxyColumn::mean_x()}; break;
    case Preset::CcepXY: c = {ProxyColumn::mean_x(), ProxyColumn::mean_y()}; break;
    case Preset::FeWithin: c = {ProxyColumn::intercept()}; break;
    case Preset::Detrend: c = {ProxyColumn::intercept(), ProxyColumn::trend(1)}; break;
    case Preset::CcepXPlusIntercept: c = {ProxyColumn::intercept(), ProxyColumn::mean_x()}; break;
    case Preset::CcepXPlusTrend: c = {ProxyColumn::intercept(), ProxyColumn::trend(1), ProxyColumn::mean_x()}; break;
  }
  return s;
}

std::string_view preset_name(Preset preset) {
  switch (preset) {
    case Preset::CcepX: return "CCEP_X";
    case Preset::CcepXY: return "CCEP_XY";
    case Preset::FeWithin: return "FE_WITHIN";
    case Preset::Detrend: return "DETREND";
    case Preset::CcepXPlusIntercept: return "CCEP_X_PLUS_INTERCEPT";
    case Preset::CcepXPlusTrend: return "CCEP_X_PLUS_TREND";
  }
  return "";
}

Preset parse_preset(const std::string& name) {
  const std::string u = upper(name);
  for (Preset p : {Preset::CcepX, Preset::CcepXY, Preset::FeWithin, Preset::Detrend, Preset::CcepXPlusIntercept,
                   Preset::CcepXPlusTrend}) {
    if (u == preset_name(p)) return p;
  }
  throw Error(ErrorKind::InvalidConfig, "unknown estimator preset '" + name + "'");
}

EstimateResult ccep_fit(const PanelDataset& ds, const EstimatorSpec& spec, const FitOptions& options) {
  const Index n = ds.units();
  const Index t = ds.periods();
  const Index k = ds.regressors();
  spec.proxy.validate(t, k);
  const Index m = spec.proxy.width(k);
  if (t <= m) {
    throw Error(ErrorKind::TooFewPeriods, "the proxy set has m = " + std::to_string(m) + " columns but T = " +
                                              std::to_string(t) + "; estimation requires T > m");
  }

  EstimateResult res;
  res.units = n;
  res.periods = t;
  res.n_obs = n * t;
  res.spec = spec;
  res.proxy = build_proxy(ds, spec.proxy);
  const Matrix& mm = res.proxy.annihilator;

  res.d = resolve_deterministic(spec.deterministic, t, m);
  const Index r = res.d.cols();
  if (r > t - m) {
    throw Error(ErrorKind::RankDeficient, "D_ddot = M D has at most " + std::to_string(t - m) + " independent columns, " +
                                              std::to_string(r) + " requested");
  }

  // Partial the proxies out of every unit and accumulate the normal equations
  // chunk by chunk; chunk partials are then added in chunk order.
  res.x_ddot.resize(n * t, k);
  const Index chunks = chunk_count(n);
  std::vector<Matrix> a_parts(static_cast<std::size_t>(chunks));
  std::vector<Vector> b_parts(static_cast<std::size_t>(chunks));
  const Matrix& xs = ds.stacked_x();
  const Vector& ys = ds.stacked_y();
  for_each_chunk(n, options.jobs, [&](const ChunkRange& c) {
    const Index rows = c.size() * t;
    for (Index j = 0; j < k; ++j) {
      Eigen::Map<const Matrix> xj(xs.col(j).data() + c.begin * t, t, c.size());
      Eigen::Map<Matrix> dj(res.x_ddot.col(j).data() + c.begin * t, t, c.size());
      dj.noalias() = mm * xj;
    }
    const auto blk = res.x_ddot.middleRows(c.begin * t, rows);
    a_parts[static_cast<std::size_t>(c.index)] = blk.transpose() * blk;
    b_parts[static_cast<std::size_t>(c.index)] = blk.transpose() * ys.segment(c.begin * t, rows);
  });
  Matrix a_sum = Matrix::Zero(k, k);
  Vector b_sum = Vector::Zero(k);
  for (Index c = 0; c < chunks; ++c) {
    a_sum += a_parts[static_cast<std::size_t>(c)];
    b_sum += b_parts[static_cast<std::size_t>(c)];
  }
  res.a_hat = a_sum / static_cast<double>(n);

  const RankReport xr = rank_report(res.x_ddot);
  res.a_condition = xr.condition;
  if (xr.rank < k) {
    std::ostringstream msg;
    msg << "sum X_ddot'X_ddot has rank " << xr.rank << " < " << k << " (condition of X_ddot " << xr.condition << ")";
    throw Error(ErrorKind::RankDeficient, msg.str());
  }

  const CrossSectionMeans means = cross_section_means(ds);
  const bool has_mean_x = spec.proxy.contains(Kind::MeanX);
  const bool has_mean_y = spec.proxy.contains(Kind::MeanY);
  Matrix xbar_dd;
  Vector ybar_dd;
  if (r > 0) {
    res.d_ddot = mm * res.d;
    const RankReport dr = rank_report(res.d_ddot);
    if (dr.rank < r) {
      std::ostringstream msg;
      msg << "D_ddot'D_ddot has rank " << dr.rank << " < " << r << " (condition of D_ddot " << dr.condition << ")";
      throw Error(ErrorKind::RankDeficient, msg.str());
    }
    xbar_dd = mm * means.x_bar;
    ybar_dd = mm * means.y_bar;
  } else {
    res.d_ddot = Matrix(t, 0);
  }

  if (r == 0 || has_mean_x) {
    res.beta = ols_solve(a_sum, b_sum).coefficients.col(0);
  } else {
    // Partitioned solve: residualize each unit's block on the common D_ddot.
    const Matrix p_xbar = res.d_ddot * ols_solve(res.d_ddot, xbar_dd).coefficients;
    const Vector p_ybar = res.d_ddot * ols_solve(res.d_ddot, ybar_dd).coefficients.col(0);
    const double nn = static_cast<double>(n);
    const Matrix a_fwl = a_sum - nn * xbar_dd.transpose() * p_xbar;
    const Vector b_fwl = b_sum - nn * xbar_dd.transpose() * p_ybar;
    try {
      res.beta = ols_solve(a_fwl, b_fwl).coefficients.col(0);
    } catch (const Error&) {
      throw Error(ErrorKind::RankDeficient, "sum X_ddot'X_ddot net of D_ddot is singular");
    }
  }

  if (r > 0) {
    if (has_mean_x && has_mean_y) {
      res.alpha = Vector::Zero(r);
      res.alpha_structural_zero = true;
      res.notes.push_back("alpha is identically zero: both regressor and outcome means are proxies");
    } else {
      res.alpha = ols_solve(res.d_ddot, ybar_dd - xbar_dd * res.beta).coefficients.col(0);
    }
  }

  res.residuals = ds.y_by_unit();
  for (Index j = 0; j < k; ++j) res.residuals.noalias() -= res.beta(j) * ds.x_by_unit(j);
  if (r > 0) res.residuals.colwise() -= res.d * res.alpha;

  res.dof = n * (t - m) - k - r;
  if (res.dof <= 0) res.notes.push_back("non-positive residual degrees of freedom");
  return res;
}

EstimateResult ccep_fit_preset(const PanelDataset& ds, Preset preset, const FitOptions& options) {
  return ccep_fit(ds, EstimatorSpec{preset_proxy(preset), {}}, options);
}

std::vector<ComparisonRow> compare_specs(const PanelDataset& ds, const std::vector<LabeledEstimator>& specs,
                                         const FitOptions& options) {
  std::vector<ComparisonRow> rows;
  rows.reserve(specs.size());
  for (const auto& s : specs) {
    ComparisonRow row;
    row.label = s.label;
    row.m = s.spec.proxy.width(ds.regressors());
    try {
      const EstimateResult fit = ccep_fit(ds, s.spec, options);
      row.beta = fit.beta;
      if (fit.alpha.size() > 0) row.alpha = fit.alpha;
      row.proxy_condition = fit.proxy.condition;
      for (const auto& note : fit.notes) row.message += (row.message.empty() ? "" : "; ") + note;
    } catch (const Error& e) {
      row.error = e.kind();
      row.message = e.what();
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace ccep
