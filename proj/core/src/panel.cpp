#include "ccep/panel.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <optional>
#include <unordered_map>

#include "ccep/error.hpp"

namespace ccep {
namespace {

std::vector<std::string> default_labels(Index n, const std::string& prefix) {
  std::vector<std::string> out;
  out.reserve(static_cast<std::size_t>(n));
  for (Index i = 1; i <= n; ++i) out.push_back(prefix + std::to_string(i));
  return out;
}

std::optional<double> parse_double(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
  if (s.empty()) return std::nullopt;
  if (s.front() == '+') s.remove_prefix(1);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

// Minimal RFC 4180 field splitter: commas, double-quoted fields, "" escapes.
std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          field.push_back('"');
          ++i;
        } else {
          quoted = false;
        }
      } else {
        field.push_back(c);
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(std::move(field));
      field.clear();
    } else {
      field.push_back(c);
    }
  }
  fields.push_back(std::move(field));
  return fields;
}

std::string quote_if_needed(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  out.push_back('"');
  return out;
}

void append_double(std::string& out, double v) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  out.append(buf, ptr);
}

// Sorted distinct labels: numeric order when every label parses, else
// lexicographic. Ties in numeric value fall back to the label text.
std::vector<std::string> ordered_labels(std::vector<std::string> labels) {
  std::sort(labels.begin(), labels.end());
  labels.erase(std::unique(labels.begin(), labels.end()), labels.end());
  std::vector<double> values;
  values.reserve(labels.size());
  for (const auto& l : labels) {
    const auto v = parse_double(l);
    if (!v) return labels;
    values.push_back(*v);
  }
  std::vector<std::size_t> order(labels.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (values[a] != values[b]) return values[a] < values[b];
    return labels[a] < labels[b];
  });
  std::vector<std::string> out;
  out.reserve(labels.size());
  for (auto i : order) out.push_back(labels[i]);
  return out;
}

}  // namespace

PanelDataset::PanelDataset(Index units, Index periods, Vector y, Matrix x,
                           std::vector<std::string> unit_ids, std::vector<std::string> time_ids,
                           std::vector<std::string> regressor_names)
    : units_(units),
      periods_(periods),
      y_(std::move(y)),
      x_(std::move(x)),
      unit_ids_(std::move(unit_ids)),
      time_ids_(std::move(time_ids)),
      regressor_names_(std::move(regressor_names)) {
  if (units_ < 2) throw Error(ErrorKind::InvalidConfig, "panel needs at least 2 units");
  if (periods_ < 2) throw Error(ErrorKind::InvalidConfig, "panel needs at least 2 periods");
  if (x_.cols() < 1) throw Error(ErrorKind::InvalidConfig, "panel needs at least 1 regressor");
  if (y_.size() != units_ * periods_ || x_.rows() != units_ * periods_) {
    throw Error(ErrorKind::DimensionMismatch, "panel storage does not match N x T");
  }
  if (!y_.allFinite() || !x_.allFinite()) {
    throw Error(ErrorKind::MissingValue, "panel contains non-finite values");
  }
  if (unit_ids_.empty()) unit_ids_ = default_labels(units_, "");
  if (time_ids_.empty()) time_ids_ = default_labels(periods_, "");
  if (regressor_names_.empty()) regressor_names_ = default_labels(x_.cols(), "x");
  if (static_cast<Index>(unit_ids_.size()) != units_ ||
      static_cast<Index>(time_ids_.size()) != periods_ ||
      static_cast<Index>(regressor_names_.size()) != x_.cols()) {
    throw Error(ErrorKind::DimensionMismatch, "panel label counts do not match dimensions");
  }
}

PanelDataset PanelDataset::from_units(const std::vector<Vector>& y, const std::vector<Matrix>& x,
                                      std::vector<std::string> unit_ids,
                                      std::vector<std::string> time_ids,
                                      std::vector<std::string> regressor_names) {
  if (y.size() != x.size() || y.empty()) {
    throw Error(ErrorKind::DimensionMismatch, "from_units: y and x unit counts differ");
  }
  const Index n = static_cast<Index>(y.size());
  const Index t = y.front().size();
  const Index k = x.front().cols();
  Vector ys(n * t);
  Matrix xs(n * t, k);
  for (Index i = 0; i < n; ++i) {
    const auto& yi = y[static_cast<std::size_t>(i)];
    const auto& xi = x[static_cast<std::size_t>(i)];
    if (yi.size() != t || xi.rows() != t || xi.cols() != k) {
      throw Error(ErrorKind::DimensionMismatch, "from_units: unit blocks differ in shape");
    }
    ys.segment(i * t, t) = yi;
    xs.middleRows(i * t, t) = xi;
  }
  return PanelDataset(n, t, std::move(ys), std::move(xs), std::move(unit_ids),
                      std::move(time_ids), std::move(regressor_names));
}

bool operator==(const PanelDataset& a, const PanelDataset& b) {
  return a.units_ == b.units_ && a.periods_ == b.periods_ && a.x_.cols() == b.x_.cols() &&
         a.y_ == b.y_ && a.x_ == b.x_ && a.unit_ids_ == b.unit_ids_ &&
         a.time_ids_ == b.time_ids_ && a.regressor_names_ == b.regressor_names_;
}

CrossSectionMeans cross_section_means(const PanelDataset& ds) {
  const Index t = ds.periods();
  const Index k = ds.regressors();
  const double inv_n = 1.0 / static_cast<double>(ds.units());
  CrossSectionMeans out{Matrix::Zero(t, k), Vector::Zero(t)};
  for (Index i = 0; i < ds.units(); ++i) {
    out.x_bar += ds.x(i);
    out.y_bar += ds.y(i);
  }
  out.x_bar *= inv_n;
  out.y_bar *= inv_n;
  return out;
}

PanelDataset load_csv(const std::filesystem::path& path, const CsvSchema& schema) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Io, "cannot open " + path.string());

  std::string line;
  if (!std::getline(in, line)) throw Error(ErrorKind::SchemaMismatch, "missing header row");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  // Tolerate a UTF-8 byte-order mark.
  if (line.rfind("\xEF\xBB\xBF", 0) == 0) line.erase(0, 3);
  const auto header = split_csv_line(line);

  auto column_of = [&](const std::string& name) -> std::size_t {
    const auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) throw Error(ErrorKind::SchemaMismatch, "column '" + name + "' not found");
    return static_cast<std::size_t>(it - header.begin());
  };
  const std::size_t unit_col = column_of(schema.unit);
  const std::size_t time_col = column_of(schema.time);
  const std::size_t y_col = column_of(schema.y);
  std::vector<std::string> x_names = schema.x;
  if (x_names.empty()) {
    for (const auto& h : header) {
      if (h != schema.unit && h != schema.time && h != schema.y) x_names.push_back(h);
    }
  }
  if (x_names.empty()) throw Error(ErrorKind::SchemaMismatch, "no regressor columns");
  std::vector<std::size_t> x_cols;
  for (const auto& name : x_names) x_cols.push_back(column_of(name));
  const std::size_t k = x_cols.size();

  struct Row {
    std::string unit, time;
    std::vector<double> values;  // y, x1..xk
  };
  std::vector<Row> rows;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto fields = split_csv_line(line);
    if (fields.size() != header.size()) {
      throw Error(ErrorKind::SchemaMismatch,
                  "line " + std::to_string(line_no) + " has " + std::to_string(fields.size()) +
                      " fields, header has " + std::to_string(header.size()));
    }
    Row row{fields[unit_col], fields[time_col], {}};
    if (row.unit.empty() || row.time.empty()) {
      throw Error(ErrorKind::MissingValue, "empty unit or time label on line " + std::to_string(line_no));
    }
    row.values.reserve(k + 1);
    auto numeric = [&](std::size_t col) {
      const auto v = parse_double(fields[col]);
      if (!v || !std::isfinite(*v)) {
        throw Error(ErrorKind::MissingValue, "non-numeric or empty cell in column '" + header[col] +
                                                 "' on line " + std::to_string(line_no));
      }
      return *v;
    };
    row.values.push_back(numeric(y_col));
    for (auto c : x_cols) row.values.push_back(numeric(c));
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw Error(ErrorKind::SchemaMismatch, "no data rows");

  std::vector<std::string> unit_labels, time_labels;
  for (const auto& r : rows) {
    unit_labels.push_back(r.unit);
    time_labels.push_back(r.time);
  }
  unit_labels = ordered_labels(std::move(unit_labels));
  time_labels = ordered_labels(std::move(time_labels));
  std::unordered_map<std::string, Index> unit_index, time_index;
  for (std::size_t i = 0; i < unit_labels.size(); ++i) unit_index[unit_labels[i]] = static_cast<Index>(i);
  for (std::size_t i = 0; i < time_labels.size(); ++i) time_index[time_labels[i]] = static_cast<Index>(i);

  const Index n = static_cast<Index>(unit_labels.size());
  const Index t = static_cast<Index>(time_labels.size());
  Vector y(n * t);
  Matrix x(n * t, static_cast<Index>(k));
  std::vector<char> seen(static_cast<std::size_t>(n * t), 0);
  for (const auto& r : rows) {
    const Index i = unit_index.at(r.unit);
    const Index s = time_index.at(r.time);
    const Index row = i * t + s;
    auto& flag = seen[static_cast<std::size_t>(row)];
    if (flag) {
      throw Error(ErrorKind::DuplicateObservation, "unit '" + r.unit + "' period '" + r.time + "' appears twice");
    }
    flag = 1;
    y(row) = r.values[0];
    for (std::size_t j = 0; j < k; ++j) x(row, static_cast<Index>(j)) = r.values[j + 1];
  }
  for (Index i = 0; i < n; ++i) {
    for (Index s = 0; s < t; ++s) {
      if (!seen[static_cast<std::size_t>(i * t + s)]) {
        throw Error(ErrorKind::UnbalancedPanel, "unit '" + unit_labels[static_cast<std::size_t>(i)] +
                                                    "' lacks period '" + time_labels[static_cast<std::size_t>(s)] + "'");
      }
    }
  }
  return PanelDataset(n, t, std::move(y), std::move(x), std::move(unit_labels), std::move(time_labels),
                      std::move(x_names));
}

void write_csv(const PanelDataset& ds, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::Io, "cannot write " + path.string());
  std::string line = "unit,time,y";
  for (const auto& name : ds.regressor_names()) {
    line.push_back(',');
    line += quote_if_needed(name);
  }
  line.push_back('\n');
  out << line;
  const Index k = ds.regressors();
  for (Index i = 0; i < ds.units(); ++i) {
    const auto xi = ds.x(i);
    const auto yi = ds.y(i);
    const std::string unit = quote_if_needed(ds.unit_ids()[static_cast<std::size_t>(i)]);
    for (Index s = 0; s < ds.periods(); ++s) {
      line = unit;
      line.push_back(',');
      line += quote_if_needed(ds.time_ids()[static_cast<std::size_t>(s)]);
      line.push_back(',');
      append_double(line, yi(s));
      for (Index j = 0; j < k; ++j) {
        line.push_back(',');
        append_double(line, xi(s, j));
      }
      line.push_back('\n');
      out << line;
    }
  }
  if (!out) throw Error(ErrorKind::Io, "write failed for " + path.string());
}

}  // namespace ccep
