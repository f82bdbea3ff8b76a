#include "ccep/proxy.hpp"

#include <charconv>
#include <cmath>
#include <sstream>

#include "ccep/error.hpp"

namespace ccep {
namespace {

using Kind = ProxyColumn::Kind;

int parse_positive(const std::string& s, const std::string& context) {
  int v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size() || v < 1) {
    throw Error(ErrorKind::InvalidConfig, "expected a positive integer in '" + context + "'");
  }
  return v;
}

std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(text);
  while (std::getline(in, item, sep)) {
    const auto b = item.find_first_not_of(" \t");
    const auto e = item.find_last_not_of(" \t");
    out.push_back(b == std::string::npos ? std::string{} : item.substr(b, e - b + 1));
  }
  return out;
}

// Per-unit statistic whose cross-sectional mean is column block `c`, written
// into the T x width block `h` for unit i.
template <typename Block>
void unit_statistic(const PanelDataset& ds, const ProxyColumn& c, Index i, Block&& h) {
  switch (c.kind) {
    case Kind::MeanX: h = ds.x(i); break;
    case Kind::MeanY: h = ds.y(i); break;
    case Kind::MeanProduct: h = ds.x(i).col(c.j).cwiseProduct(ds.x(i).col(c.l)); break;
    default: h.setZero(); break;
  }
}

}  // namespace

ProxyColumn ProxyColumn::intercept() { return ProxyColumn{}; }

ProxyColumn ProxyColumn::trend(int power) {
  ProxyColumn c;
  c.kind = Kind::Trend;
  c.power = power;
  return c;
}

ProxyColumn ProxyColumn::deterministic(Vector values, std::string label) {
  ProxyColumn c;
  c.kind = Kind::Deterministic;
  c.values = std::move(values);
  c.label = std::move(label);
  return c;
}

ProxyColumn ProxyColumn::mean_x() {
  ProxyColumn c;
  c.kind = Kind::MeanX;
  return c;
}

ProxyColumn ProxyColumn::mean_y() {
  ProxyColumn c;
  c.kind = Kind::MeanY;
  return c;
}

ProxyColumn ProxyColumn::mean_product(Index j, Index l) {
  ProxyColumn c;
  c.kind = Kind::MeanProduct;
  c.j = j;
  c.l = l;
  return c;
}

Index ProxyColumn::width(Index k) const noexcept {
  switch (kind) {
    case Kind::Trend: return power;
    case Kind::MeanX: return k;
    default: return 1;
  }
}

Index ProxySpec::width(Index k) const noexcept {
  Index m = 0;
  for (const auto& c : columns) m += c.width(k);
  return m;
}

bool ProxySpec::contains(ProxyColumn::Kind kind) const noexcept {
  for (const auto& c : columns) {
    if (c.kind == kind) return true;
  }
  return false;
}

void ProxySpec::validate(Index periods, Index regressors) const {
  if (columns.empty()) throw Error(ErrorKind::InvalidConfig, "proxy spec is empty");
  int mean_x_count = 0;
  for (const auto& c : columns) {
    switch (c.kind) {
      case Kind::MeanX: ++mean_x_count; break;
      case Kind::Trend:
        if (c.power < 1) throw Error(ErrorKind::InvalidConfig, "trend power must be >= 1");
        break;
      case Kind::MeanProduct:
        if (c.j < 0 || c.l < 0 || c.j >= regressors || c.l >= regressors) {
          throw Error(ErrorKind::InvalidConfig, "product proxy index out of range");
        }
        break;
      case Kind::Deterministic:
        if (c.values.size() != periods) {
          throw Error(ErrorKind::DimensionMismatch,
                      "deterministic proxy '" + c.label + "' has length " + std::to_string(c.values.size()) +
                          ", expected " + std::to_string(periods));
        }
        break;
      default: break;
    }
  }
  if (mean_x_count > 1) throw Error(ErrorKind::InvalidConfig, "mean_x may appear at most once");
}

ProxySpec parse_proxy_list(const std::string& text) {
  ProxySpec spec;
  const auto tokens = split(text, ',');
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    const std::string& tok = tokens[i];
    if (tok == "const" || tok == "intercept") {
      spec.columns.push_back(ProxyColumn::intercept());
    } else if (tok == "trend") {
      spec.columns.push_back(ProxyColumn::trend(1));
    } else if (tok.rfind("trend:", 0) == 0) {
      spec.columns.push_back(ProxyColumn::trend(parse_positive(tok.substr(6), tok)));
    } else if (tok == "mean_x") {
      spec.columns.push_back(ProxyColumn::mean_x());
    } else if (tok == "mean_y") {
      spec.columns.push_back(ProxyColumn::mean_y());
    } else if (tok.rfind("prod:", 0) == 0) {
      // "prod:j,l" spans two comma-separated tokens; "prod:j:l" is accepted too.
      std::string first = tok.substr(5);
      std::string second;
      if (const auto colon = first.find(':'); colon != std::string::npos) {
        second = first.substr(colon + 1);
        first = first.substr(0, colon);
      } else if (i + 1 < tokens.size()) {
        second = tokens[++i];
      }
      const int j = parse_positive(first, tok);
      const int l = parse_positive(second, tok + "," + second);
      spec.columns.push_back(ProxyColumn::mean_product(j - 1, l - 1));
    } else {
      throw Error(ErrorKind::InvalidConfig, "unknown proxy '" + tok + "'");
    }
  }
  if (spec.columns.empty()) throw Error(ErrorKind::InvalidConfig, "proxy list is empty");
  return spec;
}

std::string format_proxy_list(const ProxySpec& spec) {
  std::string out;
  for (const auto& c : spec.columns) {
    if (!out.empty()) out.push_back(',');
    switch (c.kind) {
      case Kind::Intercept: out += "const"; break;
      case Kind::Trend: out += "trend:" + std::to_string(c.power); break;
      case Kind::MeanX: out += "mean_x"; break;
      case Kind::MeanY: out += "mean_y"; break;
      case Kind::MeanProduct:
        out += "prod:" + std::to_string(c.j + 1) + "," + std::to_string(c.l + 1);
        break;
      case Kind::Deterministic: out += "det:" + c.label; break;
    }
  }
  return out;
}

ProxyMatrix build_proxy(const PanelDataset& ds, const ProxySpec& spec) {
  const Index t = ds.periods();
  const Index k = ds.regressors();
  spec.validate(t, k);
  const Index m = spec.width(k);
  if (m >= t) {
    throw Error(ErrorKind::TooManyProxies, std::to_string(m) + " proxy columns need more than " +
                                               std::to_string(t) + " periods (T > m)");
  }

  const CrossSectionMeans means = cross_section_means(ds);
  ProxyMatrix out;
  out.m = m;
  out.psi_hat.resize(t, m);
  Index col = 0;
  auto push = [&](const Vector& v, std::string label, bool stochastic) {
    out.psi_hat.col(col++) = v;
    out.column_labels.push_back(std::move(label));
    out.is_stochastic.push_back(stochastic);
  };
  const auto& names = ds.regressor_names();
  for (const auto& c : spec.columns) {
    switch (c.kind) {
      case Kind::Intercept: push(Vector::Ones(t), "const", false); break;
      case Kind::Trend:
        for (int p = 1; p <= c.power; ++p) {
          Vector v(t);
          for (Index s = 0; s < t; ++s) v(s) = std::pow(static_cast<double>(s + 1), p);
          push(v, p == 1 ? "t" : "t^" + std::to_string(p), false);
        }
        break;
      case Kind::Deterministic: push(c.values, c.label, false); break;
      case Kind::MeanX:
        for (Index j = 0; j < k; ++j) push(means.x_bar.col(j), "mean_" + names[static_cast<std::size_t>(j)], true);
        break;
      case Kind::MeanY: push(means.y_bar, "mean_y", true); break;
      case Kind::MeanProduct: {
        Vector v = Vector::Zero(t);
        for (Index i = 0; i < ds.units(); ++i) v += ds.x(i).col(c.j).cwiseProduct(ds.x(i).col(c.l));
        v /= static_cast<double>(ds.units());
        push(v, "mean_" + names[static_cast<std::size_t>(c.j)] + "*" + names[static_cast<std::size_t>(c.l)], true);
        break;
      }
    }
  }

  const RankReport rank = rank_report(out.psi_hat);
  out.condition = rank.condition;
  if (rank.rank < m) {
    std::ostringstream msg;
    msg << "proxy matrix psi_hat (" << format_proxy_list(spec) << ") has rank " << rank.rank << " < " << m
        << ", condition " << rank.condition;
    throw Error(ErrorKind::RankDeficient, msg.str());
  }
  out.annihilator = residual_maker(out.psi_hat);
  out.dual = dual_basis(out.psi_hat);
  return out;
}

InfluenceSet build_influence(const PanelDataset& ds, const ProxySpec& spec) {
  const Index t = ds.periods();
  const Index k = ds.regressors();
  const Index n = ds.units();
  spec.validate(t, k);
  const Index m = spec.width(k);
  if (m >= t) {
    throw Error(ErrorKind::TooManyProxies, std::to_string(m) + " proxy columns need more than " +
                                               std::to_string(t) + " periods (T > m)");
  }

  InfluenceSet out{Matrix::Zero(t * m, n), t, m};
  // Column block c of psi_hat occupies rows [offset*T, (offset+width)*T) of vec(psi_hat).
  Index offset = 0;
  for (const auto& c : spec.columns) {
    const Index w = c.width(k);
    if (c.stochastic()) {
      Matrix h(t, w);
      Matrix h_bar = Matrix::Zero(t, w);
      for (Index i = 0; i < n; ++i) {
        unit_statistic(ds, c, i, h);
        out.q.col(i).segment(offset * t, w * t) = vec(h);
        h_bar += h;
      }
      h_bar /= static_cast<double>(n);
      const Vector h_bar_vec = vec(h_bar);
      for (Index i = 0; i < n; ++i) out.q.col(i).segment(offset * t, w * t) -= h_bar_vec;
    }
    offset += w;
  }
  return out;
}

}  // namespace ccep
