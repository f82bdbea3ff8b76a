#include "ccep/serialize.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include "ccep/error.hpp"

namespace ccep {
namespace {

using PKind = ProxyColumn::Kind;

Json number(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }
double as_double(const Json& j) { return j.is_null() ? std::numeric_limits<double>::quiet_NaN() : j.get<double>(); }

template <typename T>
T opt(const Json& j, const char* key, T fallback) {
  const auto it = j.find(key);
  return it == j.end() || it->is_null() ? fallback : it->template get<T>();
}

double opt_double(const Json& j, const char* key, double fallback) {
  const auto it = j.find(key);
  return it == j.end() ? fallback : as_double(*it);
}

Matrix opt_matrix(const Json& j, const char* key) {
  const auto it = j.find(key);
  return it == j.end() || it->is_null() ? Matrix() : matrix_from_json(*it);
}

Vector opt_vector(const Json& j, const char* key) {
  const auto it = j.find(key);
  return it == j.end() || it->is_null() ? Vector() : vector_from_json(*it);
}

template <typename E>
struct Names {
  E value;
  const char* name;
};

template <typename E, std::size_t N>
const char* name_of(const Names<E> (&table)[N], E v) {
  for (const auto& n : table) {
    if (n.value == v) return n.name;
  }
  return "";
}

template <typename E, std::size_t N>
E value_of(const Names<E> (&table)[N], const std::string& s, const char* what) {
  for (const auto& n : table) {
    if (s == n.name) return n.value;
  }
  throw Error(ErrorKind::InvalidConfig, std::string("unknown ") + what + " '" + s + "'");
}

constexpr Names<FactorModel::Kind> kFactorKinds[] = {
    {FactorModel::Kind::Explicit, "explicit"},
    {FactorModel::Kind::Bsw, "bsw"},
    {FactorModel::Kind::AdditiveEffect, "additive_effect"},
    {FactorModel::Kind::LinearTrendHet, "linear_trend_het"},
};
constexpr Names<RegressorModel::Kind> kRegressorKinds[] = {
    {RegressorModel::Kind::General, "general"},
    {RegressorModel::Kind::Scf, "scf"},
    {RegressorModel::Kind::StaggeredBinary, "staggered_binary"},
};
constexpr Names<ErrorModel::Kind> kErrorKinds[] = {
    {ErrorModel::Kind::IidNormal, "iid_normal"},
    {ErrorModel::Kind::Ar1, "ar1"},
    {ErrorModel::Kind::Heteroskedastic, "heteroskedastic"},
};

Json strings(const std::vector<std::string>& v) { return Json(v); }

}  // namespace

Json matrix_to_json(const Matrix& a) {
  Json rows = Json::array();
  for (Index i = 0; i < a.rows(); ++i) {
    Json row = Json::array();
    for (Index c = 0; c < a.cols(); ++c) row.push_back(number(a(i, c)));
    rows.push_back(std::move(row));
  }
  return rows;
}

Matrix matrix_from_json(const Json& j) {
  if (!j.is_array()) throw Error(ErrorKind::InvalidConfig, "matrix must be an array of rows");
  const Index rows = static_cast<Index>(j.size());
  if (rows == 0) return Matrix();
  const Index cols = static_cast<Index>(j.front().size());
  Matrix a(rows, cols);
  for (Index i = 0; i < rows; ++i) {
    const Json& row = j[static_cast<std::size_t>(i)];
    if (!row.is_array() || static_cast<Index>(row.size()) != cols) {
      throw Error(ErrorKind::DimensionMismatch, "matrix rows must have equal length");
    }
    for (Index c = 0; c < cols; ++c) a(i, c) = as_double(row[static_cast<std::size_t>(c)]);
  }
  return a;
}

Json vector_to_json(const Vector& v) {
  Json out = Json::array();
  for (Index i = 0; i < v.size(); ++i) out.push_back(number(v(i)));
  return out;
}

Vector vector_from_json(const Json& j) {
  if (!j.is_array()) throw Error(ErrorKind::InvalidConfig, "vector must be an array");
  Vector v(static_cast<Index>(j.size()));
  for (Index i = 0; i < v.size(); ++i) v(i) = as_double(j[static_cast<std::size_t>(i)]);
  return v;
}

void to_json(Json& j, const ProxySpec& s) {
  j = Json::array();
  for (const auto& c : s.columns) {
    Json e;
    switch (c.kind) {
      case PKind::Intercept: e["kind"] = "const"; break;
      case PKind::Trend:
        e["kind"] = "trend";
        e["power"] = c.power;
        break;
      case PKind::Deterministic:
        e["kind"] = "deterministic";
        e["values"] = vector_to_json(c.values);
        e["label"] = c.label;
        break;
      case PKind::MeanX: e["kind"] = "mean_x"; break;
      case PKind::MeanY: e["kind"] = "mean_y"; break;
      case PKind::MeanProduct:
        e["kind"] = "prod";
        e["indices"] = {c.j + 1, c.l + 1};
        break;
    }
    j.push_back(std::move(e));
  }
}

void from_json(const Json& j, ProxySpec& s) {
  if (j.is_string()) {
    s = parse_proxy_list(j.get<std::string>());
    return;
  }
  if (!j.is_array()) throw Error(ErrorKind::InvalidConfig, "proxy must be a list or a string");
  s.columns.clear();
  for (const auto& e : j) {
    const std::string kind = e.at("kind").get<std::string>();
    if (kind == "const" || kind == "intercept") {
      s.columns.push_back(ProxyColumn::intercept());
    } else if (kind == "trend") {
      s.columns.push_back(ProxyColumn::trend(opt(e, "power", 1)));
    } else if (kind == "deterministic") {
      s.columns.push_back(ProxyColumn::deterministic(vector_from_json(e.at("values")), opt<std::string>(e, "label", "d")));
    } else if (kind == "mean_x") {
      s.columns.push_back(ProxyColumn::mean_x());
    } else if (kind == "mean_y") {
      s.columns.push_back(ProxyColumn::mean_y());
    } else if (kind == "prod") {
      const auto& idx = e.at("indices");
      if (!idx.is_array() || idx.size() != 2) throw Error(ErrorKind::InvalidConfig, "prod needs two indices");
      const Index a = idx[0].get<Index>(), b = idx[1].get<Index>();
      if (a < 1 || b < 1) throw Error(ErrorKind::InvalidConfig, "prod indices are one-based");
      s.columns.push_back(ProxyColumn::mean_product(a - 1, b - 1));
    } else {
      throw Error(ErrorKind::InvalidConfig, "unknown proxy kind '" + kind + "'");
    }
  }
}

void to_json(Json& j, const DeterministicSpec& s) {
  if (s.kind == DeterministicSpec::Kind::Explicit) {
    j = {{"kind", "explicit"}, {"values", matrix_to_json(s.values)}};
  } else {
    j = format_deterministic(s);
  }
}

void from_json(const Json& j, DeterministicSpec& s) {
  if (j.is_null()) {
    s = DeterministicSpec::none();
  } else if (j.is_string()) {
    s = parse_deterministic(j.get<std::string>());
  } else if (j.is_object()) {
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "explicit") {
      s = DeterministicSpec::explicit_matrix(matrix_from_json(j.at("values")));
    } else if (kind == "trend") {
      s = DeterministicSpec::trend(opt(j, "power", 1));
    } else {
      s = parse_deterministic(kind);
    }
  } else {
    throw Error(ErrorKind::InvalidConfig, "deterministic block must be a string or an object");
  }
}

void to_json(Json& j, const LabeledEstimator& s) {
  j = {{"label", s.label}, {"proxy", s.spec.proxy}, {"deterministic", s.spec.deterministic}};
}

void from_json(const Json& j, LabeledEstimator& s) {
  if (const auto it = j.find("preset"); it != j.end()) {
    const Preset p = parse_preset(it->get<std::string>());
    s.spec.proxy = preset_proxy(p);
    s.label = opt<std::string>(j, "label", std::string(preset_name(p)));
  } else {
    s.spec.proxy = j.at("proxy").get<ProxySpec>();
    s.label = opt<std::string>(j, "label", format_proxy_list(s.spec.proxy));
  }
  s.spec.deterministic = DeterministicSpec::none();
  if (const auto it = j.find("deterministic"); it != j.end()) s.spec.deterministic = it->get<DeterministicSpec>();
}

void to_json(Json& j, const DgpConfig& c) {
  Json factors = {{"kind", name_of(kFactorKinds, c.factors.kind)}};
  if (c.factors.kind == FactorModel::Kind::Explicit) factors["f"] = matrix_to_json(c.factors.f);
  if (c.factors.kind == FactorModel::Kind::Bsw) {
    factors["proxy"] = c.factors.proxy;
    factors["lambda"] = matrix_to_json(c.factors.lambda);
  }
  const auto& rm = c.regressor_model;
  Json reg = {{"kind", name_of(kRegressorKinds, rm.kind)}, {"noise_sd", number(rm.noise_sd)}};
  switch (rm.kind) {
    case RegressorModel::Kind::General:
      reg["mean"] = matrix_to_json(rm.mean);
      reg["latent_shift"] = matrix_to_json(rm.latent_shift);
      reg["scale_dispersion"] = number(rm.scale_dispersion);
      break;
    case RegressorModel::Kind::Scf:
      reg["gamma_mean"] = matrix_to_json(rm.gamma_mean);
      reg["gamma_latent"] = matrix_to_json(rm.gamma_latent);
      reg["gamma_sd"] = number(rm.gamma_sd);
      break;
    case RegressorModel::Kind::StaggeredBinary:
      reg["rho1"] = number(rm.rho1);
      reg["rho2"] = number(rm.rho2);
      break;
  }
  j = {
      {"name", c.name},
      {"description", c.description},
      {"periods", c.periods},
      {"regressors", c.regressors},
      {"beta", vector_to_json(c.beta)},
      {"factors", factors},
      {"loadings",
       {{"mean", vector_to_json(c.loadings.mean)},
        {"latent", vector_to_json(c.loadings.latent)},
        {"sd", vector_to_json(c.loadings.sd)}}},
      {"regressor_model", reg},
      {"errors",
       {{"kind", name_of(kErrorKinds, c.errors.kind)},
        {"sd", number(c.errors.sd)},
        {"rho", number(c.errors.rho)},
        {"het", number(c.errors.het)}}},
      {"slopes",
       {{"b_sd", number(c.slopes.b_sd)},
        {"b_latent", number(c.slopes.b_latent)},
        {"b_scale", number(c.slopes.b_scale)},
        {"a_sd", number(c.slopes.a_sd)}}},
      {"d", matrix_to_json(c.d)},
      {"alpha", vector_to_json(c.alpha)},
      {"record_truth", c.record_truth},
  };
}

void from_json(const Json& j, DgpConfig& c) {
  if (const auto it = j.find("preset"); it != j.end()) {
    Json base = preset(it->get<std::string>());
    Json patch = j;
    patch.erase("preset");
    base.merge_patch(patch);
    from_json(base, c);
    return;
  }
  c = DgpConfig{};
  c.name = opt<std::string>(j, "name", "custom");
  c.description = opt<std::string>(j, "description", "");
  c.periods = j.at("periods").get<Index>();
  c.regressors = j.at("regressors").get<Index>();
  c.beta = vector_from_json(j.at("beta"));

  const Json& f = j.at("factors");
  c.factors.kind = value_of(kFactorKinds, f.at("kind").get<std::string>(), "factor model");
  c.factors.f = opt_matrix(f, "f");
  if (const auto it = f.find("proxy"); it != f.end()) c.factors.proxy = it->get<ProxySpec>();
  c.factors.lambda = opt_matrix(f, "lambda");

  const Json& l = j.at("loadings");
  c.loadings.mean = vector_from_json(l.at("mean"));
  c.loadings.latent = opt_vector(l, "latent");
  c.loadings.sd = opt_vector(l, "sd");

  const Json& r = j.at("regressor_model");
  auto& rm = c.regressor_model;
  rm.kind = value_of(kRegressorKinds, opt<std::string>(r, "kind", "general"), "regressor model");
  rm.mean = opt_matrix(r, "mean");
  rm.latent_shift = opt_matrix(r, "latent_shift");
  rm.noise_sd = opt_double(r, "noise_sd", 1.0);
  rm.scale_dispersion = opt_double(r, "scale_dispersion", 0.0);
  rm.gamma_mean = opt_matrix(r, "gamma_mean");
  rm.gamma_latent = opt_matrix(r, "gamma_latent");
  rm.gamma_sd = opt_double(r, "gamma_sd", 0.0);
  rm.rho1 = opt_double(r, "rho1", 0.5);
  rm.rho2 = opt_double(r, "rho2", 0.25);

  if (const auto it = j.find("errors"); it != j.end()) {
    c.errors.kind = value_of(kErrorKinds, opt<std::string>(*it, "kind", "iid_normal"), "error model");
    c.errors.sd = opt_double(*it, "sd", 1.0);
    c.errors.rho = opt_double(*it, "rho", 0.0);
    c.errors.het = opt_double(*it, "het", 0.0);
  }
  if (const auto it = j.find("slopes"); it != j.end()) {
    c.slopes.b_sd = opt_double(*it, "b_sd", 0.0);
    c.slopes.b_latent = opt_double(*it, "b_latent", 0.0);
    c.slopes.b_scale = opt_double(*it, "b_scale", 0.0);
    c.slopes.a_sd = opt_double(*it, "a_sd", 0.0);
  }
  c.d = opt_matrix(j, "d");
  c.alpha = opt_vector(j, "alpha");
  c.record_truth = opt(j, "record_truth", false);
  c.validate();
}

void to_json(Json& j, const McConfig& c) {
  j = {
      {"dgp", c.dgp},
      {"estimators", c.estimators},
      {"units", c.units},
      {"reps", c.reps},
      {"ci_level", c.ci_level},
      {"master_seed", c.master_seed},
      {"workers", c.workers},
      {"dof_correction", c.dof_correction},
      {"keep_replications", c.keep_replications},
  };
  if (c.efficiency) j["efficiency"] = {{"baseline", c.efficiency->baseline}, {"alternative", c.efficiency->alternative}};
}

void from_json(const Json& j, McConfig& c) {
  c = McConfig{};
  if (const auto it = j.find("dgp"); it != j.end()) {
    c.dgp = it->is_string() ? preset(it->get<std::string>()) : it->get<DgpConfig>();
  }
  if (const auto it = j.find("estimators"); it != j.end()) c.estimators = it->get<std::vector<LabeledEstimator>>();
  c.units = opt<Index>(j, "units", c.units);
  c.reps = opt<Index>(j, "reps", c.reps);
  c.ci_level = opt<double>(j, "ci_level", c.ci_level);
  c.master_seed = opt<std::uint64_t>(j, "master_seed", c.master_seed);
  c.workers = opt<int>(j, "workers", c.workers);
  c.dof_correction = opt<bool>(j, "dof_correction", false);
  c.keep_replications = opt<bool>(j, "keep_replications", false);
  if (const auto it = j.find("efficiency"); it != j.end() && !it->is_null()) {
    c.efficiency = EfficiencyPair{it->at("baseline").get<std::string>(), it->at("alternative").get<std::string>()};
  }
}

bool operator==(const EstimateDocument& a, const EstimateDocument& b) {
  return a.regressors == b.regressors && a.proxy == b.proxy && a.deterministic == b.deterministic &&
         a.proxy_columns == b.proxy_columns && a.units == b.units && a.periods == b.periods && a.m == b.m &&
         a.n_obs == b.n_obs && a.dof == b.dof && identical(a.beta, b.beta) && identical(a.alpha, b.alpha) &&
         a.alpha_structural_zero == b.alpha_structural_zero && a.ci_level == b.ci_level &&
         identical(a.se_corrected, b.se_corrected) && identical(a.se_naive, b.se_naive) &&
         identical(a.ci_lower, b.ci_lower) && identical(a.ci_upper, b.ci_upper) &&
         identical(a.ci_lower_naive, b.ci_lower_naive) && identical(a.ci_upper_naive, b.ci_upper_naive) &&
         a.proxy_condition == b.proxy_condition && a.design_condition == b.design_condition &&
         a.non_psd == b.non_psd && a.notes == b.notes;
}

EstimateDocument make_estimate_document(const PanelDataset& ds, const EstimateResult& fit, const VarianceResult& v) {
  EstimateDocument d;
  d.regressors = ds.regressor_names();
  d.proxy = format_proxy_list(fit.spec.proxy);
  d.deterministic = format_deterministic(fit.spec.deterministic);
  d.proxy_columns = fit.proxy.column_labels;
  d.units = fit.units;
  d.periods = fit.periods;
  d.m = fit.proxy.m;
  d.n_obs = fit.n_obs;
  d.dof = fit.dof;
  d.beta = fit.beta;
  d.alpha = fit.alpha;
  d.alpha_structural_zero = fit.alpha_structural_zero;
  d.ci_level = v.ci_level;
  d.se_corrected = v.se_corrected;
  d.se_naive = v.se_naive;
  d.ci_lower = v.ci_lower;
  d.ci_upper = v.ci_upper;
  d.ci_lower_naive = v.ci_lower_naive;
  d.ci_upper_naive = v.ci_upper_naive;
  d.proxy_condition = fit.proxy.condition;
  d.design_condition = fit.a_condition;
  d.non_psd = v.non_psd;
  d.notes = fit.notes;
  return d;
}

void to_json(Json& j, const EstimateDocument& d) {
  j = {
      {"regressors", strings(d.regressors)},
      {"spec", {{"proxy", d.proxy}, {"deterministic", d.deterministic}, {"proxy_columns", strings(d.proxy_columns)}}},
      {"dimensions", {{"units", d.units}, {"periods", d.periods}, {"m", d.m}, {"n_obs", d.n_obs}, {"dof", d.dof}}},
      {"beta", vector_to_json(d.beta)},
      {"alpha", vector_to_json(d.alpha)},
      {"alpha_structural_zero", d.alpha_structural_zero},
      {"ci_level", d.ci_level},
      {"se_corrected", vector_to_json(d.se_corrected)},
      {"se_naive", vector_to_json(d.se_naive)},
      {"ci_lower", vector_to_json(d.ci_lower)},
      {"ci_upper", vector_to_json(d.ci_upper)},
      {"ci_lower_naive", vector_to_json(d.ci_lower_naive)},
      {"ci_upper_naive", vector_to_json(d.ci_upper_naive)},
      {"diagnostics",
       {{"proxy_condition", number(d.proxy_condition)},
        {"design_condition", number(d.design_condition)},
        {"non_psd", d.non_psd},
        {"notes", strings(d.notes)}}},
  };
}

void from_json(const Json& j, EstimateDocument& d) {
  d.regressors = j.at("regressors").get<std::vector<std::string>>();
  const Json& s = j.at("spec");
  d.proxy = s.at("proxy").get<std::string>();
  d.deterministic = s.at("deterministic").get<std::string>();
  d.proxy_columns = s.at("proxy_columns").get<std::vector<std::string>>();
  const Json& dim = j.at("dimensions");
  d.units = dim.at("units").get<Index>();
  d.periods = dim.at("periods").get<Index>();
  d.m = dim.at("m").get<Index>();
  d.n_obs = dim.at("n_obs").get<Index>();
  d.dof = dim.at("dof").get<Index>();
  d.beta = vector_from_json(j.at("beta"));
  d.alpha = vector_from_json(j.at("alpha"));
  d.alpha_structural_zero = j.at("alpha_structural_zero").get<bool>();
  d.ci_level = j.at("ci_level").get<double>();
  d.se_corrected = vector_from_json(j.at("se_corrected"));
  d.se_naive = vector_from_json(j.at("se_naive"));
  d.ci_lower = vector_from_json(j.at("ci_lower"));
  d.ci_upper = vector_from_json(j.at("ci_upper"));
  d.ci_lower_naive = vector_from_json(j.at("ci_lower_naive"));
  d.ci_upper_naive = vector_from_json(j.at("ci_upper_naive"));
  const Json& g = j.at("diagnostics");
  d.proxy_condition = as_double(g.at("proxy_condition"));
  d.design_condition = as_double(g.at("design_condition"));
  d.non_psd = g.at("non_psd").get<bool>();
  d.notes = g.at("notes").get<std::vector<std::string>>();
}

void to_json(Json& j, const ComparisonRow& r) {
  j = {{"label", r.label}, {"m", r.m}, {"proxy_condition", number(r.proxy_condition)}, {"message", r.message}};
  j["beta"] = r.beta ? vector_to_json(*r.beta) : Json(nullptr);
  j["alpha"] = r.alpha ? vector_to_json(*r.alpha) : Json(nullptr);
  j["error"] = r.error ? Json(std::string(to_string(*r.error))) : Json(nullptr);
}

void from_json(const Json& j, ComparisonRow& r) {
  r.label = j.at("label").get<std::string>();
  r.m = j.at("m").get<Index>();
  r.proxy_condition = as_double(j.at("proxy_condition"));
  r.message = j.at("message").get<std::string>();
  r.beta.reset();
  r.alpha.reset();
  r.error.reset();
  if (!j.at("beta").is_null()) r.beta = vector_from_json(j.at("beta"));
  if (!j.at("alpha").is_null()) r.alpha = vector_from_json(j.at("alpha"));
  if (!j.at("error").is_null()) {
    const std::string e = j.at("error").get<std::string>();
    for (int k = 0; k <= static_cast<int>(ErrorKind::Io); ++k) {
      if (to_string(static_cast<ErrorKind>(k)) == e) r.error = static_cast<ErrorKind>(k);
    }
  }
}

#define CCEP_FIELDS(X)                                                                                            \
  X(truth) X(mean_estimate) X(mean_bias) X(bias_mc_se) X(rmse) X(sd) X(mean_se_corrected) X(mean_se_naive)        \
  X(se_ratio_corrected) X(se_ratio_naive) X(mean_corrected_over_naive) X(coverage_corrected) X(coverage_naive) \
  X(coverage_mc_se_corrected) X(coverage_mc_se_naive) X(rejection_rate)

void to_json(Json& j, const CoefficientSummary& c) {
  j = Json::object();
#define CCEP_PUT(f) j[#f] = number(c.f);
  CCEP_FIELDS(CCEP_PUT)
#undef CCEP_PUT
}

void from_json(const Json& j, CoefficientSummary& c) {
#define CCEP_GET(f) c.f = as_double(j.at(#f));
  CCEP_FIELDS(CCEP_GET)
#undef CCEP_GET
}
#undef CCEP_FIELDS

void to_json(Json& j, const EstimatorSummary& s) {
  j = {{"label", s.label},
       {"reps_used", s.reps_used},
       {"failures", s.failures},
       {"non_psd", s.non_psd},
       {"coefficients", s.coefficients},
       {"mc_variance", matrix_to_json(s.mc_variance)}};
}

void from_json(const Json& j, EstimatorSummary& s) {
  s.label = j.at("label").get<std::string>();
  s.reps_used = j.at("reps_used").get<Index>();
  s.failures = j.at("failures").get<std::map<std::string, Index>>();
  s.non_psd = j.at("non_psd").get<Index>();
  s.coefficients = j.at("coefficients").get<std::vector<CoefficientSummary>>();
  s.mc_variance = matrix_from_json(j.at("mc_variance"));
}

void to_json(Json& j, const EfficiencySummary& s) {
  j = {{"baseline", s.baseline},
       {"alternative", s.alternative},
       {"reps_used", s.reps_used},
       {"difference", matrix_to_json(s.difference)},
       {"min_eigenvalue", number(s.min_eigenvalue)},
       {"mc_se", number(s.mc_se)}};
}

void from_json(const Json& j, EfficiencySummary& s) {
  s.baseline = j.at("baseline").get<std::string>();
  s.alternative = j.at("alternative").get<std::string>();
  s.reps_used = j.at("reps_used").get<Index>();
  s.difference = matrix_from_json(j.at("difference"));
  s.min_eigenvalue = as_double(j.at("min_eigenvalue"));
  s.mc_se = as_double(j.at("mc_se"));
}

void to_json(Json& j, const ReplicationRecord& r) {
  j = {{"rep", r.rep},
       {"seed", r.seed},
       {"label", r.label},
       {"error", r.error},
       {"beta", vector_to_json(r.beta)},
       {"se_corrected", vector_to_json(r.se_corrected)},
       {"se_naive", vector_to_json(r.se_naive)}};
}

void from_json(const Json& j, ReplicationRecord& r) {
  r.rep = j.at("rep").get<Index>();
  r.seed = j.at("seed").get<std::uint64_t>();
  r.label = j.at("label").get<std::string>();
  r.error = j.at("error").get<std::string>();
  r.beta = vector_from_json(j.at("beta"));
  r.se_corrected = vector_from_json(j.at("se_corrected"));
  r.se_naive = vector_from_json(j.at("se_naive"));
}

void to_json(Json& j, const McReport& r) {
  j = {{"dgp", r.dgp_name},
       {"units", r.units},
       {"periods", r.periods},
       {"reps", r.reps},
       {"ci_level", r.ci_level},
       {"master_seed", r.master_seed},
       {"truth", vector_to_json(r.truth)},
       {"estimators", r.estimators},
       {"efficiency", r.efficiency ? Json(*r.efficiency) : Json(nullptr)}};
  if (!r.replications.empty()) j["replications"] = r.replications;
}

void from_json(const Json& j, McReport& r) {
  r.dgp_name = j.at("dgp").get<std::string>();
  r.units = j.at("units").get<Index>();
  r.periods = j.at("periods").get<Index>();
  r.reps = j.at("reps").get<Index>();
  r.ci_level = j.at("ci_level").get<double>();
  r.master_seed = j.at("master_seed").get<std::uint64_t>();
  r.truth = vector_from_json(j.at("truth"));
  r.estimators = j.at("estimators").get<std::vector<EstimatorSummary>>();
  r.efficiency.reset();
  if (!j.at("efficiency").is_null()) r.efficiency = j.at("efficiency").get<EfficiencySummary>();
  r.replications.clear();
  if (const auto it = j.find("replications"); it != j.end()) r.replications = it->get<std::vector<ReplicationRecord>>();
}

void to_json(Json& j, const RateDiagnostic& r) {
  j = {{"label", r.label},
       {"units_small", r.units_small},
       {"units_large", r.units_large},
       {"expected", number(r.expected)},
       {"ratio", vector_to_json(r.ratio)},
       {"overall", number(r.overall)}};
}

Json truth_to_json(const DgpTruth& t) {
  Json j = {{"beta", vector_to_json(t.beta)},
            {"alpha", vector_to_json(t.alpha)},
            {"f", matrix_to_json(t.f)},
            {"population_mean", matrix_to_json(t.population_mean)}};
  if (t.gamma.size() != 0) {
    j["gamma"] = matrix_to_json(t.gamma);
    j["beta_i"] = matrix_to_json(t.beta_i);
    j["alpha_i"] = matrix_to_json(t.alpha_i);
    j["errors"] = matrix_to_json(t.errors);
  }
  return j;
}

Json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Io, "cannot open '" + path.string() + "'");
  try {
    return Json::parse(in);
  } catch (const Json::exception& e) {
    throw Error(ErrorKind::InvalidConfig, "'" + path.string() + "' is not valid JSON: " + e.what());
  }
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::Io, "cannot write '" + path.string() + "'");
  out << text;
  if (!out) throw Error(ErrorKind::Io, "write failed for '" + path.string() + "'");
}

std::string format_double(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string format_short(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

}  // namespace ccep
