#include <algorithm>

#include "ccep/dgp.hpp"
#include "ccep/error.hpp"

namespace ccep {
namespace {

Matrix cols(std::initializer_list<std::initializer_list<double>> columns) {
  const Index c = static_cast<Index>(columns.size());
  const Index r = static_cast<Index>(columns.begin()->size());
  Matrix out(r, c);
  Index j = 0;
  for (const auto& col : columns) {
    Index i = 0;
    for (double v : col) out(i++, j) = v;
    ++j;
  }
  return out;
}

Vector vecof(std::initializer_list<double> v) {
  Vector out(static_cast<Index>(v.size()));
  Index i = 0;
  for (double x : v) out(i++) = x;
  return out;
}

// Means for T = 6, k = 2 that are not spanned by (1, t).
Matrix mean_t6() {
  return cols({{1.0, 1.6, 0.9, 1.8, 1.2, 2.1}, {0.5, -0.2, 0.8, 0.1, 1.0, 0.4}});
}

DgpConfig additive_effect() {
  DgpConfig c;
  c.name = "additive-effect";
  c.description = "single additive unit effect correlated with the regressors";
  c.periods = 5;
  c.regressors = 2;
  c.beta = vecof({1.0, -0.5});
  c.factors.kind = FactorModel::Kind::AdditiveEffect;
  c.loadings = {vecof({0.0}), vecof({1.0}), vecof({0.5})};
  c.regressor_model.mean = cols({{0.2, 0.4, 0.6, 0.8, 1.0}, {1.0, 0.5, 0.0, 0.5, 1.0}});
  c.regressor_model.latent_shift = Matrix::Ones(5, 2);
  return c;
}

DgpConfig staggered_binary() {
  DgpConfig c;
  c.name = "staggered-binary";
  c.description = "two staggered adoption indicators assigned by thresholding the latent";
  c.periods = 3;
  c.regressors = 2;
  c.beta = vecof({1.0, 0.5});
  c.factors.kind = FactorModel::Kind::Bsw;
  c.factors.proxy.columns = {ProxyColumn::mean_x()};
  c.factors.lambda = cols({{1.0, 1.0}});
  c.loadings = {vecof({1.0}), vecof({0.8}), vecof({0.5})};
  c.regressor_model.kind = RegressorModel::Kind::StaggeredBinary;
  c.regressor_model.rho1 = 0.5;
  c.regressor_model.rho2 = 0.25;
  return c;
}

Matrix f_t6_two() { return cols({{1, 1, 1, 1, 1, 1}, {0.0, 0.8, 0.3, 1.2, 0.6, 1.5}}); }

DgpConfig scf_p_equals_k() {
  DgpConfig c;
  c.name = "scf-p-equals-k";
  c.description = "strong common factor regressors, two factors and two regressors";
  c.periods = 6;
  c.regressors = 2;
  c.beta = vecof({1.0, 1.0});
  c.factors.kind = FactorModel::Kind::Explicit;
  c.factors.f = f_t6_two();
  c.loadings = {vecof({1.0, 0.5}), vecof({0.5, 0.5}), vecof({0.5, 0.5})};
  c.regressor_model.kind = RegressorModel::Kind::Scf;
  c.regressor_model.gamma_mean = cols({{1.0, 0.3}, {0.2, 1.0}});
  c.regressor_model.gamma_latent = Matrix::Constant(2, 2, 0.3);
  c.regressor_model.gamma_sd = 0.3;
  return c;
}

DgpConfig scf_p_equals_k_plus_1() {
  DgpConfig c;
  c.name = "scf-p-equals-k-plus-1";
  c.description = "strong common factor regressors with one more factor than regressors; (gamma, Gamma) nonsingular";
  c.periods = 6;
  c.regressors = 2;
  c.beta = vecof({1.0, 1.0});
  c.factors.kind = FactorModel::Kind::Explicit;
  c.factors.f = cols({{1, 1, 1, 1, 1, 1}, {0.0, 0.8, 0.3, 1.2, 0.6, 1.5}, {1.0, -0.5, 0.7, 0.0, -1.0, 0.4}});
  c.loadings = {vecof({1.0, 0.0, 1.0}), vecof({0.5, 0.5, 0.5}), vecof({0.5, 0.5, 0.5})};
  c.regressor_model.kind = RegressorModel::Kind::Scf;
  c.regressor_model.gamma_mean = cols({{1.0, 0.3, 0.0}, {0.2, 1.0, 0.0}});
  c.regressor_model.gamma_latent = Matrix::Constant(3, 2, 0.3);
  c.regressor_model.gamma_sd = 0.3;
  return c;
}

DgpConfig bsw_intercept_trend() {
  DgpConfig c;
  c.name = "bsw-intercept-trend";
  c.description = "factors spanned by (1, t, E[X_i])";
  c.periods = 6;
  c.regressors = 2;
  c.beta = vecof({1.0, -1.0});
  c.factors.kind = FactorModel::Kind::Bsw;
  c.factors.proxy.columns = {ProxyColumn::intercept(), ProxyColumn::trend(1), ProxyColumn::mean_x()};
  c.factors.lambda = cols({{1.0, 0.2, 0.5, 0.0}, {0.0, 0.5, 0.0, 1.0}});
  c.loadings = {vecof({1.0, 0.5}), vecof({0.7, 0.7}), vecof({0.5, 0.5})};
  c.regressor_model.mean = mean_t6();
  c.regressor_model.latent_shift = cols({{1.0, 0.5, 0.0, -0.5, 0.3, 0.8}, {0.2, 0.6, -0.4, 0.0, 0.9, -0.3}});
  return c;
}

DgpConfig random_slopes(bool satisfied) {
  DgpConfig c;
  c.periods = 5;
  c.regressors = 2;
  c.beta = vecof({1.0, 0.5});
  c.factors.kind = FactorModel::Kind::Bsw;
  c.factors.proxy.columns = {ProxyColumn::intercept(), ProxyColumn::mean_x()};
  c.factors.lambda = cols({{1.0, 0.5, 0.5}});
  c.loadings = {vecof({1.0}), vecof({0.8}), vecof({0.5})};
  c.regressor_model.mean = cols({{1.0, 1.6, 0.9, 1.8, 1.2}, {0.5, -0.2, 0.8, 0.1, 1.0}});
  // Time-constant shifts lie in the span of the intercept proxy.
  c.regressor_model.latent_shift = cols({{1.0, 1.0, 1.0, 1.0, 1.0}, {0.5, 0.5, 0.5, 0.5, 0.5}});
  if (satisfied) {
    c.name = "random-slopes-a6-satisfied";
    c.description = "random slopes tied to the latent, which only shifts regressor levels";
    c.slopes.b_sd = 0.5;
    c.slopes.b_latent = 0.5;
  } else {
    c.name = "random-slopes-a6-violated";
    c.description = "random slopes tied to the regressor noise scale";
    c.regressor_model.scale_dispersion = 0.8;
    c.slopes.b_scale = 1.0;
  }
  return c;
}

DgpConfig ideal_homoskedastic() {
  DgpConfig c;
  c.name = "ideal-homoskedastic";
  c.description = "loadings independent of the regressors, iid errors, trend with homogeneous coefficient";
  c.periods = 6;
  c.regressors = 2;
  c.beta = vecof({1.0, 0.5});
  c.factors.kind = FactorModel::Kind::Bsw;
  c.factors.proxy.columns = {ProxyColumn::mean_x()};
  c.factors.lambda = cols({{1.0, 0.5}});
  c.loadings = {vecof({1.0}), vecof({0.0}), vecof({1.0})};
  c.regressor_model.mean = mean_t6();
  c.regressor_model.latent_shift = cols({{1.0, 0.5, 0.0, -0.5, 0.3, 0.8}, {0.2, 0.6, -0.4, 0.0, 0.9, -0.3}});
  c.d = cols({{1, 2, 3, 4, 5, 6}});
  c.alpha = vecof({0.5});
  return c;
}

DgpConfig re_style() {
  DgpConfig c;
  c.name = "re-style";
  c.description = "loadings and errors independent of the regressors, AR(1) errors";
  c.periods = 6;
  c.regressors = 2;
  c.beta = vecof({1.0, 0.5});
  c.factors.kind = FactorModel::Kind::Bsw;
  c.factors.proxy.columns = {ProxyColumn::mean_x()};
  c.factors.lambda = cols({{1.0, 0.0}, {0.0, 1.0}});
  c.loadings = {vecof({1.0, 1.0}), vecof({0.0, 0.0}), vecof({1.0, 1.0})};
  c.regressor_model.mean = mean_t6();
  c.regressor_model.latent_shift = cols({{1.0, 0.5, 0.0, -0.5, 0.3, 0.8}, {0.2, 0.6, -0.4, 0.0, 0.9, -0.3}});
  c.errors.kind = ErrorModel::Kind::Ar1;
  c.errors.rho = 0.5;
  return c;
}

DgpConfig bsw_correlated_loadings() {
  DgpConfig c;
  c.name = "bsw-correlated-loadings";
  c.description = "factors spanned by E[X_i], loadings strongly tied to the regressor latent";
  c.periods = 6;
  c.regressors = 2;
  c.beta = vecof({1.0, 0.5});
  c.factors.kind = FactorModel::Kind::Bsw;
  c.factors.proxy.columns = {ProxyColumn::mean_x()};
  c.factors.lambda = cols({{1.0, 0.0}, {0.0, 1.0}});
  c.loadings = {vecof({1.0, 1.0}), vecof({1.5, 1.5}), vecof({0.3, 0.3})};
  c.regressor_model.mean = mean_t6();
  c.regressor_model.latent_shift = cols({{1.0, 0.5, 0.0, -0.5, 0.3, 0.8}, {0.2, 0.6, -0.4, 0.0, 0.9, -0.3}});
  c.errors.sd = 0.5;
  return c;
}

}  // namespace

std::vector<DgpConfig> presets() {
  return {additive_effect(),     staggered_binary(),     scf_p_equals_k(),       scf_p_equals_k_plus_1(),
          bsw_intercept_trend(), random_slopes(true),    random_slopes(false),   ideal_homoskedastic(),
          re_style(),            bsw_correlated_loadings()};
}

std::vector<std::string> preset_names() {
  std::vector<std::string> out;
  for (const auto& c : presets()) out.push_back(c.name);
  return out;
}

DgpConfig preset(const std::string& name) {
  for (auto& c : presets()) {
    if (c.name == name) return c;
  }
  throw Error(ErrorKind::InvalidConfig, "unknown DGP preset '" + name + "'");
}

}  // namespace ccep
