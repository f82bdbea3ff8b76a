#include "ccep/dgp.hpp"

#include <cmath>
#include <numbers>

#include "ccep/error.hpp"
#include "ccep/parallel.hpp"
#include "ccep/rng.hpp"

namespace ccep {
namespace {

using PKind = ProxyColumn::Kind;

[[noreturn]] void invalid(const std::string& what) { throw Error(ErrorKind::InvalidConfig, what); }

void require_shape(const Matrix& a, Index rows, Index cols, const std::string& what) {
  if (a.rows() != rows || a.cols() != cols) {
    invalid(what + " must be " + std::to_string(rows) + " x " + std::to_string(cols) + ", got " +
            std::to_string(a.rows()) + " x " + std::to_string(a.cols()));
  }
  if (!a.allFinite()) invalid(what + " has non-finite entries");
}

void require_optional_shape(const Matrix& a, Index rows, Index cols, const std::string& what) {
  if (a.size() != 0) require_shape(a, rows, cols, what);
}

void require_sd(double v, const std::string& what) {
  if (!std::isfinite(v) || v < 0.0) invalid(what + " must be a finite non-negative standard deviation");
}

Vector or_zero(const Vector& v, Index n) { return v.size() == 0 ? Vector::Zero(n) : v; }
Matrix or_zero(const Matrix& a, Index r, Index c) { return a.size() == 0 ? Matrix::Zero(r, c) : a; }

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

Matrix staggered_mean(Index t, double rho1, double rho2) {
  Matrix mu = Matrix::Zero(t, 2);
  for (Index s = 1; s < t; ++s) mu(s, 0) = rho1;
  mu(t - 1, 1) = rho2;
  return mu;
}

Matrix population_psi(const DgpConfig& c, const Matrix& mu_x) {
  const Index t = c.periods;
  const Index m = c.factors.proxy.width(c.regressors);
  Matrix psi(t, m);
  Index col = 0;
  for (const auto& pc : c.factors.proxy.columns) {
    switch (pc.kind) {
      case PKind::Intercept: psi.col(col++).setOnes(); break;
      case PKind::Trend:
        for (int p = 1; p <= pc.power; ++p) {
          for (Index s = 0; s < t; ++s) psi(s, col) = std::pow(static_cast<double>(s + 1), p);
          ++col;
        }
        break;
      case PKind::Deterministic: psi.col(col++) = pc.values; break;
      case PKind::MeanX:
        psi.middleCols(col, c.regressors) = mu_x;
        col += c.regressors;
        break;
      default: invalid("factor proxies may only contain deterministic columns and mean_x");
    }
  }
  return psi;
}

}  // namespace

Index DgpConfig::factor_count() const {
  switch (factors.kind) {
    case FactorModel::Kind::Explicit: return factors.f.cols();
    case FactorModel::Kind::Bsw: return factors.lambda.cols();
    case FactorModel::Kind::AdditiveEffect: return 1;
    case FactorModel::Kind::LinearTrendHet: return 2;
  }
  return 0;
}

void DgpConfig::validate() const {
  const Index t = periods;
  const Index k = regressors;
  if (t < 2) invalid("T must be at least 2");
  if (k < 1) invalid("k must be at least 1");
  if (beta.size() != k || !beta.allFinite()) invalid("beta must have k finite entries");

  switch (factors.kind) {
    case FactorModel::Kind::Explicit:
      if (factors.f.cols() < 1) invalid("explicit F needs at least one column");
      require_shape(factors.f, t, factors.f.cols(), "F");
      break;
    case FactorModel::Kind::Bsw: {
      if (factors.proxy.columns.empty()) invalid("BSW factors need a proxy template");
      factors.proxy.validate(t, k);
      for (const auto& pc : factors.proxy.columns) {
        if (pc.kind == PKind::MeanY || pc.kind == PKind::MeanProduct) {
          invalid("factor proxies may only contain deterministic columns and mean_x");
        }
      }
      const Index m = factors.proxy.width(k);
      if (m > t) invalid("BSW proxy template has more columns than periods");
      if (factors.lambda.cols() < 1) invalid("Lambda needs at least one column");
      require_shape(factors.lambda, m, factors.lambda.cols(), "Lambda");
      if (regressor_model.kind == RegressorModel::Kind::Scf) invalid("BSW factors cannot be combined with SCF regressors");
      break;
    }
    default: break;
  }
  const Index p = factor_count();

  if (loadings.mean.size() != p || !loadings.mean.allFinite()) invalid("loading mean must have p entries");
  if (loadings.latent.size() != 0 && (loadings.latent.size() != p || !loadings.latent.allFinite())) {
    invalid("loading latent weights must have p entries");
  }
  if (loadings.sd.size() != 0) {
    if (loadings.sd.size() != p) invalid("loading sd must have p entries");
    for (Index j = 0; j < p; ++j) require_sd(loadings.sd(j), "loading sd");
  }

  const auto& rm = regressor_model;
  switch (rm.kind) {
    case RegressorModel::Kind::General:
      require_shape(rm.mean, t, k, "regressor mean");
      require_optional_shape(rm.latent_shift, t, k, "regressor latent shift");
      require_sd(rm.noise_sd, "regressor noise sd");
      if (!std::isfinite(rm.scale_dispersion)) invalid("scale dispersion must be finite");
      break;
    case RegressorModel::Kind::Scf:
      require_shape(rm.gamma_mean, p, k, "Gamma mean");
      require_optional_shape(rm.gamma_latent, p, k, "Gamma latent weights");
      require_sd(rm.gamma_sd, "Gamma sd");
      require_sd(rm.noise_sd, "regressor noise sd");
      break;
    case RegressorModel::Kind::StaggeredBinary:
      if (k != 2) invalid("staggered binary regressors need k = 2");
      if (t < 3) invalid("staggered binary regressors need T >= 3");
      if (!(rm.rho1 >= 0.0 && rm.rho2 >= 0.0 && rm.rho1 + rm.rho2 <= 1.0)) {
        invalid("adoption fractions must be non-negative and sum to at most one");
      }
      break;
  }

  require_sd(errors.sd, "error sd");
  if (errors.kind == ErrorModel::Kind::Ar1 && !(std::abs(errors.rho) < 1.0)) invalid("AR(1) coefficient must satisfy |rho| < 1");
  if (errors.kind == ErrorModel::Kind::Heteroskedastic && !(errors.het >= 0.0)) invalid("heteroskedasticity must be >= 0");

  require_sd(slopes.b_sd, "slope sd");
  require_sd(slopes.a_sd, "alpha slope sd");
  if (!std::isfinite(slopes.b_latent) || !std::isfinite(slopes.b_scale)) invalid("slope weights must be finite");

  if (d.size() != 0) {
    require_shape(d, t, d.cols(), "D");
    if (alpha.size() != d.cols() || !alpha.allFinite()) invalid("alpha must have one entry per column of D");
  } else {
    if (alpha.size() != 0) invalid("alpha given without D");
    if (slopes.a_sd != 0.0) invalid("alpha heterogeneity requires D");
  }
}

Matrix population_regressor_mean(const DgpConfig& c) {
  switch (c.regressor_model.kind) {
    case RegressorModel::Kind::General: return c.regressor_model.mean;
    case RegressorModel::Kind::StaggeredBinary:
      return staggered_mean(c.periods, c.regressor_model.rho1, c.regressor_model.rho2);
    case RegressorModel::Kind::Scf: return factor_matrix(c) * c.regressor_model.gamma_mean;
  }
  return {};
}

Matrix factor_matrix(const DgpConfig& c) {
  const Index t = c.periods;
  switch (c.factors.kind) {
    case FactorModel::Kind::Explicit: return c.factors.f;
    case FactorModel::Kind::AdditiveEffect: return Matrix::Ones(t, 1);
    case FactorModel::Kind::LinearTrendHet: {
      Matrix f(t, 2);
      f.col(0).setOnes();
      for (Index s = 0; s < t; ++s) f(s, 1) = static_cast<double>(s + 1);
      return f;
    }
    case FactorModel::Kind::Bsw: return population_psi(c, population_regressor_mean(c)) * c.factors.lambda;
  }
  return {};
}

Simulated generate(const DgpConfig& config, Index units, std::uint64_t seed, int jobs) {
  config.validate();
  if (units < 2) invalid("N must be at least 2");
  const Index t = config.periods;
  const Index k = config.regressors;
  const Index p = config.factor_count();
  const Index r = config.d.cols();
  const Matrix f = factor_matrix(config);
  const auto& rm = config.regressor_model;
  const Vector l_latent = or_zero(config.loadings.latent, p);
  const Vector l_sd = or_zero(config.loadings.sd, p);
  const Matrix shift = or_zero(rm.latent_shift, t, k);
  const Matrix g_latent = or_zero(rm.gamma_latent, p, k);
  const bool record = config.record_truth;

  Vector y(units * t);
  Matrix x(units * t, k);
  DgpTruth truth;
  truth.beta = config.beta;
  truth.alpha = config.alpha;
  truth.f = f;
  truth.population_mean = population_regressor_mean(config);
  if (record) {
    truth.gamma.resize(p, units);
    truth.beta_i.resize(k, units);
    truth.alpha_i.resize(r, units);
    truth.errors.resize(t, units);
  }

  for_each_chunk(units, jobs, [&](const ChunkRange& chunk) {
    Matrix xi(t, k);
    Vector e(t);
    Vector gamma(p);
    Vector bi(k);
    Vector ai(r);
    for (Index i = chunk.begin; i < chunk.end; ++i) {
      Engine eng = substream(seed, static_cast<std::uint64_t>(i));
      std::normal_distribution<double> normal;
      const double h = normal(eng);
      const double w = normal(eng);

      for (Index j = 0; j < p; ++j) gamma(j) = config.loadings.mean(j) + l_latent(j) * h + l_sd(j) * normal(eng);

      switch (rm.kind) {
        case RegressorModel::Kind::General: {
          const double scale = rm.noise_sd * std::exp(rm.scale_dispersion * w / 2.0);
          for (Index j = 0; j < k; ++j) {
            for (Index s = 0; s < t; ++s) xi(s, j) = rm.mean(s, j) + shift(s, j) * h + scale * normal(eng);
          }
          break;
        }
        case RegressorModel::Kind::Scf: {
          Matrix g(p, k);
          for (Index j = 0; j < k; ++j) {
            for (Index q = 0; q < p; ++q) g(q, j) = rm.gamma_mean(q, j) + g_latent(q, j) * h + rm.gamma_sd * normal(eng);
          }
          xi = f * g;
          for (Index j = 0; j < k; ++j) {
            for (Index s = 0; s < t; ++s) xi(s, j) += rm.noise_sd * normal(eng);
          }
          break;
        }
        case RegressorModel::Kind::StaggeredBinary: {
          const double u = normal_cdf(h);
          xi.setZero();
          if (u < rm.rho1) {
            xi.col(0).tail(t - 1).setOnes();
          } else if (u < rm.rho1 + rm.rho2) {
            xi(t - 1, 1) = 1.0;
          }
          break;
        }
      }

      for (Index j = 0; j < k; ++j) {
        bi(j) = config.slopes.b_sd * normal(eng) + config.slopes.b_latent * h + config.slopes.b_scale * w;
      }
      for (Index j = 0; j < r; ++j) ai(j) = config.slopes.a_sd * normal(eng);

      const auto& em = config.errors;
      switch (em.kind) {
        case ErrorModel::Kind::IidNormal:
          for (Index s = 0; s < t; ++s) e(s) = em.sd * normal(eng);
          break;
        case ErrorModel::Kind::Ar1:
          e(0) = em.sd * normal(eng) / std::sqrt(1.0 - em.rho * em.rho);
          for (Index s = 1; s < t; ++s) e(s) = em.rho * e(s - 1) + em.sd * normal(eng);
          break;
        case ErrorModel::Kind::Heteroskedastic: {
          const double sd = em.sd * std::sqrt(1.0 + em.het * h * h);
          for (Index s = 0; s < t; ++s) e(s) = sd * normal(eng);
          break;
        }
      }

      auto yi = y.segment(i * t, t);
      yi = xi * (config.beta + bi) + f * gamma + e;
      if (r > 0) yi += config.d * (config.alpha + ai);
      x.middleRows(i * t, t) = xi;
      if (record) {
        truth.gamma.col(i) = gamma;
        truth.beta_i.col(i) = config.beta + bi;
        truth.alpha_i.col(i) = config.alpha + ai;
        truth.errors.col(i) = e;
      }
    }
  });

  std::vector<std::string> names;
  for (Index j = 1; j <= k; ++j) names.push_back("x" + std::to_string(j));
  return Simulated{PanelDataset(units, t, std::move(y), std::move(x), {}, {}, std::move(names)), std::move(truth)};
}

}  // namespace ccep
