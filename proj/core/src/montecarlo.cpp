#include "ccep/montecarlo.hpp"

#include <atomic>
#include <cmath>
#include <set>

#include "ccep/error.hpp"
#include "ccep/parallel.hpp"
#include "ccep/rng.hpp"
#include "ccep/variance.hpp"

namespace ccep {
namespace {

struct Outcome {
  bool ok = false;
  std::string error;
  Vector beta;
  Vector se_corrected;
  Vector se_naive;
  Vector lower, upper, lower_naive, upper_naive;
  bool non_psd = false;
};

Matrix sample_covariance(const std::vector<const Vector*>& xs, Index k) {
  const double n = static_cast<double>(xs.size());
  Vector mean = Vector::Zero(k);
  for (const Vector* x : xs) mean += *x;
  mean /= n;
  Matrix cov = Matrix::Zero(k, k);
  for (const Vector* x : xs) {
    const Vector d = *x - mean;
    cov.noalias() += d * d.transpose();
  }
  return n > 1.0 ? Matrix(cov / (n - 1.0)) : Matrix(Matrix::Zero(k, k));
}

}  // namespace

void McConfig::validate() const {
  dgp.validate();
  if (reps < 1) throw Error(ErrorKind::InvalidConfig, "reps must be at least 1");
  if (units < 2) throw Error(ErrorKind::InvalidConfig, "N must be at least 2");
  if (!(ci_level > 0.0 && ci_level < 1.0)) throw Error(ErrorKind::InvalidConfig, "ci level must lie in (0, 1)");
  if (estimators.empty()) throw Error(ErrorKind::InvalidConfig, "at least one estimator is required");
  std::set<std::string> labels;
  for (const auto& e : estimators) {
    if (e.label.empty()) throw Error(ErrorKind::InvalidConfig, "estimator labels must be non-empty");
    if (!labels.insert(e.label).second) throw Error(ErrorKind::InvalidConfig, "duplicate estimator label '" + e.label + "'");
  }
  if (efficiency) {
    if (!labels.count(efficiency->baseline) || !labels.count(efficiency->alternative)) {
      throw Error(ErrorKind::InvalidConfig, "efficiency comparison names an unknown estimator");
    }
  }
}

std::uint64_t replication_seed(std::uint64_t master_seed, Index rep) {
  return substream_seed(master_seed, static_cast<std::uint64_t>(rep));
}

const EstimatorSummary& McReport::estimator(const std::string& label) const {
  for (const auto& e : estimators) {
    if (e.label == label) return e;
  }
  throw Error(ErrorKind::InvalidConfig, "report has no estimator '" + label + "'");
}

McReport run(const McConfig& config, const ProgressFn& progress) {
  config.validate();
  const Index reps = config.reps;
  const Index ne = static_cast<Index>(config.estimators.size());
  const Index k = config.dgp.regressors;

  // outcomes[rep * ne + e], filled independently and merged in rep order.
  std::vector<Outcome> outcomes(static_cast<std::size_t>(reps * ne));
  std::atomic<Index> done{0};
  VarianceOptions vopt;
  vopt.ci_level = config.ci_level;
  vopt.dof_correction = config.dof_correction;

  for_each_chunk(
      reps, config.workers,
      [&](const ChunkRange& c) {
        for (Index rep = c.begin; rep < c.end; ++rep) {
          const std::uint64_t seed = replication_seed(config.master_seed, rep);
          std::optional<Simulated> sim;
          std::string gen_error;
          try {
            sim.emplace(generate(config.dgp, config.units, seed, 1));
          } catch (const Error& e) {
            gen_error = std::string(to_string(e.kind()));
          }
          for (Index e = 0; e < ne; ++e) {
            Outcome& out = outcomes[static_cast<std::size_t>(rep * ne + e)];
            if (!sim) {
              out.error = gen_error;
              continue;
            }
            try {
              const EstimateResult fit = ccep_fit(sim->data, config.estimators[static_cast<std::size_t>(e)].spec);
              const VarianceResult v = estimate_variance(sim->data, fit, vopt);
              out.ok = true;
              out.beta = fit.beta;
              out.se_corrected = v.se_corrected;
              out.se_naive = v.se_naive;
              out.lower = v.ci_lower;
              out.upper = v.ci_upper;
              out.lower_naive = v.ci_lower_naive;
              out.upper_naive = v.ci_upper_naive;
              out.non_psd = v.non_psd;
            } catch (const Error& err) {
              out.error = std::string(to_string(err.kind()));
            }
          }
          const Index finished = ++done;
          if (progress) progress(finished, reps);
        }
      },
      1);

  McReport report;
  report.dgp_name = config.dgp.name;
  report.units = config.units;
  report.periods = config.dgp.periods;
  report.reps = reps;
  report.ci_level = config.ci_level;
  report.master_seed = config.master_seed;
  report.truth = config.dgp.beta;

  for (Index e = 0; e < ne; ++e) {
    EstimatorSummary s;
    s.label = config.estimators[static_cast<std::size_t>(e)].label;
    std::vector<const Outcome*> ok;
    for (Index rep = 0; rep < reps; ++rep) {
      const Outcome& o = outcomes[static_cast<std::size_t>(rep * ne + e)];
      if (o.ok) {
        ok.push_back(&o);
        if (o.non_psd) ++s.non_psd;
      } else {
        ++s.failures[o.error];
      }
    }
    s.reps_used = static_cast<Index>(ok.size());
    s.coefficients.resize(static_cast<std::size_t>(k));
    const double n = static_cast<double>(ok.size());
    std::vector<const Vector*> betas;
    for (const Outcome* o : ok) betas.push_back(&o->beta);
    s.mc_variance = sample_covariance(betas, k);
    for (Index j = 0; j < k; ++j) {
      CoefficientSummary& cs = s.coefficients[static_cast<std::size_t>(j)];
      const double truth = config.dgp.beta(j);
      cs.truth = truth;
      if (ok.empty()) continue;
      double sum = 0, sq = 0, se_c = 0, se_n = 0, ratio = 0, cov_c = 0, cov_n = 0;
      for (const Outcome* o : ok) {
        const double b = o->beta(j);
        sum += b;
        sq += (b - truth) * (b - truth);
        se_c += o->se_corrected(j);
        se_n += o->se_naive(j);
        ratio += o->se_naive(j) > 0.0 ? o->se_corrected(j) / o->se_naive(j) : 0.0;
        cov_c += (o->lower(j) <= truth && truth <= o->upper(j)) ? 1.0 : 0.0;
        cov_n += (o->lower_naive(j) <= truth && truth <= o->upper_naive(j)) ? 1.0 : 0.0;
      }
      cs.mean_estimate = sum / n;
      cs.mean_bias = cs.mean_estimate - truth;
      cs.rmse = std::sqrt(sq / n);
      cs.sd = std::sqrt(s.mc_variance(j, j));
      cs.bias_mc_se = cs.sd / std::sqrt(n);
      cs.mean_se_corrected = se_c / n;
      cs.mean_se_naive = se_n / n;
      cs.se_ratio_corrected = cs.sd > 0.0 ? cs.mean_se_corrected / cs.sd : 0.0;
      cs.se_ratio_naive = cs.sd > 0.0 ? cs.mean_se_naive / cs.sd : 0.0;
      cs.mean_corrected_over_naive = ratio / n;
      cs.coverage_corrected = cov_c / n;
      cs.coverage_naive = cov_n / n;
      cs.coverage_mc_se_corrected = std::sqrt(cs.coverage_corrected * (1.0 - cs.coverage_corrected) / n);
      cs.coverage_mc_se_naive = std::sqrt(cs.coverage_naive * (1.0 - cs.coverage_naive) / n);
      cs.rejection_rate = 1.0 - cs.coverage_corrected;
    }
    report.estimators.push_back(std::move(s));
  }

  if (config.efficiency) {
    Index base = 0, alt = 0;
    for (Index e = 0; e < ne; ++e) {
      if (config.estimators[static_cast<std::size_t>(e)].label == config.efficiency->baseline) base = e;
      if (config.estimators[static_cast<std::size_t>(e)].label == config.efficiency->alternative) alt = e;
    }
    std::vector<const Vector*> bb, ba;
    for (Index rep = 0; rep < reps; ++rep) {
      const Outcome& ob = outcomes[static_cast<std::size_t>(rep * ne + base)];
      const Outcome& oa = outcomes[static_cast<std::size_t>(rep * ne + alt)];
      if (ob.ok && oa.ok) {
        bb.push_back(&ob.beta);
        ba.push_back(&oa.beta);
      }
    }
    EfficiencySummary es;
    es.baseline = config.efficiency->baseline;
    es.alternative = config.efficiency->alternative;
    es.reps_used = static_cast<Index>(bb.size());
    const Matrix vb = sample_covariance(bb, k);
    const Matrix va = sample_covariance(ba, k);
    es.difference = va - vb;
    es.min_eigenvalue = Eigen::SelfAdjointEigenSolver<Matrix>(es.difference, Eigen::EigenvaluesOnly).eigenvalues().minCoeff();
    const double smallest = std::min(vb.diagonal().minCoeff(), va.diagonal().minCoeff());
    es.mc_se = es.reps_used > 1 ? smallest * std::sqrt(2.0 / static_cast<double>(es.reps_used - 1)) : 0.0;
    report.efficiency = std::move(es);
  }

  if (config.keep_replications) {
    for (Index rep = 0; rep < reps; ++rep) {
      for (Index e = 0; e < ne; ++e) {
        const Outcome& o = outcomes[static_cast<std::size_t>(rep * ne + e)];
        report.replications.push_back(ReplicationRecord{rep, replication_seed(config.master_seed, rep),
                                                        config.estimators[static_cast<std::size_t>(e)].label,
                                                        o.ok ? std::string{} : o.error, o.beta, o.se_corrected,
                                                        o.se_naive});
      }
    }
  }
  return report;
}

RateDiagnostic rate_check(const McReport& small, const McReport& large, const std::string& label) {
  if (small.dgp_name != large.dgp_name || small.periods != large.periods || small.ci_level != large.ci_level ||
      small.truth != large.truth) {
    throw Error(ErrorKind::InvalidConfig, "rate check needs two reports from the same DGP");
  }
  if (large.units < small.units) throw Error(ErrorKind::InvalidConfig, "rate check expects units_large >= units_small");
  const EstimatorSummary& s = small.estimator(label);
  const EstimatorSummary& l = large.estimator(label);
  RateDiagnostic r;
  r.label = label;
  r.units_small = small.units;
  r.units_large = large.units;
  r.expected = std::sqrt(static_cast<double>(large.units) / static_cast<double>(small.units));
  const Index k = static_cast<Index>(s.coefficients.size());
  r.ratio.resize(k);
  double ss = 0.0, sl = 0.0;
  for (Index j = 0; j < k; ++j) {
    const double a = s.coefficients[static_cast<std::size_t>(j)].rmse;
    const double b = l.coefficients[static_cast<std::size_t>(j)].rmse;
    r.ratio(j) = a / b;
    ss += a * a;
    sl += b * b;
  }
  r.overall = std::sqrt(ss / sl);
  return r;
}

}  // namespace ccep
