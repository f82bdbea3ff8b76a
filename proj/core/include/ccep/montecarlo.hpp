#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ccep/dgp.hpp"
#include "ccep/estimator.hpp"
#include "ccep/matops.hpp"

namespace ccep {

struct EfficiencyPair {
  std::string baseline;     // expected to be the more efficient estimator
  std::string alternative;
};

struct McConfig {
  DgpConfig dgp;
  std::vector<LabeledEstimator> estimators;
  Index units = 500;
  Index reps = 100;
  double ci_level = 0.95;
  std::uint64_t master_seed = 1;
  int workers = 1;
  bool dof_correction = false;
  bool keep_replications = false;
  std::optional<EfficiencyPair> efficiency;

  /// Throws Error{InvalidConfig}.
  void validate() const;
};

/// Seed of replication `rep`: substream_seed(master_seed, rep).
std::uint64_t replication_seed(std::uint64_t master_seed, Index rep);

struct CoefficientSummary {
  double truth = 0.0;
  double mean_estimate = 0.0;
  double mean_bias = 0.0;
  double bias_mc_se = 0.0;          // sd / sqrt(reps_used)
  double rmse = 0.0;
  double sd = 0.0;                  // of the estimates
  double mean_se_corrected = 0.0;
  double mean_se_naive = 0.0;
  double se_ratio_corrected = 0.0;  // mean_se_corrected / sd
  double se_ratio_naive = 0.0;
  double mean_corrected_over_naive = 0.0;  // average per-rep se_corrected / se_naive
  double coverage_corrected = 0.0;
  double coverage_naive = 0.0;
  double coverage_mc_se_corrected = 0.0;   // sqrt(c (1 - c) / reps_used)
  double coverage_mc_se_naive = 0.0;
  double rejection_rate = 0.0;             // corrected t-test of the true value at 1 - ci_level
};

struct EstimatorSummary {
  std::string label;
  Index reps_used = 0;
  std::map<std::string, Index> failures;   // error kind -> count
  Index non_psd = 0;
  std::vector<CoefficientSummary> coefficients;
  Matrix mc_variance;                      // k x k sample covariance of the estimates
};

struct EfficiencySummary {
  std::string baseline;
  std::string alternative;
  Index reps_used = 0;                     // replications where both succeeded
  Matrix difference;                       // Var_MC(alternative) - Var_MC(baseline)
  double min_eigenvalue = 0.0;
  double mc_se = 0.0;                      // s^2 sqrt(2 / (R - 1)) for the smallest variance entry
};

struct ReplicationRecord {
  Index rep = 0;
  std::uint64_t seed = 0;
  std::string label;
  std::string error;                       // empty on success
  Vector beta;
  Vector se_corrected;
  Vector se_naive;
};

struct McReport {
  std::string dgp_name;
  Index units = 0;
  Index periods = 0;
  Index reps = 0;
  double ci_level = 0.95;
  std::uint64_t master_seed = 0;
  Vector truth;
  std::vector<EstimatorSummary> estimators;
  std::optional<EfficiencySummary> efficiency;
  std::vector<ReplicationRecord> replications;  // only with keep_replications

  const EstimatorSummary& estimator(const std::string& label) const;
};

/// Called after each finished replication with the number completed so far.
using ProgressFn = std::function<void(Index done, Index total)>;

McReport run(const McConfig& config, const ProgressFn& progress = {});

struct RateDiagnostic {
  std::string label;
  Index units_small = 0;
  Index units_large = 0;
  double expected = 0.0;            // sqrt(units_large / units_small)
  Vector ratio;                     // per coefficient RMSE(small) / RMSE(large)
  double overall = 0.0;             // sqrt(sum rmse_small^2 / sum rmse_large^2)
};

/// Throws Error{InvalidConfig} when the reports come from different DGPs,
/// periods or confidence levels, lack the estimator, or units_large < units_small.
RateDiagnostic rate_check(const McReport& small, const McReport& large, const std::string& label);

}  // namespace ccep
