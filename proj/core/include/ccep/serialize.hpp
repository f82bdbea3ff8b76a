#pragma once

// JSON forms of specs, configs and result documents. Every document written
// here parses back into the same value; doubles keep full round-trip precision.

#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "ccep/dgp.hpp"
#include "ccep/estimator.hpp"
#include "ccep/montecarlo.hpp"
#include "ccep/panel.hpp"
#include "ccep/proxy.hpp"
#include "ccep/variance.hpp"

namespace ccep {

using Json = nlohmann::json;

// Matrices are arrays of rows; vectors are flat arrays. Non-finite values
// are written as null and read back as NaN.
Json matrix_to_json(const Matrix& a);
Matrix matrix_from_json(const Json& j);
Json vector_to_json(const Vector& v);
Vector vector_from_json(const Json& j);

// Keys: kind (const|trend|deterministic|mean_x|mean_y|prod), power,
// indices ([j, l], one-based), values, label. The string form accepted by
// parse_proxy_list is also accepted in place of the array.
void to_json(Json& j, const ProxySpec& s);
void from_json(const Json& j, ProxySpec& s);

// Either a string ("none", "time_dummies", "trend:p", "file:path") or
// {"kind": ..., "power": p, "values": [[...], ...]}.
void to_json(Json& j, const DeterministicSpec& s);
void from_json(const Json& j, DeterministicSpec& s);

// {"label", "proxy", "deterministic"} or {"label", "preset"}.
void to_json(Json& j, const LabeledEstimator& s);
void from_json(const Json& j, LabeledEstimator& s);

void to_json(Json& j, const DgpConfig& c);
/// Accepts {"preset": name, ...overrides} as well as a full description.
void from_json(const Json& j, DgpConfig& c);

void to_json(Json& j, const McConfig& c);
void from_json(const Json& j, McConfig& c);

// Flat summary of one estimation, the payload of `ccep estimate`.
struct EstimateDocument {
  std::vector<std::string> regressors;
  std::string proxy;
  std::string deterministic;
  std::vector<std::string> proxy_columns;
  Index units = 0;
  Index periods = 0;
  Index m = 0;
  Index n_obs = 0;
  Index dof = 0;
  Vector beta;
  Vector alpha;
  bool alpha_structural_zero = false;
  double ci_level = 0.95;
  Vector se_corrected;
  Vector se_naive;
  Vector ci_lower;
  Vector ci_upper;
  Vector ci_lower_naive;
  Vector ci_upper_naive;
  double proxy_condition = 0.0;
  double design_condition = 0.0;
  bool non_psd = false;
  std::vector<std::string> notes;

  friend bool operator==(const EstimateDocument& a, const EstimateDocument& b);
};

EstimateDocument make_estimate_document(const PanelDataset& ds, const EstimateResult& fit, const VarianceResult& v);
void to_json(Json& j, const EstimateDocument& d);
void from_json(const Json& j, EstimateDocument& d);

void to_json(Json& j, const ComparisonRow& r);
void from_json(const Json& j, ComparisonRow& r);

void to_json(Json& j, const CoefficientSummary& c);
void from_json(const Json& j, CoefficientSummary& c);
void to_json(Json& j, const EstimatorSummary& s);
void from_json(const Json& j, EstimatorSummary& s);
void to_json(Json& j, const EfficiencySummary& s);
void from_json(const Json& j, EfficiencySummary& s);
void to_json(Json& j, const ReplicationRecord& r);
void from_json(const Json& j, ReplicationRecord& r);
void to_json(Json& j, const McReport& r);
void from_json(const Json& j, McReport& r);
void to_json(Json& j, const RateDiagnostic& r);

Json truth_to_json(const DgpTruth& t);

/// Reads and parses a JSON file. Throws Error{Io} or Error{InvalidConfig}.
Json read_json_file(const std::filesystem::path& path);
/// Throws Error{Io}.
void write_text_file(const std::filesystem::path& path, const std::string& text);

/// Shortest round-trip decimal form.
std::string format_double(double v);
/// Six significant digits, for human-readable tables.
std::string format_short(double v);

}  // namespace ccep
