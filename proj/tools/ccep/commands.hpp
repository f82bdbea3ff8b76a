#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace ccep::cli {

enum class Format { Json, Csv, Table };

struct Common {
  std::uint64_t seed = 1;
  int jobs = 1;
  std::string out;        // empty: stdout
  Format format = Format::Json;
  std::string config;
  bool verbose = false;
};

struct DataArgs {
  std::string data;
  std::string unit = "unit";
  std::string time = "time";
  std::string y = "y";
  std::vector<std::string> x;   // empty: all remaining columns
};

struct EstimateArgs {
  Common common;
  DataArgs data;
  std::string proxy = "mean_x";
  std::string det = "none";
  double ci = 0.95;
  bool dof_correction = false;
};

struct SimulateArgs {
  Common common;
  std::string preset;
  long units = 200;
  std::string truth;      // default: <out>.truth.json
  bool record_truth = false;
};

struct McArgs {
  Common common;
  std::string preset;
  long units = 500;
  long reps = 100;
  double ci = 0.95;
  std::vector<std::string> estimators;   // preset names or spec strings
  std::string efficiency;                 // "baseline,alternative"
  std::string reps_csv;                   // per-replication dump
  bool dof_correction = false;
};

struct CompareArgs {
  Common common;
  DataArgs data;
  std::vector<std::string> specs;
};

// Exit codes.
inline constexpr int kExitOk = 0;
inline constexpr int kExitInternal = 1;
inline constexpr int kExitData = 2;
inline constexpr int kExitRank = 3;
inline constexpr int kExitConfig = 4;
inline constexpr int kExitIo = 5;

int run_estimate(const EstimateArgs& args);
int run_simulate(const SimulateArgs& args);
int run_mc(const McArgs& args);
int run_compare(const CompareArgs& args);

}  // namespace ccep::cli
