// ccep: estimate, simulate, mc, compare.
#include <filesystem>
#include <functional>
#include <iostream>
#include <map>
#include <set>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include <ccep/dgp.hpp>
#include <ccep/error.hpp>
#include <ccep/serialize.hpp>

#include "commands.hpp"

namespace {

using namespace ccep::cli;
using ccep::Error;
using ccep::ErrorKind;
using ccep::Json;

int exit_code(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::UnbalancedPanel:
    case ErrorKind::MissingValue:
    case ErrorKind::DuplicateObservation:
    case ErrorKind::SchemaMismatch: return kExitData;
    case ErrorKind::RankDeficient:
    case ErrorKind::TooFewPeriods:
    case ErrorKind::TooManyProxies: return kExitRank;
    case ErrorKind::InvalidConfig:
    case ErrorKind::DimensionMismatch: return kExitConfig;
    case ErrorKind::Io: return kExitIo;
  }
  return kExitInternal;
}

int report_error(const std::string& kind, const std::string& message, int code) {
  const Json j = {{"error", {{"kind", kind}, {"message", message}, {"exit_code", code}}}};
  std::cerr << j.dump() << "\n";
  return code;
}

void check_output_path(const std::string& path) {
  if (path.empty()) return;
  const auto parent = std::filesystem::path(path).parent_path();
  if (!parent.empty() && !std::filesystem::is_directory(parent)) {
    throw Error(ErrorKind::Io, "output directory '" + parent.string() + "' does not exist");
  }
}

const std::map<std::string, Format> kFormats = {{"json", Format::Json}, {"csv", Format::Csv}, {"table", Format::Table}};

void add_common(CLI::App& app, Common& c) {
  app.add_option("--seed", c.seed, "Random seed (master seed for mc)");
  app.add_option("--jobs", c.jobs, "Worker threads; results do not depend on it")->check(CLI::PositiveNumber);
  app.add_option("--out", c.out, "Output file (default: standard output)");
  app.add_option("--format", c.format, "Output format: json, csv or table")
      ->transform(CLI::CheckedTransformer(kFormats, CLI::ignore_case));
  app.add_option("--config", c.config, "JSON config; explicit flags take precedence")->check(CLI::ExistingFile);
  app.add_flag("-v,--verbose", c.verbose, "Progress messages on standard error");
}

void add_data(CLI::App& app, DataArgs& d) {
  app.add_option("--data", d.data, "Long-format panel CSV");
  app.add_option("--unit", d.unit, "Unit identifier column")->capture_default_str();
  app.add_option("--time", d.time, "Period column")->capture_default_str();
  app.add_option("--y", d.y, "Outcome column")->capture_default_str();
  app.add_option("--x", d.x, "Regressor columns, comma separated (default: all others)")->delimiter(',');
}

struct Commands {
  EstimateArgs estimate;
  SimulateArgs simulate;
  McArgs mc;
  CompareArgs compare;
};

// Builds the full command tree bound to `cmd`.
void build(CLI::App& app, Commands& cmd) {
  app.require_subcommand(1);
  app.set_version_flag("--version", "ccep 0.1.0");

  auto* est = app.add_subcommand("estimate", "Fit a CCEP specification to a panel CSV with corrected inference");
  add_common(*est, cmd.estimate.common);
  add_data(*est, cmd.estimate.data);
  est->add_option("--proxy", cmd.estimate.proxy, "Proxies: comma list of const|trend:p|mean_x|mean_y|prod:j,l")
      ->capture_default_str();
  est->add_option("--det", cmd.estimate.det, "Deterministic regressors: none|time_dummies|trend:p|file:path")
      ->capture_default_str();
  est->add_option("--ci", cmd.estimate.ci, "Confidence level")->check(CLI::Range(0.0, 1.0))->capture_default_str();
  est->add_flag("--dof-correction", cmd.estimate.dof_correction, "Scale B by N/(N-k-r)");

  auto* sim = app.add_subcommand("simulate", "Draw a panel from a DGP preset or config and write CSV plus truth");
  add_common(*sim, cmd.simulate.common);
  sim->add_option("--preset", cmd.simulate.preset, "DGP preset name")
      ->check(CLI::IsMember(ccep::preset_names()));
  sim->add_option("--units", cmd.simulate.units, "Number of units N")->check(CLI::Range(2L, 100000000L))
      ->capture_default_str();
  sim->add_option("--truth", cmd.simulate.truth, "Truth document path (default: <out>.truth.json)");
  sim->add_flag("--record-truth", cmd.simulate.record_truth, "Include per-unit loadings, slopes and errors");

  auto* mc = app.add_subcommand("mc", "Run a Monte Carlo study");
  add_common(*mc, cmd.mc.common);
  mc->add_option("--preset", cmd.mc.preset, "DGP preset name")->check(CLI::IsMember(ccep::preset_names()));
  mc->add_option("--units", cmd.mc.units, "Units per replication")->check(CLI::Range(2L, 100000000L))
      ->capture_default_str();
  mc->add_option("--reps", cmd.mc.reps, "Replications")->check(CLI::Range(1L, 100000000L))->capture_default_str();
  mc->add_option("--ci", cmd.mc.ci, "Confidence level")->check(CLI::Range(0.0, 1.0))->capture_default_str();
  mc->add_option("--estimator", cmd.mc.estimators,
                 "Estimator: preset name or 'proxy=...;det=...;label=...' (repeatable)");
  mc->add_option("--efficiency", cmd.mc.efficiency, "Efficiency comparison 'baseline,alternative' by label");
  mc->add_option("--reps-csv", cmd.mc.reps_csv, "Write per-replication estimates to this CSV");
  mc->add_flag("--dof-correction", cmd.mc.dof_correction, "Scale B by N/(N-k-r)");

  auto* cmp = app.add_subcommand("compare", "Fit several specifications to the same panel");
  add_common(*cmp, cmd.compare.common);
  add_data(*cmp, cmd.compare.data);
  cmp->add_option("--spec", cmd.compare.specs, "Preset name or 'proxy=...;det=...;label=...' (repeatable)");
}

std::string option_name(const std::string& key) {
  static const std::map<std::string, std::string> aliases = {
      {"ci_level", "ci"}, {"master_seed", "seed"}, {"workers", "jobs"}, {"specs", "spec"}, {"estimator_list", "estimator"}};
  std::string k = key;
  if (const auto it = aliases.find(k); it != aliases.end()) k = it->second;
  for (char& c : k) {
    if (c == '_') c = '-';
  }
  return "--" + k;
}

std::string scalar_text(const Json& v) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_number_float()) return ccep::format_double(v.get<double>());
  return v.dump();
}

// Turns config keys into arguments for options not given on the command line.
std::vector<std::string> config_arguments(const CLI::App& sub, const Json& config) {
  static const std::set<std::string> structural = {"dgp", "estimators", "efficiency", "keep_replications"};
  if (!config.is_object()) throw Error(ErrorKind::InvalidConfig, "config must be a JSON object");
  std::vector<std::string> args;
  for (const auto& [key, value] : config.items()) {
    const std::string name = option_name(key);
    const CLI::Option* opt = nullptr;
    try {
      opt = sub.get_option(name);
    } catch (const CLI::OptionNotFound&) {
      if (structural.count(key) || (key == "efficiency" && value.is_object())) continue;
      throw Error(ErrorKind::InvalidConfig, "unknown config key '" + key + "' for " + sub.get_name());
    }
    if (name == "--config" || opt->count() > 0) continue;
    if (key == "efficiency" && value.is_object()) continue;
    if (value.is_boolean()) {
      if (opt->get_type_size() == 0) {
        if (value.get<bool>()) args.push_back(name);
        continue;
      }
    }
    if (value.is_array()) {
      for (const auto& item : value) {
        if (!item.is_string()) {
          if (key == "estimators") break;
          throw Error(ErrorKind::InvalidConfig, "config key '" + key + "' must hold strings");
        }
        args.push_back(name);
        args.push_back(item.get<std::string>());
      }
      continue;
    }
    if (value.is_object()) {
      if (structural.count(key)) continue;
      throw Error(ErrorKind::InvalidConfig, "config key '" + key + "' must not be an object");
    }
    args.push_back(name);
    args.push_back(scalar_text(value));
  }
  return args;
}

int dispatch(const CLI::App& app, const Commands& cmd) {
  if (app.got_subcommand("estimate")) {
    check_output_path(cmd.estimate.common.out);
    return run_estimate(cmd.estimate);
  }
  if (app.got_subcommand("simulate")) {
    check_output_path(cmd.simulate.common.out);
    check_output_path(cmd.simulate.truth);
    return run_simulate(cmd.simulate);
  }
  if (app.got_subcommand("mc")) {
    check_output_path(cmd.mc.common.out);
    check_output_path(cmd.mc.reps_csv);
    return run_mc(cmd.mc);
  }
  if (app.got_subcommand("compare")) {
    check_output_path(cmd.compare.common.out);
    return run_compare(cmd.compare);
  }
  return kExitConfig;
}

const std::string* config_path(const CLI::App& app, const Commands& cmd) {
  if (app.got_subcommand("estimate")) return &cmd.estimate.common.config;
  if (app.got_subcommand("simulate")) return &cmd.simulate.common.config;
  if (app.got_subcommand("mc")) return &cmd.mc.common.config;
  if (app.got_subcommand("compare")) return &cmd.compare.common.config;
  return nullptr;
}

}  // namespace

int main(int argc, char** argv) {
  std::vector<std::string> args;
  for (int i = argc - 1; i >= 1; --i) args.emplace_back(argv[i]);  // CLI11 takes them reversed

  Commands cmd;
  CLI::App app{"Common correlated effects estimation for fixed-T panels", "ccep"};
  build(app, cmd);
  try {
    app.parse(args);

    // Second pass: config values fill the options the user did not set.
    const std::string* cfg = config_path(app, cmd);
    if (cfg && !cfg->empty()) {
      const Json config = ccep::read_json_file(*cfg);
      const CLI::App* sub = app.get_subcommands().front();
      std::vector<std::string> extra = config_arguments(*sub, config);
      if (!extra.empty()) {
        std::vector<std::string> merged;
        for (int i = argc - 1; i >= 1; --i) merged.emplace_back(argv[i]);
        // Config arguments go after the subcommand name (last in reversed order).
        std::vector<std::string> reversed(extra.rbegin(), extra.rend());
        merged.insert(merged.end() - 1, reversed.begin(), reversed.end());
        Commands fresh;
        CLI::App again{"Common correlated effects estimation for fixed-T panels", "ccep"};
        build(again, fresh);
        again.parse(merged);
        return dispatch(again, fresh);
      }
    }
    return dispatch(app, cmd);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return report_error("InvalidArguments", e.what(), kExitConfig);
  } catch (const Error& e) {
    return report_error(std::string(ccep::to_string(e.kind())), e.what(), exit_code(e.kind()));
  } catch (const Json::exception& e) {
    return report_error("InvalidConfig", e.what(), kExitConfig);
  } catch (const std::exception& e) {
    return report_error("Internal", e.what(), kExitInternal);
  }
}
