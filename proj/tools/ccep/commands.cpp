#include "commands.hpp"

#include <fstream>
#include <iostream>
#include <sstream>

#include <ccep/dgp.hpp>
#include <ccep/error.hpp>
#include <ccep/estimator.hpp>
#include <ccep/montecarlo.hpp>
#include <ccep/panel.hpp>
#include <ccep/serialize.hpp>
#include <ccep/variance.hpp>

namespace ccep::cli {
namespace {

void emit(const Common& c, const std::string& text) {
  if (c.out.empty()) {
    std::cout << text;
    std::cout.flush();
  } else {
    write_text_file(c.out, text);
  }
}

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

std::string pad(const std::string& s, std::size_t w) { return s.size() >= w ? s + " " : s + std::string(w - s.size(), ' '); }

std::string csv_quote(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

PanelDataset load(const DataArgs& d) {
  if (d.data.empty()) throw Error(ErrorKind::InvalidConfig, "--data is required");
  CsvSchema schema;
  schema.unit = d.unit;
  schema.time = d.time;
  schema.y = d.y;
  schema.x = d.x;
  return load_csv(d.data, schema);
}

// "CCEP_X" | "preset=CCEP_X[;label=..]" | "proxy=...;det=...;label=..."
LabeledEstimator parse_spec(const std::string& text) {
  LabeledEstimator out;
  if (text.find('=') == std::string::npos) {
    const Preset p = parse_preset(text);
    return {std::string(preset_name(p)), {preset_proxy(p), {}}};
  }
  std::string label;
  std::optional<ProxySpec> proxy;
  DeterministicSpec det;
  std::istringstream in(text);
  std::string item;
  while (std::getline(in, item, ';')) {
    if (item.empty()) continue;
    const auto eq = item.find('=');
    if (eq == std::string::npos) throw Error(ErrorKind::InvalidConfig, "spec item '" + item + "' lacks '='");
    const std::string key = item.substr(0, eq);
    const std::string value = item.substr(eq + 1);
    if (key == "proxy") {
      proxy = parse_proxy_list(value);
    } else if (key == "preset") {
      const Preset p = parse_preset(value);
      proxy = preset_proxy(p);
      if (label.empty()) label = std::string(preset_name(p));
    } else if (key == "det") {
      det = parse_deterministic(value);
    } else if (key == "label") {
      label = value;
    } else {
      throw Error(ErrorKind::InvalidConfig, "unknown spec key '" + key + "'");
    }
  }
  if (!proxy) throw Error(ErrorKind::InvalidConfig, "spec '" + text + "' names no proxy or preset");
  out.spec = {*proxy, det};
  out.label = label.empty() ? format_proxy_list(*proxy) + (det.empty() ? "" : "|" + format_deterministic(det)) : label;
  return out;
}

std::string estimate_table(const EstimateDocument& d) {
  std::ostringstream os;
  os << "proxy: " << d.proxy << "   deterministic: " << d.deterministic << "\n";
  os << "N = " << d.units << ", T = " << d.periods << ", m = " << d.m << ", dof = " << d.dof
     << ", proxy condition = " << format_short(d.proxy_condition) << "\n\n";
  const std::string level = format_short(100.0 * d.ci_level) + "% CI";
  os << pad("coef", 12) << pad("estimate", 14) << pad("se", 14) << pad("se naive", 14) << pad(level + " low", 14)
     << "high\n";
  for (Index j = 0; j < d.beta.size(); ++j) {
    os << pad(d.regressors[static_cast<std::size_t>(j)], 12) << pad(format_short(d.beta(j)), 14)
       << pad(format_short(d.se_corrected(j)), 14) << pad(format_short(d.se_naive(j)), 14)
       << pad(format_short(d.ci_lower(j)), 14) << format_short(d.ci_upper(j)) << "\n";
  }
  if (d.alpha.size() > 0) {
    os << "\nalpha:";
    for (Index j = 0; j < d.alpha.size(); ++j) os << " " << format_short(d.alpha(j));
    os << "\n";
  }
  for (const auto& n : d.notes) os << "note: " << n << "\n";
  if (d.non_psd) os << "warning: a middle matrix is not positive semi-definite\n";
  return os.str();
}

std::string estimate_csv(const EstimateDocument& d) {
  std::ostringstream os;
  os << "coefficient,estimate,se_corrected,se_naive,ci_lower,ci_upper,ci_lower_naive,ci_upper_naive\n";
  for (Index j = 0; j < d.beta.size(); ++j) {
    os << csv_quote(d.regressors[static_cast<std::size_t>(j)]) << ',' << format_double(d.beta(j)) << ','
       << format_double(d.se_corrected(j)) << ',' << format_double(d.se_naive(j)) << ','
       << format_double(d.ci_lower(j)) << ',' << format_double(d.ci_upper(j)) << ','
       << format_double(d.ci_lower_naive(j)) << ',' << format_double(d.ci_upper_naive(j)) << '\n';
  }
  for (Index j = 0; j < d.alpha.size(); ++j) {
    os << "alpha" << j + 1 << ',' << format_double(d.alpha(j)) << ",,,,,,\n";
  }
  return os.str();
}

std::string mc_table(const McReport& r) {
  std::ostringstream os;
  os << "dgp: " << r.dgp_name << "   N = " << r.units << ", T = " << r.periods << ", reps = " << r.reps
     << ", seed = " << r.master_seed << "\n\n";
  os << pad("estimator", 24) << pad("coef", 6) << pad("bias", 13) << pad("rmse", 13) << pad("sd", 13)
     << pad("se", 13) << pad("se naive", 13) << pad("cover", 9) << pad("naive", 9) << "used\n";
  for (const auto& e : r.estimators) {
    for (std::size_t j = 0; j < e.coefficients.size(); ++j) {
      const auto& c = e.coefficients[j];
      os << pad(e.label, 24) << pad(std::to_string(j + 1), 6) << pad(format_short(c.mean_bias), 13)
         << pad(format_short(c.rmse), 13) << pad(format_short(c.sd), 13) << pad(format_short(c.mean_se_corrected), 13)
         << pad(format_short(c.mean_se_naive), 13) << pad(format_short(c.coverage_corrected), 9)
         << pad(format_short(c.coverage_naive), 9) << e.reps_used << "\n";
    }
    for (const auto& [kind, count] : e.failures) os << "  " << e.label << " failures " << kind << ": " << count << "\n";
  }
  if (r.efficiency) {
    os << "\nefficiency " << r.efficiency->alternative << " vs " << r.efficiency->baseline
       << ": min eigenvalue " << format_short(r.efficiency->min_eigenvalue) << " (MC se "
       << format_short(r.efficiency->mc_se) << ")\n";
  }
  return os.str();
}

std::string replications_csv(const McReport& r) {
  std::ostringstream os;
  os << "rep,seed,estimator,status,coefficient,estimate,se_corrected,se_naive\n";
  for (const auto& rec : r.replications) {
    if (!rec.error.empty()) {
      os << rec.rep << ',' << rec.seed << ',' << csv_quote(rec.label) << ',' << rec.error << ",,,,\n";
      continue;
    }
    for (Index j = 0; j < rec.beta.size(); ++j) {
      os << rec.rep << ',' << rec.seed << ',' << csv_quote(rec.label) << ",ok," << j + 1 << ','
         << format_double(rec.beta(j)) << ',' << format_double(rec.se_corrected(j)) << ','
         << format_double(rec.se_naive(j)) << '\n';
    }
  }
  return os.str();
}

std::string compare_table(const std::vector<ComparisonRow>& rows, const std::vector<std::string>& names) {
  std::ostringstream os;
  os << pad("spec", 32);
  for (const auto& n : names) os << pad(n, 16);
  os << "status\n";
  for (const auto& r : rows) {
    os << pad(r.label, 32);
    for (std::size_t j = 0; j < names.size(); ++j) {
      os << pad(r.beta ? format_short((*r.beta)(static_cast<Index>(j))) : "-", 16);
    }
    os << (r.error ? std::string(to_string(*r.error)) : std::string("ok")) << "\n";
  }
  return os.str();
}

std::string compare_csv(const std::vector<ComparisonRow>& rows, const std::vector<std::string>& names) {
  std::ostringstream os;
  os << "spec,status";
  for (const auto& n : names) os << ',' << csv_quote(n);
  os << "\n";
  for (const auto& r : rows) {
    os << csv_quote(r.label) << ',' << (r.error ? std::string(to_string(*r.error)) : std::string("ok"));
    for (std::size_t j = 0; j < names.size(); ++j) {
      os << ',' << (r.beta ? format_double((*r.beta)(static_cast<Index>(j))) : std::string());
    }
    os << "\n";
  }
  return os.str();
}

}  // namespace

int run_estimate(const EstimateArgs& a) {
  const PanelDataset ds = load(a.data);
  const EstimatorSpec spec{parse_proxy_list(a.proxy), parse_deterministic(a.det)};
  const EstimateResult fit = ccep_fit(ds, spec, FitOptions{a.common.jobs});
  VarianceOptions vopt;
  vopt.ci_level = a.ci;
  vopt.dof_correction = a.dof_correction;
  vopt.jobs = a.common.jobs;
  const VarianceResult v = estimate_variance(ds, fit, vopt);
  const EstimateDocument doc = make_estimate_document(ds, fit, v);
  switch (a.common.format) {
    case Format::Json: emit(a.common, dump(Json(doc))); break;
    case Format::Csv: emit(a.common, estimate_csv(doc)); break;
    case Format::Table: emit(a.common, estimate_table(doc)); break;
  }
  return kExitOk;
}

int run_simulate(const SimulateArgs& a) {
  if (a.common.out.empty()) throw Error(ErrorKind::InvalidConfig, "simulate needs --out for the CSV file");
  DgpConfig cfg;
  if (!a.preset.empty()) {
    cfg = preset(a.preset);
  } else if (!a.common.config.empty()) {
    const Json j = read_json_file(a.common.config);
    const Json& d = j.contains("dgp") ? j.at("dgp") : j;
    cfg = d.is_string() ? preset(d.get<std::string>()) : d.get<DgpConfig>();
  } else {
    throw Error(ErrorKind::InvalidConfig, "simulate needs --preset or --config");
  }
  cfg.record_truth = cfg.record_truth || a.record_truth;
  const Simulated sim = generate(cfg, a.units, a.common.seed, a.common.jobs);
  write_csv(sim.data, a.common.out);
  Json truth = truth_to_json(sim.truth);
  truth["dgp"] = cfg;
  truth["units"] = a.units;
  truth["seed"] = a.common.seed;
  write_text_file(a.truth.empty() ? a.common.out + ".truth.json" : a.truth, dump(truth));
  if (a.common.verbose) std::cerr << "wrote " << a.units << " units to " << a.common.out << "\n";
  return kExitOk;
}

int run_mc(const McArgs& a) {
  McConfig cfg;
  if (!a.common.config.empty()) cfg = read_json_file(a.common.config).get<McConfig>();
  if (!a.preset.empty()) cfg.dgp = preset(a.preset);
  if (cfg.dgp.periods == 0) throw Error(ErrorKind::InvalidConfig, "mc needs --preset or a config with a dgp");
  cfg.units = a.units;
  cfg.reps = a.reps;
  cfg.ci_level = a.ci;
  cfg.master_seed = a.common.seed;
  cfg.workers = a.common.jobs;
  cfg.dof_correction = a.dof_correction;
  cfg.keep_replications = cfg.keep_replications || !a.reps_csv.empty();
  if (!a.estimators.empty()) {
    cfg.estimators.clear();
    for (const auto& s : a.estimators) cfg.estimators.push_back(parse_spec(s));
  }
  if (cfg.estimators.empty()) cfg.estimators.push_back(parse_spec("CCEP_X"));
  if (!a.efficiency.empty()) {
    const auto comma = a.efficiency.find(',');
    if (comma == std::string::npos) throw Error(ErrorKind::InvalidConfig, "--efficiency expects baseline,alternative");
    cfg.efficiency = EfficiencyPair{a.efficiency.substr(0, comma), a.efficiency.substr(comma + 1)};
  }
  ProgressFn progress;
  if (a.common.verbose) {
    progress = [](Index done, Index total) {
      if (done == total || done % 100 == 0) std::cerr << "replication " << done << "/" << total << "\n";
    };
  }
  const McReport report = run(cfg, progress);
  if (!a.reps_csv.empty()) write_text_file(a.reps_csv, replications_csv(report));
  switch (a.common.format) {
    case Format::Json: {
      Json j = report;
      j.erase("replications");
      emit(a.common, dump(j));
      break;
    }
    case Format::Csv: emit(a.common, replications_csv(report)); break;
    case Format::Table: emit(a.common, mc_table(report)); break;
  }
  return kExitOk;
}

int run_compare(const CompareArgs& a) {
  const PanelDataset ds = load(a.data);
  if (a.specs.empty()) throw Error(ErrorKind::InvalidConfig, "compare needs at least one --spec");
  std::vector<LabeledEstimator> specs;
  for (const auto& s : a.specs) specs.push_back(parse_spec(s));
  const auto rows = compare_specs(ds, specs, FitOptions{a.common.jobs});
  switch (a.common.format) {
    case Format::Json: {
      Json j = {{"regressors", ds.regressor_names()}, {"rows", rows}};
      emit(a.common, dump(j));
      break;
    }
    case Format::Csv: emit(a.common, compare_csv(rows, ds.regressor_names())); break;
    case Format::Table: emit(a.common, compare_table(rows, ds.regressor_names())); break;
  }
  return kExitOk;
}

}  // namespace ccep::cli
