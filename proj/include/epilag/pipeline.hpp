#pragma once

#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "epilag/config.hpp"
#include "epilag/dataset.hpp"
#include "epilag/errors.hpp"
#include "epilag/evaluation.hpp"
#include "epilag/fetch.hpp"
#include "epilag/ingest.hpp"
#include "epilag/lag.hpp"
#include "epilag/parallel.hpp"
#include "epilag/synth.hpp"

namespace epilag::cli {

// Exit codes: 0 success, 1 config/usage, 2 missing or unreadable input,
// 3 dataset empty after cleaning, 4 one or more sub-tasks failed.
inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 1;
inline constexpr int kExitMissingInput = 2;
inline constexpr int kExitEmptyAfterClean = 3;
inline constexpr int kExitTaskFailed = 4;

struct CommandResult {
  int exit_code = kExitOk;
  std::vector<std::string> outputs;
  std::vector<std::string> failures;
};

class MissingInput : public Error {
 public:
  explicit MissingInput(const std::string& path) : Error("cannot read input: " + path) {}
};

namespace detail {

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw MissingInput(path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

inline void write_file(const std::string& path, std::string_view content) {
  std::filesystem::path p(path);
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
  std::ofstream out(p, std::ios::binary);
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!out) throw Error("cannot write " + path);
}

/// File path or http(s) URL, decided by the scheme prefix.
inline std::string load_source(const std::string& uri) {
  if (is_remote_uri(uri)) return fetch_remote_csv(uri);
  return read_file(uri);
}

inline int severity(const std::exception& e) {
  if (dynamic_cast<const MissingInput*>(&e) || dynamic_cast<const NetworkError*>(&e) ||
      dynamic_cast<const HttpStatusError*>(&e))
    return kExitMissingInput;
  if (dynamic_cast<const EmptyAfterClean*>(&e)) return kExitEmptyAfterClean;
  return kExitTaskFailed;
}

inline nlohmann::json config_snapshot(const RunConfig& cfg) {
  return nlohmann::json{{"seed", cfg.seed},
                        {"jobs", cfg.jobs},
                        {"out_dir", cfg.out_dir},
                        {"max_lag", cfg.max_lag},
                        {"min_overlap", cfg.min_overlap},
                        {"k_folds", cfg.k_folds},
                        {"grid_search", cfg.grid_search},
                        {"districts", cfg.districts},
                        {"models", cfg.models},
                        {"lags", cfg.lags}};
}

/// The run manifest deliberately carries no wall-clock information:
/// re-running a command with identical inputs must produce identical bytes.
inline void write_manifest(const RunConfig& cfg, const std::string& command,
                           const CommandResult& result) {
  nlohmann::json j{{"command", command},
                   {"config", config_snapshot(cfg)},
                   {"outputs", result.outputs},
                   {"failures", result.failures},
                   {"exit_code", result.exit_code}};
  write_file(cfg.out_dir + "/manifest.json", j.dump(2) + "\n");
}

}  // namespace detail

// ---------------------------------------------------------------------------
// ingest: sources -> canonical per-district CSVs + cleaning audit
// ---------------------------------------------------------------------------

inline CommandResult cmd_ingest(const RunConfig& cfg) {
  CommandResult result;
  if (cfg.districts.empty()) {
    result.exit_code = kExitConfig;
    result.failures.push_back("no districts configured");
    detail::write_manifest(cfg, "ingest", result);
    return result;
  }

  struct DistrictOutcome {
    std::string csv;
    CleanAudit audit;
    std::vector<std::string> sources;
    std::string failure;
    int severity = kExitOk;
  };
  std::vector<DistrictOutcome> outcomes(cfg.districts.size());

  parallel_for(cfg.districts.size(), cfg.jobs, [&](std::size_t i) {
    const std::string& district = cfg.districts[i];
    auto& outcome = outcomes[i];
    try {
      std::string env_uri = cfg.env_source_for(district);
      if (env_uri.empty()) throw ConfigError("no env_csv source for district " + district);
      std::string cases_uri = cfg.cases_source_for(district);
      if (cases_uri.empty()) throw ConfigError("no cases_csv source for district " + district);

      EnvTable env = parse_environment_csv(detail::load_source(env_uri), district);
      auto cases = derive_new_cases(
          parse_cases_csv(detail::load_source(cases_uri), cfg.case_key_for(district)));
      DistrictDataset merged = merge_sources(env, cases, district);
      merged.provenance.push_back({env_uri, ""});
      merged.provenance.push_back({cases_uri, ""});
      if (!cfg.required_columns.empty()) {
        merged.schema = cfg.required_columns;
        sort_schema(merged.schema);
      }
      DistrictDataset cleaned = clean(merged, &outcome.audit);
      outcome.csv = write_canonical_csv(cleaned);
      for (const auto& src : cleaned.provenance) outcome.sources.push_back(src.uri);
    } catch (const std::exception& e) {
      outcome.failure = std::string(e.what());
      outcome.severity = detail::severity(e);
    }
  });

  nlohmann::json audit_json = nlohmann::json::object();
  for (std::size_t i = 0; i < cfg.districts.size(); ++i) {
    const std::string& district = cfg.districts[i];
    const auto& outcome = outcomes[i];
    if (!outcome.failure.empty()) {
      result.failures.push_back(district + ": " + outcome.failure);
      if (result.exit_code == kExitOk) result.exit_code = outcome.severity;
      continue;
    }
    std::string path = cfg.out_dir + "/" + district + ".csv";
    detail::write_file(path, outcome.csv);
    result.outputs.push_back(path);
    audit_json[district] = {
        {"input_rows", outcome.audit.input_rows},
        {"kept_rows", outcome.audit.kept_rows},
        {"removed",
         {{"missing_new_cases", outcome.audit.removed_missing_new_cases},
          {"negative_new_cases", outcome.audit.removed_negative_new_cases},
          {"missing_env", outcome.audit.removed_missing_env}}},
        {"sources", outcome.sources}};
  }
  std::string audit_path = cfg.out_dir + "/audit.json";
  detail::write_file(audit_path, audit_json.dump(2) + "\n");
  result.outputs.push_back(audit_path);
  detail::write_manifest(cfg, "ingest", result);
  return result;
}

// ---------------------------------------------------------------------------
// correlate: canonical CSVs -> per-variable curves + peak summaries
// ---------------------------------------------------------------------------

inline CommandResult cmd_correlate(const RunConfig& cfg) {
  CommandResult result;
  std::vector<DistrictDataset> datasets;
  for (const auto& district : cfg.districts) {
    try {
      datasets.push_back(
          read_canonical_csv(detail::read_file(cfg.dataset_path_for(district)), district));
    } catch (const std::exception& e) {
      result.failures.push_back(district + ": " + std::string(e.what()));
      if (result.exit_code == kExitOk) result.exit_code = detail::severity(e);
    }
  }
  if (datasets.size() != cfg.districts.size()) {
    detail::write_manifest(cfg, "correlate", result);
    return result;
  }

  struct Unit {
    std::optional<LagCorrelationCurve> curve;
    std::string status = "ok";  // ok | absent | no_valid_lag
  };
  const std::size_t n_units = datasets.size() * kVariableCount;
  std::vector<Unit> units(n_units);

  parallel_for(n_units, cfg.jobs, [&](std::size_t u) {
    const auto& ds = datasets[u / kVariableCount];
    VariableKind v = kAllVariables[u % kVariableCount];
    if (!ds.has_variable(v)) {
      units[u].status = "absent";
      return;
    }
    try {
      units[u].curve = lag_sweep(ds, v, cfg.max_lag, cfg.min_overlap);
    } catch (const NoValidLag&) {
      units[u].status = "no_valid_lag";
    }
  });

  for (std::size_t d = 0; d < datasets.size(); ++d) {
    const std::string& district = cfg.districts[d];
    std::string peaks_csv = "variable,peak_lag,peak_r,p,n,strength,status\n";
    nlohmann::json peaks_json = nlohmann::json::array();
    for (std::size_t k = 0; k < kVariableCount; ++k) {
      const Unit& unit = units[d * kVariableCount + k];
      std::string vname(variable_name(kAllVariables[k]));
      if (unit.curve) {
        const auto& curve = *unit.curve;
        std::string base = cfg.out_dir + "/" + district + "_" + vname + "_curve";
        detail::write_file(base + ".csv", curve_to_csv(curve));
        result.outputs.push_back(base + ".csv");
        detail::write_file(base + ".json", curve_to_json(curve).dump(2) + "\n");
        result.outputs.push_back(base + ".json");

        const auto& peak = curve.peak();
        peaks_csv += vname + "," + std::to_string(curve.peak_lag) + "," +
                     format_double(curve.peak_r) + "," + format_double(peak.p_value) + "," +
                     std::to_string(peak.n) + "," +
                     std::string(strength_name(classify_strength(curve.peak_r))) + ",ok\n";
        peaks_json.push_back(
            {{"variable", vname},
             {"peak_lag", curve.peak_lag},
             {"peak_r", curve.peak_r},
             {"p", peak.p_value},
             {"n", peak.n},
             {"strength", std::string(strength_name(classify_strength(curve.peak_r)))},
             {"status", "ok"}});
      } else {
        peaks_csv += vname + ",,,,,," + unit.status + "\n";
        peaks_json.push_back({{"variable", vname}, {"status", unit.status}});
      }
    }
    std::string base = cfg.out_dir + "/" + district + "_peaks";
    detail::write_file(base + ".csv", peaks_csv);
    result.outputs.push_back(base + ".csv");
    detail::write_file(base + ".json", peaks_json.dump(2) + "\n");
    result.outputs.push_back(base + ".json");
  }
  detail::write_manifest(cfg, "correlate", result);
  return result;
}

// ---------------------------------------------------------------------------
// train: canonical CSVs -> serialized models + evaluation reports
// ---------------------------------------------------------------------------

namespace detail {

inline ModelSpec spec_for_model(const RunConfig& cfg, const std::string& model,
                                std::uint64_t unit_seed) {
  if (model == "tree") {
    TreeSpec spec{cfg.forest.max_depth, cfg.forest.min_samples_leaf};
    return spec;
  }
  if (model == "forest") {
    ForestSpec spec = cfg.forest;
    spec.seed = unit_seed;
    return spec;
  }
  if (model == "boost") {
    BoostSpec spec = cfg.boost;
    spec.seed = unit_seed;
    return spec;
  }
  MlpSpec spec = cfg.mlp;
  spec.seed = unit_seed;
  return spec;
}

}  // namespace detail

inline CommandResult cmd_train(const RunConfig& cfg) {
  CommandResult result;
  std::map<std::string, DistrictDataset> datasets;
  for (const auto& district : cfg.districts) {
    try {
      datasets.emplace(district, read_canonical_csv(
                                     detail::read_file(cfg.dataset_path_for(district)), district));
    } catch (const std::exception& e) {
      result.failures.push_back(district + ": " + std::string(e.what()));
      if (result.exit_code == kExitOk) result.exit_code = detail::severity(e);
    }
  }
  if (datasets.size() != cfg.districts.size()) {
    detail::write_manifest(cfg, "train", result);
    return result;
  }

  struct Unit {
    std::string district;
    int lag;
    std::string model;
  };
  std::vector<Unit> plan;
  for (const auto& district : cfg.districts)
    for (int lag : cfg.lags)
      for (const auto& model : cfg.models) plan.push_back({district, lag, model});

  struct Outcome {
    std::string report_json;
    std::string predictions_csv;
    std::string model_json;
    std::string grid_json;  // only when grid search ran for this unit
    std::string failure;
  };
  std::vector<Outcome> outcomes(plan.size());

  parallel_for(plan.size(), cfg.jobs, [&](std::size_t u) {
    const Unit& unit = plan[u];
    auto& outcome = outcomes[u];
    try {
      const DistrictDataset& ds = datasets.at(unit.district);
      std::string label = "train." + unit.model + "." + unit.district;
      std::uint64_t unit_seed =
          derive_seed(cfg.seed, label, static_cast<std::uint64_t>(unit.lag));

      ModelSpec spec = detail::spec_for_model(cfg, unit.model, unit_seed);
      if (cfg.grid_search && unit.model == "forest") {
        LaggedDesign design = lagged_design(ds, unit.lag, cfg.min_overlap);
        GridResult grid =
            grid_search(design.x, design.y, GridSpec{}, cfg.k_folds,
                        derive_seed(cfg.seed, "grid." + unit.district,
                                    static_cast<std::uint64_t>(unit.lag)),
                        1, cfg.forest);
        nlohmann::json cells = nlohmann::json::array();
        for (const auto& cell : grid.cells)
          cells.push_back({{"max_depth", cell.max_depth},
                           {"n_estimators", cell.n_estimators},
                           {"cv_mean", cell.cv_mean},
                           {"cv_std", cell.cv_std}});
        outcome.grid_json = nlohmann::json{{"district", unit.district},
                                           {"lag_days", unit.lag},
                                           {"best",
                                            {{"max_depth", grid.best.max_depth},
                                             {"n_estimators", grid.best.n_estimators}}},
                                           {"cells", std::move(cells)}}
                                .dump(2) +
                            "\n";
        ForestSpec tuned = grid.best;
        tuned.seed = unit_seed;
        spec = tuned;
      }

      auto [report, model] = run_experiment(
          ds, unit.lag, spec,
          derive_seed(cfg.seed, "split." + unit.district, static_cast<std::uint64_t>(unit.lag)),
          cfg.k_folds, cfg.min_overlap);
      outcome.report_json = report_to_json(report).dump(2) + "\n";
      outcome.predictions_csv = predictions_to_csv(report);
      outcome.model_json = model_to_json(model).dump(2) + "\n";
    } catch (const std::exception& e) {
      outcome.failure = std::string(e.what());
    }
  });

  for (std::size_t u = 0; u < plan.size(); ++u) {
    const Unit& unit = plan[u];
    const Outcome& outcome = outcomes[u];
    std::string tag = unit.district + "_" + unit.model + "_lag" + std::to_string(unit.lag);
    if (!outcome.failure.empty()) {
      result.failures.push_back(tag + ": " + outcome.failure);
      if (result.exit_code == kExitOk) result.exit_code = kExitTaskFailed;
      continue;
    }
    std::string base = cfg.out_dir + "/" + tag;
    detail::write_file(base + "_report.json", outcome.report_json);
    result.outputs.push_back(base + "_report.json");
    detail::write_file(base + "_predictions.csv", outcome.predictions_csv);
    result.outputs.push_back(base + "_predictions.csv");
    detail::write_file(base + "_model.json", outcome.model_json);
    result.outputs.push_back(base + "_model.json");
    if (!outcome.grid_json.empty()) {
      detail::write_file(base + "_grid.json", outcome.grid_json);
      result.outputs.push_back(base + "_grid.json");
    }
  }
  detail::write_manifest(cfg, "train", result);
  return result;
}

// ---------------------------------------------------------------------------
// synth: generate a synthetic district CSV
// ---------------------------------------------------------------------------

inline CommandResult cmd_synth(const RunConfig& cfg, const synth::SyntheticSpec& spec,
                               const std::string& out_path = "") {
  CommandResult result;
  try {
    DistrictDataset ds = synth::generate(spec);
    std::string path =
        out_path.empty() ? cfg.out_dir + "/" + spec.district_id + ".csv" : out_path;
    detail::write_file(path, write_canonical_csv(ds));
    result.outputs.push_back(path);
  } catch (const ConfigError& e) {
    result.failures.push_back(e.what());
    result.exit_code = kExitConfig;
  } catch (const std::exception& e) {
    result.failures.push_back(e.what());
    result.exit_code = kExitTaskFailed;
  }
  detail::write_manifest(cfg, "synth", result);
  return result;
}

}  // namespace epilag::cli
