#pragma once

#include <charconv>
#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "epilag/boosting.hpp"
#include "epilag/errors.hpp"
#include "epilag/forest.hpp"
#include "epilag/lag.hpp"
#include "epilag/mlp.hpp"
#include "epilag/variables.hpp"

namespace epilag::cli {

/// Everything a run needs, resolved from defaults, then the config file,
/// then command-line overrides (in that precedence order).
struct RunConfig {
  std::uint64_t seed = 42;
  std::size_t jobs = 1;
  std::string out_dir = "out";
  int max_lag = kDefaultMaxLag;
  std::size_t min_overlap = kDefaultMinOverlap;
  std::size_t k_folds = 5;
  bool grid_search = false;

  std::vector<std::string> districts;
  std::map<std::string, std::string> env_sources;        // env_csv.<district>
  std::string cases_source;                              // cases_csv
  std::map<std::string, std::string> cases_sources;      // cases_csv.<district>
  std::map<std::string, std::string> case_district_keys; // case_district.<district>
  std::map<std::string, std::string> dataset_paths;      // dataset.<district>
  std::vector<VariableKind> required_columns;

  std::vector<std::string> models = {"forest"};
  std::vector<int> lags = {10};

  ForestSpec forest{100, 5, 0, 1, true};
  BoostSpec boost{100, 0.1, 3, 1.0, 0, 1};
  MlpSpec mlp;

  std::string env_source_for(const std::string& district) const {
    auto it = env_sources.find(district);
    return it == env_sources.end() ? "" : it->second;
  }
  std::string cases_source_for(const std::string& district) const {
    auto it = cases_sources.find(district);
    return it == cases_sources.end() ? cases_source : it->second;
  }
  std::string case_key_for(const std::string& district) const {
    auto it = case_district_keys.find(district);
    return it == case_district_keys.end() ? district : it->second;
  }
  std::string dataset_path_for(const std::string& district) const {
    auto it = dataset_paths.find(district);
    return it == dataset_paths.end() ? out_dir + "/" + district + ".csv" : it->second;
  }
};

namespace detail {

inline std::string trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
    s.remove_suffix(1);
  return std::string(s);
}

inline std::vector<std::string> split_list(std::string_view s) {
  std::vector<std::string> out;
  std::size_t pos = 0;
  while (pos <= s.size()) {
    std::size_t comma = s.find(',', pos);
    std::string item =
        trim(comma == std::string_view::npos ? s.substr(pos) : s.substr(pos, comma - pos));
    if (!item.empty()) out.push_back(std::move(item));
    if (comma == std::string_view::npos) break;
    pos = comma + 1;
  }
  return out;
}

template <typename T>
T parse_number(const std::string& key, const std::string& value) {
  T v{};
  auto [p, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
  if (ec != std::errc() || p != value.data() + value.size())
    throw ConfigError("key '" + key + "': cannot parse number '" + value + "'");
  return v;
}

inline bool parse_bool(const std::string& key, const std::string& value) {
  if (value == "true" || value == "1") return true;
  if (value == "false" || value == "0") return false;
  throw ConfigError("key '" + key + "': expected true/false, got '" + value + "'");
}

inline VariableKind parse_variable_or_throw(const std::string& key, const std::string& name) {
  auto v = parse_variable(name);
  if (!v) throw ConfigError("key '" + key + "': unknown variable '" + name + "'");
  return *v;
}

}  // namespace detail

/// Apply one key=value setting. This is the single entry point used by both
/// config-file lines and command-line --set overrides; unknown keys are
/// rejected here.
inline void apply_setting(RunConfig& cfg, const std::string& key, const std::string& value) {
  using detail::parse_bool;
  using detail::parse_number;

  if (key == "seed") {
    cfg.seed = parse_number<std::uint64_t>(key, value);
  } else if (key == "jobs") {
    cfg.jobs = parse_number<std::size_t>(key, value);
  } else if (key == "out_dir") {
    cfg.out_dir = value;
  } else if (key == "max_lag") {
    cfg.max_lag = parse_number<int>(key, value);
  } else if (key == "min_overlap") {
    cfg.min_overlap = parse_number<std::size_t>(key, value);
  } else if (key == "k_folds") {
    cfg.k_folds = parse_number<std::size_t>(key, value);
  } else if (key == "grid_search") {
    cfg.grid_search = parse_bool(key, value);
  } else if (key == "districts") {
    cfg.districts = detail::split_list(value);
  } else if (key == "cases_csv") {
    cfg.cases_source = value;
  } else if (key == "required_columns") {
    cfg.required_columns.clear();
    for (const auto& name : detail::split_list(value))
      cfg.required_columns.push_back(detail::parse_variable_or_throw(key, name));
  } else if (key == "models") {
    cfg.models = detail::split_list(value);
  } else if (key == "lags") {
    cfg.lags.clear();
    for (const auto& s : detail::split_list(value))
      cfg.lags.push_back(parse_number<int>(key, s));
  } else if (key == "forest.n_estimators") {
    cfg.forest.n_estimators = parse_number<std::size_t>(key, value);
  } else if (key == "forest.max_depth") {
    cfg.forest.max_depth = parse_number<int>(key, value);
  } else if (key == "forest.min_samples_leaf") {
    cfg.forest.min_samples_leaf = parse_number<std::size_t>(key, value);
  } else if (key == "boost.n_estimators") {
    cfg.boost.n_estimators = parse_number<std::size_t>(key, value);
  } else if (key == "boost.learning_rate") {
    cfg.boost.learning_rate = parse_number<double>(key, value);
  } else if (key == "boost.max_depth") {
    cfg.boost.max_depth = parse_number<int>(key, value);
  } else if (key == "boost.l2_lambda") {
    cfg.boost.l2_lambda = parse_number<double>(key, value);
  } else if (key == "mlp.epochs") {
    cfg.mlp.epochs = parse_number<std::size_t>(key, value);
  } else if (key == "mlp.batch_size") {
    cfg.mlp.batch_size = parse_number<std::size_t>(key, value);
  } else if (key == "mlp.learning_rate") {
    cfg.mlp.learning_rate = parse_number<double>(key, value);
  } else if (key.rfind("env_csv.", 0) == 0) {
    cfg.env_sources[key.substr(8)] = value;
  } else if (key.rfind("cases_csv.", 0) == 0) {
    cfg.cases_sources[key.substr(10)] = value;
  } else if (key.rfind("case_district.", 0) == 0) {
    cfg.case_district_keys[key.substr(14)] = value;
  } else if (key.rfind("dataset.", 0) == 0) {
    cfg.dataset_paths[key.substr(8)] = value;
  } else {
    throw ConfigError("unknown key '" + key + "'");
  }
}

/// Parse "key = value" lines; '#' starts a comment, blank lines are ignored.
inline void apply_config_text(RunConfig& cfg, std::string_view text) {
  std::size_t pos = 0;
  std::size_t line_no = 0;
  while (pos <= text.size()) {
    if (pos == text.size()) break;
    std::size_t eol = text.find('\n', pos);
    std::string_view line =
        eol == std::string_view::npos ? text.substr(pos) : text.substr(pos, eol - pos);
    pos = eol == std::string_view::npos ? text.size() : eol + 1;
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    std::string trimmed = detail::trim(line);
    if (trimmed.empty()) continue;
    auto eq = trimmed.find('=');
    if (eq == std::string::npos)
      throw ConfigError("line " + std::to_string(line_no) + ": expected key = value");
    apply_setting(cfg, detail::trim(std::string_view(trimmed).substr(0, eq)),
                  detail::trim(std::string_view(trimmed).substr(eq + 1)));
  }
}

/// Cross-field validation, run once after all settings are applied.
inline void validate(const RunConfig& cfg) {
  if (cfg.jobs < 1) throw ConfigError("jobs must be >= 1");
  if (cfg.max_lag < 0) throw ConfigError("max_lag must be >= 0");
  if (cfg.min_overlap < 3) throw ConfigError("min_overlap must be >= 3");
  if (cfg.k_folds < 2) throw ConfigError("k_folds must be >= 2");
  if (cfg.out_dir.empty()) throw ConfigError("out_dir must not be empty");
  for (const auto& m : cfg.models) {
    if (m != "tree" && m != "forest" && m != "boost" && m != "mlp")
      throw ConfigError("unknown model '" + m + "' (expected tree, forest, boost, mlp)");
  }
  for (int lag : cfg.lags) {
    if (lag < 0) throw ConfigError("lags must be >= 0");
  }
  if (cfg.forest.n_estimators == 0) throw ConfigError("forest.n_estimators must be >= 1");
  if (cfg.forest.max_depth < 0) throw ConfigError("forest.max_depth must be >= 0");
  if (cfg.boost.learning_rate <= 0.0) throw ConfigError("boost.learning_rate must be > 0");
  if (cfg.boost.max_depth < 0) throw ConfigError("boost.max_depth must be >= 0");
  if (cfg.boost.l2_lambda < 0.0) throw ConfigError("boost.l2_lambda must be >= 0");
  if (cfg.mlp.epochs == 0) throw ConfigError("mlp.epochs must be >= 1");
  if (cfg.mlp.batch_size == 0) throw ConfigError("mlp.batch_size must be >= 1");
  if (cfg.mlp.learning_rate <= 0.0) throw ConfigError("mlp.learning_rate must be > 0");
}

}  // namespace epilag::cli
