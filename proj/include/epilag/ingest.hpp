#pragma once

#include <algorithm>
#include <array>
#include <cctype>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "epilag/csv.hpp"
#include "epilag/dataset.hpp"
#include "epilag/dates.hpp"
#include "epilag/errors.hpp"
#include "epilag/variables.hpp"

namespace epilag {

/// Raw environmental table straight out of a source CSV: date-keyed rows,
/// schema = the environmental columns the header declared.
struct EnvTable {
  std::vector<VariableKind> schema;
  std::map<Date, std::array<std::optional<double>, kVariableCount>> rows;
};

/// One point of the per-district case series. `total` comes from the source;
/// `new_cases` is filled in by derive_new_cases.
struct CasePoint {
  Date date;
  long long total = 0;
  std::optional<long long> new_cases;
};

/// Parse a wide-format environmental CSV (one column per variable). Header
/// names are matched case-insensitively through the alias table. Cells that
/// do not parse as numbers become missing values, never zero.
inline EnvTable parse_environment_csv(std::string_view bytes, const std::string& district_id) {
  CsvTable table = parse_csv(bytes, "environment CSV for " + district_id);

  int date_col = -1;
  std::array<int, kVariableCount> var_col;
  var_col.fill(-1);
  for (std::size_t c = 0; c < table.header.size(); ++c) {
    if (is_date_column(table.header[c])) {
      date_col = static_cast<int>(c);
    } else if (auto v = parse_variable(table.header[c])) {
      var_col[static_cast<std::size_t>(*v)] = static_cast<int>(c);
    }
  }
  if (date_col < 0)
    throw MalformedCsv("no date column in environment CSV for " + district_id);

  EnvTable env;
  for (std::size_t i = 0; i < kVariableCount; ++i)
    if (var_col[i] >= 0) env.schema.push_back(kAllVariables[i]);
  if (env.schema.empty())
    throw MalformedCsv("no environmental columns recognized for " + district_id);

  for (const auto& row : table.rows) {
    if (static_cast<std::size_t>(date_col) >= row.size()) continue;
    Date date = parse_date(row[static_cast<std::size_t>(date_col)]);
    auto [it, inserted] = env.rows.try_emplace(date);
    if (!inserted)
      throw MalformedCsv("duplicate date " + date.to_string() + " in environment CSV for " +
                         district_id);
    for (std::size_t i = 0; i < kVariableCount; ++i) {
      int c = var_col[i];
      if (c >= 0 && static_cast<std::size_t>(c) < row.size())
        it->second[i] = try_parse_double(row[static_cast<std::size_t>(c)]);
    }
  }
  return env;
}

namespace detail {

inline bool iequals(std::string_view a, std::string_view b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (std::tolower(static_cast<unsigned char>(a[i])) !=
        std::tolower(static_cast<unsigned char>(b[i])))
      return false;
  }
  return true;
}

inline bool is_district_column(std::string_view name) {
  std::string n = normalize_column(name);
  return n == "district" || n == "district_id" || n == "province" || n == "provincia" ||
         n == "denominazione_provincia" || n == "sigla_provincia" || n == "city" || n == "area";
}

inline bool is_total_cases_column(std::string_view name) {
  std::string n = normalize_column(name);
  return n == "total_cases" || n == "totale_casi" || n == "total" || n == "cases" ||
         n == "cumulative_cases";
}

}  // namespace detail

/// Extract the cumulative case series of one district from a (possibly
/// national) cases CSV. District matching is case-insensitive over every
/// recognized identifier column.
inline std::vector<CasePoint> parse_cases_csv(std::string_view bytes,
                                              const std::string& district_id) {
  CsvTable table = parse_csv(bytes, "cases CSV");

  int date_col = -1, total_col = -1;
  std::vector<std::size_t> id_cols;
  for (std::size_t c = 0; c < table.header.size(); ++c) {
    if (is_date_column(table.header[c]) && date_col < 0) date_col = static_cast<int>(c);
    if (detail::is_district_column(table.header[c])) id_cols.push_back(c);
    if (detail::is_total_cases_column(table.header[c]) && total_col < 0)
      total_col = static_cast<int>(c);
  }
  if (date_col < 0) throw MalformedCsv("no date column in cases CSV");
  if (total_col < 0) throw MalformedCsv("no total-cases column in cases CSV");
  if (id_cols.empty()) throw MalformedCsv("no district identifier column in cases CSV");

  std::map<Date, long long> by_date;
  bool matched_any = false;
  for (const auto& row : table.rows) {
    bool match = false;
    for (auto c : id_cols) {
      if (c < row.size() && detail::iequals(row[c], district_id)) {
        match = true;
        break;
      }
    }
    if (!match) continue;
    matched_any = true;
    if (static_cast<std::size_t>(date_col) >= row.size() ||
        static_cast<std::size_t>(total_col) >= row.size())
      continue;
    Date date = parse_date(row[static_cast<std::size_t>(date_col)]);
    auto total = try_parse_ll(row[static_cast<std::size_t>(total_col)]);
    if (!total) continue;  // unparseable count -> treat as missing day
    if (*total < 0)
      throw MalformedCsv("negative cumulative case count on " + date.to_string() + " for " +
                         district_id);
    auto [it, inserted] = by_date.emplace(date, *total);
    if (!inserted)
      throw MalformedCsv("duplicate date " + date.to_string() + " in cases CSV for " +
                         district_id);
  }
  if (!matched_any) throw DistrictNotFound(district_id);

  std::vector<CasePoint> series;
  series.reserve(by_date.size());
  for (auto& [date, total] : by_date) series.push_back({date, total, std::nullopt});
  return series;
}

/// First-difference the cumulative series. The first date has no previous
/// total, so its new_cases stays missing; negative differences are kept
/// (clean() removes them later).
inline std::vector<CasePoint> derive_new_cases(std::vector<CasePoint> series) {
  for (std::size_t i = 0; i < series.size(); ++i) {
    if (i == 0) {
      series[i].new_cases = std::nullopt;
    } else {
      series[i].new_cases = series[i].total - series[i - 1].total;
    }
  }
  return series;
}

/// Outer join of the two sources on date: dates seen in only one source carry
/// missing values on the other side.
inline DistrictDataset merge_sources(const EnvTable& env, const std::vector<CasePoint>& cases,
                                     std::string district_id) {
  std::map<Date, DailyRecord> merged;
  for (const auto& [date, values] : env.rows) {
    DailyRecord rec;
    rec.date = date;
    rec.env = values;
    merged.emplace(date, rec);
  }
  for (const auto& cp : cases) {
    auto [it, inserted] = merged.try_emplace(cp.date);
    if (inserted) it->second.date = cp.date;
    it->second.total_cases = cp.total;
    it->second.new_cases = cp.new_cases;
  }

  DistrictDataset ds;
  ds.district_id = std::move(district_id);
  ds.schema = env.schema;
  ds.records.reserve(merged.size());
  for (auto& [date, rec] : merged) ds.records.push_back(rec);
  return ds;
}

/// Why each dropped row was dropped. A row failing several checks is counted
/// once, under the first matching reason in the order below.
struct CleanAudit {
  std::size_t input_rows = 0;
  std::size_t kept_rows = 0;
  std::size_t removed_missing_new_cases = 0;
  std::size_t removed_negative_new_cases = 0;
  std::size_t removed_missing_env = 0;
};

/// Drop rows with missing or negative new_cases and rows missing any variable
/// of the dataset's declared schema. Date order is preserved.
inline DistrictDataset clean(const DistrictDataset& ds, CleanAudit* audit = nullptr) {
  CleanAudit local;
  local.input_rows = ds.records.size();

  DistrictDataset out;
  out.district_id = ds.district_id;
  out.schema = ds.schema;
  out.provenance = ds.provenance;
  for (const auto& rec : ds.records) {
    if (!rec.new_cases) {
      ++local.removed_missing_new_cases;
      continue;
    }
    if (*rec.new_cases < 0) {
      ++local.removed_negative_new_cases;
      continue;
    }
    bool env_complete = true;
    for (auto v : ds.schema) {
      if (!rec.env_value(v)) {
        env_complete = false;
        break;
      }
    }
    if (!env_complete) {
      ++local.removed_missing_env;
      continue;
    }
    out.records.push_back(rec);
  }
  local.kept_rows = out.records.size();
  if (audit) *audit = local;
  if (out.records.empty()) throw EmptyAfterClean(ds.district_id);
  return out;
}

}  // namespace epilag
