#pragma once

#include <algorithm>
#include <array>
#include <optional>
#include <string>
#include <vector>

#include "epilag/csv.hpp"
#include "epilag/dates.hpp"
#include "epilag/errors.hpp"
#include "epilag/variables.hpp"

namespace epilag {

/// One calendar day of a district: partial environmental map plus case counts.
struct DailyRecord {
  Date date;
  std::array<std::optional<double>, kVariableCount> env{};
  std::optional<long long> total_cases;
  std::optional<long long> new_cases;

  std::optional<double> env_value(VariableKind v) const {
    return env[static_cast<std::size_t>(v)];
  }
  void set_env(VariableKind v, double value) { env[static_cast<std::size_t>(v)] = value; }
};

struct SourceRef {
  std::string uri;
  std::string retrieved_at;  // set for remote fetches only; never written to disk
};

/// Date-sorted daily records for one district. `schema` declares which
/// environmental variables this dataset carries; cleaning is schema-relative.
struct DistrictDataset {
  std::string district_id;
  std::vector<VariableKind> schema;
  std::vector<DailyRecord> records;
  std::vector<SourceRef> provenance;

  bool has_variable(VariableKind v) const {
    return std::find(schema.begin(), schema.end(), v) != schema.end();
  }
};

inline void sort_schema(std::vector<VariableKind>& schema) {
  std::sort(schema.begin(), schema.end());
  schema.erase(std::unique(schema.begin(), schema.end()), schema.end());
}

// ---------------------------------------------------------------------------
// Canonical dataset CSV: date, the seven environmental columns, total_cases,
// new_cases. Missing values are empty cells. Reading infers the schema from
// the columns that carry at least one value, so clean datasets round-trip.
// ---------------------------------------------------------------------------

inline std::string canonical_csv_header() {
  std::string h = "date";
  for (auto name : kVariableNames) {
    h += ',';
    h += name;
  }
  h += ",total_cases,new_cases\n";
  return h;
}

inline std::string write_canonical_csv(const DistrictDataset& ds) {
  std::string out = canonical_csv_header();
  for (const auto& rec : ds.records) {
    out += rec.date.to_string();
    for (std::size_t i = 0; i < kVariableCount; ++i) {
      out += ',';
      if (rec.env[i]) out += format_double(*rec.env[i]);
    }
    out += ',';
    if (rec.total_cases) out += std::to_string(*rec.total_cases);
    out += ',';
    if (rec.new_cases) out += std::to_string(*rec.new_cases);
    out += '\n';
  }
  return out;
}

inline DistrictDataset read_canonical_csv(std::string_view text, std::string district_id,
                                          std::string source = "") {
  CsvTable table = parse_csv(text, "canonical dataset");
  std::array<int, kVariableCount> var_col;
  var_col.fill(-1);
  int date_col = -1, total_col = -1, new_col = -1;
  for (std::size_t c = 0; c < table.header.size(); ++c) {
    const auto& name = table.header[c];
    if (is_date_column(name)) {
      date_col = static_cast<int>(c);
    } else if (auto v = parse_variable(name)) {
      var_col[static_cast<std::size_t>(*v)] = static_cast<int>(c);
    } else if (detail::normalize_column(name) == "total_cases") {
      total_col = static_cast<int>(c);
    } else if (detail::normalize_column(name) == "new_cases") {
      new_col = static_cast<int>(c);
    }
  }
  if (date_col < 0) throw MalformedCsv("canonical dataset lacks a date column");

  DistrictDataset ds;
  ds.district_id = std::move(district_id);
  if (!source.empty()) ds.provenance.push_back({std::move(source), ""});
  for (const auto& row : table.rows) {
    if (static_cast<std::size_t>(date_col) >= row.size()) continue;
    DailyRecord rec;
    rec.date = parse_date(row[static_cast<std::size_t>(date_col)]);
    for (std::size_t i = 0; i < kVariableCount; ++i) {
      int c = var_col[i];
      if (c >= 0 && static_cast<std::size_t>(c) < row.size())
        rec.env[i] = try_parse_double(row[static_cast<std::size_t>(c)]);
    }
    if (total_col >= 0 && static_cast<std::size_t>(total_col) < row.size())
      rec.total_cases = try_parse_ll(row[static_cast<std::size_t>(total_col)]);
    if (new_col >= 0 && static_cast<std::size_t>(new_col) < row.size())
      rec.new_cases = try_parse_ll(row[static_cast<std::size_t>(new_col)]);
    ds.records.push_back(rec);
  }
  std::sort(ds.records.begin(), ds.records.end(),
            [](const DailyRecord& a, const DailyRecord& b) { return a.date < b.date; });
  for (std::size_t i = 1; i < ds.records.size(); ++i) {
    if (ds.records[i].date == ds.records[i - 1].date)
      throw MalformedCsv("duplicate date " + ds.records[i].date.to_string());
  }
  for (std::size_t i = 0; i < kVariableCount; ++i) {
    bool any = std::any_of(ds.records.begin(), ds.records.end(),
                           [i](const DailyRecord& r) { return r.env[i].has_value(); });
    if (any) ds.schema.push_back(kAllVariables[i]);
  }
  return ds;
}

}  // namespace epilag
