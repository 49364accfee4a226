#pragma once

#include <array>
#include <cctype>
#include <optional>
#include <string>
#include <string_view>

namespace epilag {

/// The seven environmental variables carried by a district dataset.
enum class VariableKind : int {
  humidity_median = 0,
  no2_median,
  o3_median,
  pm10_median,
  pm25_median,
  so2_median,
  temp_median,
};

inline constexpr std::size_t kVariableCount = 7;

inline constexpr std::array<VariableKind, kVariableCount> kAllVariables = {
    VariableKind::humidity_median, VariableKind::no2_median,  VariableKind::o3_median,
    VariableKind::pm10_median,     VariableKind::pm25_median, VariableKind::so2_median,
    VariableKind::temp_median,
};

/// Canonical column names, in dataset column order.
inline constexpr std::array<std::string_view, kVariableCount> kVariableNames = {
    "humidity_median", "no2_median", "o3_median", "pm10_median",
    "pm2.5_median",    "so2_median", "temp_median",
};

inline constexpr std::array<std::string_view, kVariableCount> kVariableUnits = {
    "percentage", "µg/m³", "µg/m³", "µg/m³", "µg/m³", "µg/m³", "Celsius",
};

inline std::string_view variable_name(VariableKind v) {
  return kVariableNames[static_cast<std::size_t>(v)];
}

inline std::string_view variable_unit(VariableKind v) {
  return kVariableUnits[static_cast<std::size_t>(v)];
}

namespace detail {

// Column-name normalization is table-driven: lowercase the header, then look
// it up here. Extend the table, not the parser, when a new alias shows up.
struct AliasEntry {
  std::string_view alias;
  VariableKind kind;
};

inline constexpr std::array<AliasEntry, 26> kAliasTable = {{
    {"humidity_median", VariableKind::humidity_median},
    {"humidity", VariableKind::humidity_median},
    {"relative_humidity", VariableKind::humidity_median},
    {"rel_humidity", VariableKind::humidity_median},
    {"no2_median", VariableKind::no2_median},
    {"no2", VariableKind::no2_median},
    {"nitrogen_dioxide", VariableKind::no2_median},
    {"o3_median", VariableKind::o3_median},
    {"o3", VariableKind::o3_median},
    {"ozone", VariableKind::o3_median},
    {"ozone_median", VariableKind::o3_median},
    {"pm10_median", VariableKind::pm10_median},
    {"pm10", VariableKind::pm10_median},
    {"pm2.5_median", VariableKind::pm25_median},
    {"pm25_median", VariableKind::pm25_median},
    {"pm2.5", VariableKind::pm25_median},
    {"pm25", VariableKind::pm25_median},
    {"pm2_5", VariableKind::pm25_median},
    {"pm2_5_median", VariableKind::pm25_median},
    {"so2_median", VariableKind::so2_median},
    {"so2", VariableKind::so2_median},
    {"sulfur_dioxide", VariableKind::so2_median},
    {"temp_median", VariableKind::temp_median},
    {"temp", VariableKind::temp_median},
    {"temperature", VariableKind::temp_median},
    {"temperature_median", VariableKind::temp_median},
}};

inline std::string normalize_column(std::string_view name) {
  std::string out;
  out.reserve(name.size());
  for (unsigned char c : name) {
    if (c == ' ' || c == '\t') continue;
    out += static_cast<char>(std::tolower(c));
  }
  return out;
}

}  // namespace detail

/// Map a raw CSV header cell onto a VariableKind, or nullopt if it is not an
/// environmental column.
inline std::optional<VariableKind> parse_variable(std::string_view column_name) {
  std::string norm = detail::normalize_column(column_name);
  for (const auto& e : detail::kAliasTable) {
    if (norm == e.alias) return e.kind;
  }
  return std::nullopt;
}

inline bool is_date_column(std::string_view column_name) {
  std::string norm = detail::normalize_column(column_name);
  return norm == "date" || norm == "data" || norm == "day" || norm == "giorno";
}

}  // namespace epilag
