#pragma once

#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include <nlohmann/json.hpp>

#include "epilag/correlation.hpp"
#include "epilag/csv.hpp"
#include "epilag/dataset.hpp"
#include "epilag/errors.hpp"
#include "epilag/variables.hpp"

namespace epilag {

inline constexpr int kDefaultMaxLag = 60;
inline constexpr std::size_t kDefaultMinOverlap = 30;

struct LagPairs {
  std::vector<double> x;  // environmental value at date d
  std::vector<double> y;  // new_cases at date d + lag
};

/// Pair the environmental series with the case series shifted forward by
/// `lag_days` calendar days. The join is calendar-based: a date d contributes
/// a pair only when both d and d + lag_days exist in the dataset, so holes
/// left by cleaning never misalign days.
inline LagPairs lag_align(const DistrictDataset& ds, VariableKind v, int lag_days,
                          std::size_t min_overlap = kDefaultMinOverlap) {
  std::unordered_map<int, const DailyRecord*> by_serial;
  by_serial.reserve(ds.records.size());
  for (const auto& rec : ds.records) by_serial.emplace(rec.date.serial(), &rec);

  LagPairs pairs;
  for (const auto& rec : ds.records) {
    auto env = rec.env_value(v);
    if (!env) continue;
    auto it = by_serial.find(rec.date.serial() + lag_days);
    if (it == by_serial.end()) continue;
    const auto& target = *it->second;
    if (!target.new_cases) continue;
    pairs.x.push_back(*env);
    pairs.y.push_back(static_cast<double>(*target.new_cases));
  }
  if (pairs.x.size() < min_overlap) throw InsufficientOverlap(pairs.x.size(), min_overlap);
  return pairs;
}

/// Correlation curve of one variable over lags 0..max_lag. Lags that could
/// not be scored (insufficient overlap, constant series) are absent.
struct LagCorrelationCurve {
  VariableKind variable = VariableKind::temp_median;
  int max_lag = kDefaultMaxLag;
  std::vector<std::optional<CorrelationResult>> points;  // indexed by lag
  int peak_lag = 0;
  double peak_r = 0.0;

  const CorrelationResult& peak() const { return *points[static_cast<std::size_t>(peak_lag)]; }
};

/// Sweep Spearman correlations over lags 0..max_lag and locate the peak, the
/// lag maximizing |r| among scored lags (ties resolved toward the smaller
/// lag). Throws NoValidLag when no lag could be scored.
inline LagCorrelationCurve lag_sweep(const DistrictDataset& ds, VariableKind v,
                                     int max_lag = kDefaultMaxLag,
                                     std::size_t min_overlap = kDefaultMinOverlap) {
  LagCorrelationCurve curve;
  curve.variable = v;
  curve.max_lag = max_lag;
  curve.points.resize(static_cast<std::size_t>(max_lag) + 1);

  bool any = false;
  for (int lag = 0; lag <= max_lag; ++lag) {
    try {
      LagPairs pairs = lag_align(ds, v, lag, min_overlap);
      curve.points[static_cast<std::size_t>(lag)] = correlate_spearman(pairs.x, pairs.y);
    } catch (const InsufficientOverlap&) {
      continue;
    } catch (const ConstantInput&) {
      continue;
    }
    double a = std::fabs(curve.points[static_cast<std::size_t>(lag)]->r);
    if (!any || a > std::fabs(curve.peak_r)) {
      curve.peak_lag = lag;
      curve.peak_r = curve.points[static_cast<std::size_t>(lag)]->r;
      any = true;
    }
  }
  if (!any) throw NoValidLag("variable " + std::string(variable_name(v)) + " in district " +
                             ds.district_id);
  return curve;
}

// ---------------------------------------------------------------------------
// Plot-ready exports
// ---------------------------------------------------------------------------

inline std::string curve_to_csv(const LagCorrelationCurve& curve) {
  std::string out = "variable,lag,r,p,n\n";
  for (int lag = 0; lag <= curve.max_lag; ++lag) {
    const auto& pt = curve.points[static_cast<std::size_t>(lag)];
    if (!pt) continue;
    out += std::string(variable_name(curve.variable));
    out += ',';
    out += std::to_string(lag);
    out += ',';
    out += format_double(pt->r);
    out += ',';
    out += format_double(pt->p_value);
    out += ',';
    out += std::to_string(pt->n);
    out += '\n';
  }
  return out;
}

inline nlohmann::json curve_to_json(const LagCorrelationCurve& curve) {
  nlohmann::json points = nlohmann::json::array();
  for (int lag = 0; lag <= curve.max_lag; ++lag) {
    const auto& pt = curve.points[static_cast<std::size_t>(lag)];
    if (!pt) continue;
    points.push_back({{"lag", lag},
                      {"r", pt->r},
                      {"p", pt->p_value},
                      {"n", pt->n},
                      {"p_degenerate", pt->p_degenerate}});
  }
  const auto& peak = curve.peak();
  return nlohmann::json{
      {"variable", std::string(variable_name(curve.variable))},
      {"max_lag", curve.max_lag},
      {"points", std::move(points)},
      {"peak",
       {{"lag", curve.peak_lag},
        {"r", curve.peak_r},
        {"p", peak.p_value},
        {"n", peak.n},
        {"strength", std::string(strength_name(classify_strength(curve.peak_r)))}}},
  };
}

}  // namespace epilag
