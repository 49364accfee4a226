#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "epilag/dataset.hpp"
#include "epilag/dates.hpp"
#include "epilag/errors.hpp"
#include "epilag/rng.hpp"
#include "epilag/variables.hpp"

namespace epilag::synth {

enum class LinkDirection { increasing, decreasing };

struct PlantedSignal {
  VariableKind kind = VariableKind::temp_median;
  int lag = 10;
  LinkDirection link = LinkDirection::decreasing;
  double effect_weight = 3.0;
};

/// Parameters of a generated district. Every environmental series is a
/// 365-day seasonal sinusoid plus a 7-day ripple plus day-scale noise; the
/// case series is a monotone map of the weighted, lag-shifted sum of those
/// series plus observation noise, floored at zero and rounded to integers.
struct SyntheticSpec {
  int n_days = 400;
  std::vector<PlantedSignal> variables;
  double noise_sd = 1.0;
  std::uint64_t seed = 0;
  std::string district_id = "synthetic";

  void validate() const {
    if (n_days < 1) throw ConfigError("n_days must be positive");
    if (noise_sd < 0.0) throw ConfigError("noise_sd must be non-negative");
    std::vector<VariableKind> seen;
    for (const auto& v : variables) {
      if (v.lag < 0 || v.lag > 60)
        throw ConfigError("planted lag must be in [0, 60], got " + std::to_string(v.lag));
      if (n_days < v.lag + 90)
        throw ConfigError("n_days must be at least planted lag + 90 (" +
                          std::to_string(v.lag + 90) + "), got " + std::to_string(n_days));
      if (v.effect_weight < 0.0) throw ConfigError("effect_weight must be non-negative");
      if (std::find(seen.begin(), seen.end(), v.kind) != seen.end())
        throw ConfigError("duplicate planted variable " + std::string(variable_name(v.kind)));
      seen.push_back(v.kind);
    }
  }
};

namespace detail {

// Variance mix of the environmental signal (unit total variance): a smooth
// seasonal component, a weekly ripple, and enough day-scale structure that
// shifting by a single day already costs correlation. The day-scale share is
// what makes planted-lag recovery sharp.
inline constexpr double kSeasonalAmp = 0.83666002653407556;   // var 0.35
inline constexpr double kWeeklyAmp = 0.31622776601683794;     // var 0.05
inline constexpr double kArRho = 0.5;
inline constexpr double kArSigma = 0.51234753829797997;       // stationary var 0.35
inline constexpr double kWhiteSigma = 0.5;                    // var 0.25

inline constexpr double kTwoPi = 6.283185307179586;

struct EnvParams {
  double base;
  double scale;
};

// Plausible magnitudes per variable; correlations are rank-invariant to this
// affine map, it only makes the CSVs look like real measurements.
inline EnvParams env_params(VariableKind kind) {
  switch (kind) {
    case VariableKind::humidity_median: return {65.0, 12.0};
    case VariableKind::no2_median: return {30.0, 12.0};
    case VariableKind::o3_median: return {50.0, 20.0};
    case VariableKind::pm10_median: return {35.0, 14.0};
    case VariableKind::pm25_median: return {22.0, 10.0};
    case VariableKind::so2_median: return {6.0, 2.0};
    case VariableKind::temp_median: return {14.0, 9.0};
  }
  return {0.0, 1.0};
}

/// Unit-variance signal over day indices [-lead, n_days). The lead window
/// lets early case days see lag-shifted values without truncation.
inline std::vector<double> generate_signal(std::uint64_t stream_seed, int lead, int n_days) {
  Rng rng(stream_seed);
  double season_phase = rng.uniform(0.0, 365.0);
  double weekly_phase = rng.uniform(0.0, kTwoPi);

  std::vector<double> z(static_cast<std::size_t>(lead + n_days));
  double ar = rng.normal() * kArSigma / std::sqrt(1.0 - kArRho * kArRho);
  for (int t = 0; t < lead + n_days; ++t) {
    double day = static_cast<double>(t - lead);
    ar = kArRho * ar + kArSigma * rng.normal();
    z[static_cast<std::size_t>(t)] = kSeasonalAmp * std::sin(kTwoPi * (day + season_phase) / 365.0) +
                                     kWeeklyAmp * std::sin(kTwoPi * day / 7.0 + weekly_phase) +
                                     ar + kWhiteSigma * rng.normal();
  }
  return z;
}

inline constexpr double kBaseCases = 500.0;
inline constexpr double kCaseScale = 80.0;

}  // namespace detail

/// Deterministic synthetic district with known environmental-to-case lags.
/// The result is already clean: complete over its schema, new_cases >= 0.
inline DistrictDataset generate(const SyntheticSpec& spec) {
  spec.validate();

  int lead = 0;
  for (const auto& v : spec.variables) lead = std::max(lead, v.lag);

  // one independent signal stream per planted variable
  std::vector<std::vector<double>> signals;
  signals.reserve(spec.variables.size());
  for (std::size_t i = 0; i < spec.variables.size(); ++i) {
    signals.push_back(detail::generate_signal(
        derive_seed(spec.seed, "synth.env", static_cast<std::uint64_t>(
                                                static_cast<int>(spec.variables[i].kind))),
        lead, spec.n_days));
  }

  Rng case_noise(derive_seed(spec.seed, "synth.cases"));
  Date start = Date::from_ymd(2020, 1, 1);

  DistrictDataset ds;
  ds.district_id = spec.district_id;
  ds.provenance.push_back({"synth://" + std::to_string(spec.seed), ""});
  for (const auto& v : spec.variables) ds.schema.push_back(v.kind);
  sort_schema(ds.schema);

  long long total = 100;
  for (int d = 0; d < spec.n_days; ++d) {
    DailyRecord rec;
    rec.date = start.plus_days(d);

    double combined = 0.0;
    for (std::size_t i = 0; i < spec.variables.size(); ++i) {
      const auto& v = spec.variables[i];
      double z = signals[i][static_cast<std::size_t>(lead + d)];
      auto params = detail::env_params(v.kind);
      rec.set_env(v.kind, params.base + params.scale * z);
      double shifted = signals[i][static_cast<std::size_t>(lead + d - v.lag)];
      double sign = v.link == LinkDirection::increasing ? 1.0 : -1.0;
      combined += sign * v.effect_weight * shifted;
    }
    combined += spec.noise_sd * case_noise.normal();

    double raw = detail::kBaseCases + detail::kCaseScale * combined;
    auto cases = static_cast<long long>(std::llround(std::max(0.0, raw)));
    rec.new_cases = cases;
    total += cases;
    rec.total_cases = total;
    ds.records.push_back(rec);
  }
  return ds;
}

// ---------------------------------------------------------------------------
// Independent verification oracles (test support; intentionally implemented
// on different code paths than the library primitives they check).
// ---------------------------------------------------------------------------

/// Fractional ranks via binary search in the sorted copy, the textbook
/// r + (s-1)/2 formulation.
inline std::vector<double> oracle_ranks(std::span<const double> v, bool* saw_ties = nullptr) {
  std::vector<double> sorted(v.begin(), v.end());
  std::sort(sorted.begin(), sorted.end());
  std::vector<double> ranks(v.size());
  bool ties = false;
  for (std::size_t i = 0; i < v.size(); ++i) {
    auto lb = std::lower_bound(sorted.begin(), sorted.end(), v[i]);
    auto ub = std::upper_bound(sorted.begin(), sorted.end(), v[i]);
    auto r = static_cast<double>(lb - sorted.begin()) + 1.0;
    auto s = static_cast<double>(ub - lb);
    if (s > 1.0) ties = true;
    ranks[i] = r + (s - 1.0) * 0.5;
  }
  if (saw_ties) *saw_ties = ties;
  return ranks;
}

/// Independent Spearman: the closed form on tie-free data, Pearson on ranks
/// (sum formulation) otherwise.
inline double oracle_spearman(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw LengthMismatch(x.size(), y.size());
  const std::size_t size = x.size();
  bool ties_x = false, ties_y = false;
  std::vector<double> rx = oracle_ranks(x, &ties_x);
  std::vector<double> ry = oracle_ranks(y, &ties_y);

  if (!ties_x && !ties_y) {
    const double n = static_cast<double>(size);
    if (size < 2) throw ConstantInput("need at least two distinct values");
    double sum_d2 = 0.0;
    for (std::size_t i = 0; i < size; ++i) {
      double d = rx[i] - ry[i];
      sum_d2 += d * d;
    }
    return 1.0 - 6.0 * sum_d2 / (n * (n * n - 1.0));
  }

  double sum_x = 0.0, sum_y = 0.0, sum_xy = 0.0, sum_x2 = 0.0, sum_y2 = 0.0;
  const double n = static_cast<double>(size);
  for (std::size_t i = 0; i < size; ++i) {
    sum_x += rx[i];
    sum_y += ry[i];
    sum_xy += rx[i] * ry[i];
    sum_x2 += rx[i] * rx[i];
    sum_y2 += ry[i] * ry[i];
  }
  double var_x = n * sum_x2 - sum_x * sum_x;
  double var_y = n * sum_y2 - sum_y * sum_y;
  if (var_x <= 0.0) throw ConstantInput("x ranks have zero variance");
  if (var_y <= 0.0) throw ConstantInput("y ranks have zero variance");
  return (n * sum_xy - sum_x * sum_y) / std::sqrt(var_x * var_y);
}

struct SplitOracleResult {
  bool split_found = false;
  double threshold = 0.0;
  double sse = 0.0;  // summed squared deviation of the best children, or of
                     // the root when no split exists
};

/// Globally optimal single split of a one-feature dataset by brute force over
/// every midpoint between consecutive distinct values. Ascending threshold
/// scan with strictly-better comparison, the same tie rule the tree uses.
inline SplitOracleResult oracle_best_split(std::span<const double> x,
                                           std::span<const double> y) {
  if (x.size() != y.size()) throw LengthMismatch(x.size(), y.size());
  const std::size_t n = x.size();

  auto sse_of = [&](const std::vector<std::size_t>& idx) {
    double mean = 0.0;
    for (auto i : idx) mean += y[i];
    mean /= static_cast<double>(idx.size());
    double sse = 0.0;
    for (auto i : idx) sse += (y[i] - mean) * (y[i] - mean);
    return sse;
  };

  std::vector<std::size_t> all(n);
  for (std::size_t i = 0; i < n; ++i) all[i] = i;

  SplitOracleResult best;
  best.sse = sse_of(all);

  std::vector<double> sorted(x.begin(), x.end());
  std::sort(sorted.begin(), sorted.end());
  bool found = false;
  double best_children = 0.0;
  for (std::size_t k = 0; k + 1 < n; ++k) {
    if (sorted[k] == sorted[k + 1]) continue;
    double threshold = 0.5 * (sorted[k] + sorted[k + 1]);
    std::vector<std::size_t> left, right;
    for (std::size_t i = 0; i < n; ++i) (x[i] <= threshold ? left : right).push_back(i);
    double children = sse_of(left) + sse_of(right);
    if (!found || children < best_children) {
      found = true;
      best_children = children;
      best.threshold = threshold;
    }
  }
  if (found && best_children < best.sse) {
    best.split_found = true;
    best.sse = best_children;
  } else {
    best.split_found = false;
    best.threshold = 0.0;
  }
  return best;
}

}  // namespace epilag::synth
