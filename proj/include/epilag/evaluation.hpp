#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include <nlohmann/json.hpp>

#include "epilag/dataset.hpp"
#include "epilag/errors.hpp"
#include "epilag/lag.hpp"
#include "epilag/metrics.hpp"
#include "epilag/model.hpp"
#include "epilag/parallel.hpp"
#include "epilag/rng.hpp"

namespace epilag {

// ---------------------------------------------------------------------------
// Splitting
// ---------------------------------------------------------------------------

struct SplitPlan {
  std::vector<std::size_t> train_indices;
  std::vector<std::size_t> test_indices;
  std::uint64_t seed = 0;
};

/// Uniformly random 70/30 partition; |train| = round(train_frac * M).
inline SplitPlan holdout_split(std::size_t m, std::uint64_t seed, double train_frac = 0.7) {
  if (m < 10) throw TooFewSamples(m, 10);
  std::vector<std::size_t> order(m);
  for (std::size_t i = 0; i < m; ++i) order[i] = i;
  Rng rng(derive_seed(seed, "holdout.shuffle"));
  rng.shuffle(order);

  auto n_train = static_cast<std::size_t>(std::llround(train_frac * static_cast<double>(m)));
  SplitPlan plan;
  plan.seed = seed;
  plan.train_indices.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n_train));
  plan.test_indices.assign(order.begin() + static_cast<std::ptrdiff_t>(n_train), order.end());
  return plan;
}

inline FeatureMatrix take_rows(const FeatureMatrix& x, const std::vector<std::size_t>& rows) {
  FeatureMatrix out;
  out.rows = rows.size();
  out.cols = x.cols;
  out.feature_names = x.feature_names;
  out.values.reserve(rows.size() * x.cols);
  for (auto r : rows) {
    auto row = x.row(r);
    out.values.insert(out.values.end(), row.begin(), row.end());
  }
  return out;
}

inline TargetVector take(const TargetVector& y, const std::vector<std::size_t>& rows) {
  TargetVector out;
  out.reserve(rows.size());
  for (auto r : rows) out.push_back(y[r]);
  return out;
}

// ---------------------------------------------------------------------------
// Model fitting façade shared by CV, grid search and experiments
// ---------------------------------------------------------------------------

using ModelSpec = std::variant<TreeSpec, ForestSpec, BoostSpec, MlpSpec>;

inline TrainedModel fit_model(const FeatureMatrix& x, const TargetVector& y,
                              const ModelSpec& spec, std::size_t jobs = 1) {
  if (const auto* ts = std::get_if<TreeSpec>(&spec))
    return TreeModel{*ts, RegressionTree::fit(x, y, *ts)};
  if (const auto* fs = std::get_if<ForestSpec>(&spec)) return RandomForest::fit(x, y, *fs, jobs);
  if (const auto* bs = std::get_if<BoostSpec>(&spec)) return BoostedTrees::fit(x, y, *bs);
  return fit_mlp(x, y, std::get<MlpSpec>(spec));
}

// ---------------------------------------------------------------------------
// k-fold cross validation
// ---------------------------------------------------------------------------

struct CvResult {
  double mean = 0.0;
  double std_dev = 0.0;  // population std over fold scores, the paper's "± DS"
  std::vector<double> fold_scores;
  std::size_t skipped_folds = 0;  // folds whose held-out R² was undefined
};

/// Shuffled k-fold CV scored by held-out R². Folds are near-equal (the first
/// M mod k folds get one extra sample); every sample is tested exactly once.
/// Folds where R² is undefined (constant held-out target) are skipped.
inline CvResult kfold_cv(
    const FeatureMatrix& x, const TargetVector& y,
    const std::function<TrainedModel(const FeatureMatrix&, const TargetVector&)>& fit,
    std::size_t k = 5, std::uint64_t seed = 0) {
  const std::size_t m = x.rows;
  if (m < k) throw TooFewSamples(m, k);

  std::vector<std::size_t> order(m);
  for (std::size_t i = 0; i < m; ++i) order[i] = i;
  Rng rng(derive_seed(seed, "kfold.shuffle"));
  rng.shuffle(order);

  CvResult result;
  std::size_t start = 0;
  for (std::size_t fold = 0; fold < k; ++fold) {
    std::size_t fold_size = m / k + (fold < m % k ? 1 : 0);
    std::vector<std::size_t> test(order.begin() + static_cast<std::ptrdiff_t>(start),
                                  order.begin() + static_cast<std::ptrdiff_t>(start + fold_size));
    std::vector<std::size_t> train;
    train.reserve(m - fold_size);
    train.insert(train.end(), order.begin(), order.begin() + static_cast<std::ptrdiff_t>(start));
    train.insert(train.end(), order.begin() + static_cast<std::ptrdiff_t>(start + fold_size),
                 order.end());
    start += fold_size;

    TrainedModel model = fit(take_rows(x, train), take(y, train));
    TargetVector pred = predict(model, take_rows(x, test));
    TargetVector observed = take(y, test);
    try {
      result.fold_scores.push_back(r2(observed, pred));
    } catch (const ConstantTarget&) {
      ++result.skipped_folds;
    }
  }
  if (result.fold_scores.empty()) throw ConstantTarget("every CV fold had a constant target");

  double mean = 0.0;
  for (double s : result.fold_scores) mean += s;
  mean /= static_cast<double>(result.fold_scores.size());
  double var = 0.0;
  for (double s : result.fold_scores) var += (s - mean) * (s - mean);
  var /= static_cast<double>(result.fold_scores.size());
  result.mean = mean;
  result.std_dev = std::sqrt(var);
  return result;
}

// ---------------------------------------------------------------------------
// Grid search over the forest hyperparameters
// ---------------------------------------------------------------------------

struct GridSpec {
  std::vector<int> max_depth_values = {3, 4, 5, 6};
  std::vector<std::size_t> n_estimators_values = {10, 50, 100, 1000};
};

struct GridCell {
  int max_depth = 0;
  std::size_t n_estimators = 0;
  double cv_mean = 0.0;
  double cv_std = 0.0;
};

struct GridResult {
  ForestSpec best;
  std::vector<GridCell> cells;  // in enumeration order: depth-major
};

/// Evaluate every (max_depth, n_estimators) cell by k-fold CV and return the
/// argmax of the mean score. All cells share the same fold split and forest
/// seed, so the comparison isolates the hyperparameters; ties prefer fewer
/// estimators, then shallower trees. Deterministic for any `jobs`.
inline GridResult grid_search(const FeatureMatrix& x, const TargetVector& y,
                              const GridSpec& grid, std::size_t k = 5, std::uint64_t seed = 0,
                              std::size_t jobs = 1, const ForestSpec& base = ForestSpec{}) {
  if (grid.max_depth_values.empty() || grid.n_estimators_values.empty())
    throw ConfigError("grid value lists must be nonempty");

  struct Cell {
    int depth;
    std::size_t n_est;
  };
  std::vector<Cell> cells;
  for (int d : grid.max_depth_values)
    for (std::size_t n : grid.n_estimators_values) cells.push_back({d, n});

  GridResult result;
  result.cells.resize(cells.size());
  std::uint64_t fold_seed = derive_seed(seed, "grid.folds");
  std::uint64_t forest_seed = derive_seed(seed, "grid.forest");

  parallel_for(cells.size(), jobs, [&](std::size_t i) {
    ForestSpec spec = base;
    spec.max_depth = cells[i].depth;
    spec.n_estimators = cells[i].n_est;
    spec.seed = forest_seed;
    CvResult cv = kfold_cv(
        x, y,
        [&spec](const FeatureMatrix& xt, const TargetVector& yt) {
          return TrainedModel{RandomForest::fit(xt, yt, spec)};
        },
        k, fold_seed);
    result.cells[i] = {cells[i].depth, cells[i].n_est, cv.mean, cv.std_dev};
  });

  std::size_t best = 0;
  for (std::size_t i = 1; i < result.cells.size(); ++i) {
    const auto& a = result.cells[i];
    const auto& b = result.cells[best];
    bool better = a.cv_mean > b.cv_mean ||
                  (a.cv_mean == b.cv_mean &&
                   (a.n_estimators < b.n_estimators ||
                    (a.n_estimators == b.n_estimators && a.max_depth < b.max_depth)));
    if (better) best = i;
  }
  result.best = base;
  result.best.max_depth = result.cells[best].max_depth;
  result.best.n_estimators = result.cells[best].n_estimators;
  result.best.seed = forest_seed;
  return result;
}

// ---------------------------------------------------------------------------
// End-to-end experiment on a district dataset
// ---------------------------------------------------------------------------

struct LaggedDesign {
  FeatureMatrix x;
  TargetVector y;
  std::vector<Date> dates;  // the environmental-measurement dates
};

/// Design matrix for predicting new_cases at d + lag_days from the
/// environmental medians at d. The join is calendar-based, like lag_align.
inline LaggedDesign lagged_design(const DistrictDataset& ds, int lag_days,
                                  std::size_t min_rows = kDefaultMinOverlap) {
  std::unordered_map<int, const DailyRecord*> by_serial;
  by_serial.reserve(ds.records.size());
  for (const auto& rec : ds.records) by_serial.emplace(rec.date.serial(), &rec);

  LaggedDesign design;
  design.x.cols = ds.schema.size();
  for (auto v : ds.schema) design.x.feature_names.emplace_back(variable_name(v));

  for (const auto& rec : ds.records) {
    bool complete = true;
    for (auto v : ds.schema)
      if (!rec.env_value(v)) complete = false;
    if (!complete) continue;
    auto it = by_serial.find(rec.date.serial() + lag_days);
    if (it == by_serial.end() || !it->second->new_cases) continue;
    for (auto v : ds.schema) design.x.values.push_back(*rec.env_value(v));
    design.y.push_back(static_cast<double>(*it->second->new_cases));
    design.dates.push_back(rec.date);
  }
  design.x.rows = design.y.size();
  if (design.x.rows < min_rows) throw InsufficientOverlap(design.x.rows, min_rows);
  return design;
}

struct PerSamplePoint {
  Date date;
  double observed = 0.0;
  double predicted = 0.0;
};

struct EvaluationReport {
  std::string model_id;
  std::string district_id;
  int lag_days = 0;
  double rmse = 0.0;
  double mae = 0.0;
  double r2 = 0.0;
  double cv_mean = 0.0;
  double cv_std = 0.0;
  std::size_t cv_skipped_folds = 0;
  std::size_t n_train = 0;
  std::size_t n_test = 0;
  std::vector<PerSamplePoint> per_sample;
};

/// The full §-style protocol for one (district, model, lag) cell: lagged
/// design matrix, random 70/30 holdout, fit, holdout metrics, k-fold CV over
/// the entire design, and the predicted-vs-observed series of every sample
/// (from the holdout-trained model, in date order).
inline std::pair<EvaluationReport, TrainedModel> run_experiment(
    const DistrictDataset& ds, int lag_days, const ModelSpec& spec, std::uint64_t seed,
    std::size_t k = 5, std::size_t min_rows = kDefaultMinOverlap, std::size_t jobs = 1) {
  LaggedDesign design = lagged_design(ds, lag_days, min_rows);
  SplitPlan plan = holdout_split(design.x.rows, seed);

  FeatureMatrix x_train = take_rows(design.x, plan.train_indices);
  TargetVector y_train = take(design.y, plan.train_indices);
  FeatureMatrix x_test = take_rows(design.x, plan.test_indices);
  TargetVector y_test = take(design.y, plan.test_indices);

  TrainedModel model = fit_model(x_train, y_train, spec, jobs);
  TargetVector pred_test = predict(model, x_test);

  EvaluationReport report;
  report.model_id = model_kind(model);
  report.district_id = ds.district_id;
  report.lag_days = lag_days;
  report.rmse = epilag::rmse(y_test, pred_test);
  report.mae = epilag::mae(y_test, pred_test);
  report.r2 = epilag::r2(y_test, pred_test);
  report.n_train = plan.train_indices.size();
  report.n_test = plan.test_indices.size();

  CvResult cv = kfold_cv(
      design.x, design.y,
      [&spec, jobs](const FeatureMatrix& xt, const TargetVector& yt) {
        return fit_model(xt, yt, spec, jobs);
      },
      k, seed);
  report.cv_mean = cv.mean;
  report.cv_std = cv.std_dev;
  report.cv_skipped_folds = cv.skipped_folds;

  TargetVector pred_all = predict(model, design.x);
  report.per_sample.reserve(design.x.rows);
  for (std::size_t i = 0; i < design.x.rows; ++i)
    report.per_sample.push_back({design.dates[i], design.y[i], pred_all[i]});
  return {std::move(report), std::move(model)};
}

// ---------------------------------------------------------------------------
// Report serialization
// ---------------------------------------------------------------------------

inline nlohmann::json report_to_json(const EvaluationReport& report) {
  nlohmann::json per_sample = nlohmann::json::array();
  for (const auto& p : report.per_sample)
    per_sample.push_back(
        {{"date", p.date.to_string()}, {"observed", p.observed}, {"predicted", p.predicted}});
  return nlohmann::json{{"model_id", report.model_id},
                        {"district", report.district_id},
                        {"lag_days", report.lag_days},
                        {"rmse", report.rmse},
                        {"mae", report.mae},
                        {"r2", report.r2},
                        {"cv_mean", report.cv_mean},
                        {"cv_std", report.cv_std},
                        {"cv_skipped_folds", report.cv_skipped_folds},
                        {"n_train", report.n_train},
                        {"n_test", report.n_test},
                        {"per_sample", std::move(per_sample)}};
}

inline std::string predictions_to_csv(const EvaluationReport& report) {
  std::string out = "date,observed,predicted\n";
  for (const auto& p : report.per_sample) {
    out += p.date.to_string();
    out += ',';
    out += format_double(p.observed);
    out += ',';
    out += format_double(p.predicted);
    out += '\n';
  }
  return out;
}

}  // namespace epilag
