#pragma once

#include <cstdint>
#include <vector>

#include "epilag/matrix.hpp"
#include "epilag/tree.hpp"

namespace epilag {

struct BoostSpec {
  std::size_t n_estimators = 100;
  double learning_rate = 0.1;
  int max_depth = 3;
  double l2_lambda = 1.0;
  std::uint64_t seed = 0;
  std::size_t min_samples_leaf = 1;
};

/// Gradient-boosted regression trees for squared-error loss. The base model
/// is the target mean; every round fits a depth-limited tree to the current
/// residuals (the negative gradients) and leaf values are regularized as
/// sum(residuals) / (count + l2_lambda). The final prediction adds the base
/// mean to the learning-rate-scaled sum of tree outputs.
class BoostedTrees {
 public:
  static BoostedTrees fit(const FeatureMatrix& x, const TargetVector& y, const BoostSpec& spec) {
    if (x.rows != y.size()) throw LengthMismatch(x.rows, y.size());
    if (x.rows == 0) throw TooFewSamples(0, 1);

    BoostedTrees model;
    model.spec_ = spec;
    model.n_features_ = x.cols;
    double base = 0.0;
    for (double v : y) base += v;
    base /= static_cast<double>(y.size());
    model.base_ = base;

    TreeSpec tree_spec{spec.max_depth, spec.min_samples_leaf};
    TargetVector pred(y.size(), base);
    TargetVector residuals(y.size());
    model.train_loss_.reserve(spec.n_estimators + 1);
    model.train_loss_.push_back(mse(y, pred));
    for (std::size_t round = 0; round < spec.n_estimators; ++round) {
      for (std::size_t i = 0; i < y.size(); ++i) residuals[i] = y[i] - pred[i];
      RegressionTree tree = RegressionTree::fit(x, residuals, tree_spec, spec.l2_lambda);
      for (std::size_t i = 0; i < y.size(); ++i)
        pred[i] += spec.learning_rate * tree.predict_row(x.row(i));
      model.train_loss_.push_back(mse(y, pred));
      model.trees_.push_back(std::move(tree));
    }
    return model;
  }

  double predict_row(std::span<const double> row) const {
    double sum = 0.0;
    for (const auto& tree : trees_) sum += tree.predict_row(row);
    return base_ + spec_.learning_rate * sum;
  }

  TargetVector predict(const FeatureMatrix& x) const {
    if (x.cols != n_features_) throw DimensionMismatch(x.cols, n_features_);
    TargetVector out(x.rows);
    for (std::size_t r = 0; r < x.rows; ++r) out[r] = predict_row(x.row(r));
    return out;
  }

  double base() const { return base_; }
  /// Training MSE after each round; index 0 is the base model.
  const std::vector<double>& train_loss() const { return train_loss_; }
  const std::vector<RegressionTree>& trees() const { return trees_; }
  std::vector<RegressionTree>& mutable_trees() { return trees_; }
  const BoostSpec& spec() const { return spec_; }
  std::size_t n_features() const { return n_features_; }

  static BoostedTrees assemble(BoostSpec spec, double base, std::vector<RegressionTree> trees,
                               std::size_t n_features) {
    BoostedTrees m;
    m.spec_ = spec;
    m.base_ = base;
    m.trees_ = std::move(trees);
    m.n_features_ = n_features;
    return m;
  }

 private:
  static double mse(const TargetVector& y, const TargetVector& pred) {
    double s = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) {
      double d = y[i] - pred[i];
      s += d * d;
    }
    return s / static_cast<double>(y.size());
  }

  BoostSpec spec_;
  double base_ = 0.0;
  std::vector<RegressionTree> trees_;
  std::vector<double> train_loss_;
  std::size_t n_features_ = 0;
};

}  // namespace epilag
