#pragma once

#include <cstdint>
#include <numeric>
#include <vector>

#include "epilag/matrix.hpp"
#include "epilag/parallel.hpp"
#include "epilag/rng.hpp"
#include "epilag/tree.hpp"

namespace epilag {

struct ForestSpec {
  std::size_t n_estimators = 100;
  int max_depth = 5;
  std::uint64_t seed = 0;
  std::size_t min_samples_leaf = 1;
  bool bootstrap = true;  // test hook; production forests always bootstrap
};

/// Bagged regression trees. Every tree draws a with-replacement sample of
/// size M from a seed derived from (spec.seed, tree index), so the fit is
/// bit-identical no matter how many threads build it.
class RandomForest {
 public:
  static RandomForest fit(const FeatureMatrix& x, const TargetVector& y, const ForestSpec& spec,
                          std::size_t jobs = 1) {
    RandomForest forest;
    forest.spec_ = spec;
    forest.n_features_ = x.cols;
    forest.trees_.resize(spec.n_estimators);

    TreeSpec tree_spec{spec.max_depth, spec.min_samples_leaf};
    parallel_for(spec.n_estimators, jobs, [&](std::size_t t) {
      std::vector<std::size_t> sample;
      if (spec.bootstrap) {
        Rng rng(derive_seed(spec.seed, "forest.tree", t));
        sample.resize(x.rows);
        for (auto& s : sample) s = static_cast<std::size_t>(rng.bounded(x.rows));
      } else {
        sample.resize(x.rows);
        std::iota(sample.begin(), sample.end(), std::size_t{0});
      }
      forest.trees_[t] = RegressionTree::fit_on(x, y, sample, tree_spec);
    });
    return forest;
  }

  /// Mean of the tree predictions, accumulated in tree order.
  double predict_row(std::span<const double> row) const {
    double sum = 0.0;
    for (const auto& tree : trees_) sum += tree.predict_row(row);
    return sum / static_cast<double>(trees_.size());
  }

  TargetVector predict(const FeatureMatrix& x) const {
    if (x.cols != n_features_) throw DimensionMismatch(x.cols, n_features_);
    TargetVector out(x.rows);
    for (std::size_t r = 0; r < x.rows; ++r) out[r] = predict_row(x.row(r));
    return out;
  }

  const std::vector<RegressionTree>& trees() const { return trees_; }
  std::vector<RegressionTree>& mutable_trees() { return trees_; }
  const ForestSpec& spec() const { return spec_; }
  std::size_t n_features() const { return n_features_; }

  static RandomForest assemble(ForestSpec spec, std::vector<RegressionTree> trees,
                               std::size_t n_features) {
    RandomForest f;
    f.spec_ = spec;
    f.trees_ = std::move(trees);
    f.n_features_ = n_features;
    return f;
  }

 private:
  ForestSpec spec_;
  std::vector<RegressionTree> trees_;
  std::size_t n_features_ = 0;
};

}  // namespace epilag
