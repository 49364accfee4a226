#pragma once

#include <algorithm>
#include <cstdint>
#include <limits>
#include <numeric>
#include <span>
#include <vector>

#include "epilag/errors.hpp"
#include "epilag/matrix.hpp"

namespace epilag {

struct TreeSpec {
  int max_depth = 5;
  std::size_t min_samples_leaf = 1;
};

/// feature < 0 marks a leaf. Internal nodes route row[feature] <= threshold
/// to `left`, otherwise to `right`.
struct TreeNode {
  int feature = -1;
  double threshold = 0.0;
  std::int32_t left = -1;
  std::int32_t right = -1;
  double value = 0.0;
  std::uint32_t n_samples = 0;

  bool is_leaf() const { return feature < 0; }
};

/// Binary regression tree grown by greedy variance reduction: each split
/// minimizes the summed squared deviation of the two children. Features are
/// scanned in column order and thresholds in ascending value order with a
/// strictly-better comparison, so fitting is fully deterministic.
class RegressionTree {
 public:
  static RegressionTree fit(const FeatureMatrix& x, const TargetVector& y, const TreeSpec& spec,
                            double leaf_lambda = 0.0) {
    std::vector<std::size_t> all(x.rows);
    std::iota(all.begin(), all.end(), std::size_t{0});
    return fit_on(x, y, all, spec, leaf_lambda);
  }

  /// Fit on a subset of rows (bootstrap samples may repeat indices).
  /// `leaf_lambda` regularizes leaf values as sum/(count + lambda); zero
  /// gives the plain leaf mean.
  static RegressionTree fit_on(const FeatureMatrix& x, const TargetVector& y,
                               std::span<const std::size_t> indices, const TreeSpec& spec,
                               double leaf_lambda = 0.0) {
    if (x.rows != y.size()) throw LengthMismatch(x.rows, y.size());
    if (indices.empty()) throw TooFewSamples(0, 1);
    RegressionTree tree;
    tree.n_features_ = x.cols;
    std::vector<std::size_t> idx(indices.begin(), indices.end());
    tree.degenerate_target_ =
        std::all_of(idx.begin(), idx.end(), [&](std::size_t i) { return y[i] == y[idx[0]]; });
    tree.build(x, y, std::move(idx), 0, spec, leaf_lambda);
    return tree;
  }

  double predict_row(std::span<const double> row) const {
    std::int32_t node = 0;
    while (!nodes_[static_cast<std::size_t>(node)].is_leaf()) {
      const TreeNode& nd = nodes_[static_cast<std::size_t>(node)];
      node = row[static_cast<std::size_t>(nd.feature)] <= nd.threshold ? nd.left : nd.right;
    }
    return nodes_[static_cast<std::size_t>(node)].value;
  }

  TargetVector predict(const FeatureMatrix& x) const {
    if (x.cols != n_features_) throw DimensionMismatch(x.cols, n_features_);
    TargetVector out(x.rows);
    for (std::size_t r = 0; r < x.rows; ++r) out[r] = predict_row(x.row(r));
    return out;
  }

  const std::vector<TreeNode>& nodes() const { return nodes_; }
  std::vector<TreeNode>& mutable_nodes() { return nodes_; }
  std::size_t n_features() const { return n_features_; }
  bool degenerate_target() const { return degenerate_target_; }

  static RegressionTree from_nodes(std::vector<TreeNode> nodes, std::size_t n_features) {
    RegressionTree t;
    t.nodes_ = std::move(nodes);
    t.n_features_ = n_features;
    return t;
  }

 private:
  struct SplitChoice {
    int feature = -1;
    double threshold = 0.0;
    double children_sse = std::numeric_limits<double>::infinity();
  };

  std::int32_t build(const FeatureMatrix& x, const TargetVector& y, std::vector<std::size_t> idx,
                     int depth, const TreeSpec& spec, double leaf_lambda) {
    const std::size_t n = idx.size();
    double sum = 0.0, sum2 = 0.0;
    for (auto i : idx) {
      sum += y[i];
      sum2 += y[i] * y[i];
    }
    double node_sse = sum2 - sum * sum / static_cast<double>(n);

    auto make_leaf = [&]() {
      TreeNode leaf;
      leaf.value = sum / (static_cast<double>(n) + leaf_lambda);
      leaf.n_samples = static_cast<std::uint32_t>(n);
      nodes_.push_back(leaf);
      return static_cast<std::int32_t>(nodes_.size() - 1);
    };

    if (depth >= spec.max_depth || n < 2 * spec.min_samples_leaf || node_sse <= 0.0)
      return make_leaf();

    SplitChoice best = find_best_split(x, y, idx, spec.min_samples_leaf);
    if (best.feature < 0 || best.children_sse >= node_sse) return make_leaf();

    std::vector<std::size_t> left_idx, right_idx;
    left_idx.reserve(n);
    right_idx.reserve(n);
    for (auto i : idx) {
      (x.at(i, static_cast<std::size_t>(best.feature)) <= best.threshold ? left_idx : right_idx)
          .push_back(i);
    }

    TreeNode node;
    node.feature = best.feature;
    node.threshold = best.threshold;
    node.n_samples = static_cast<std::uint32_t>(n);
    nodes_.push_back(node);
    auto self = static_cast<std::int32_t>(nodes_.size() - 1);
    idx.clear();
    idx.shrink_to_fit();
    nodes_[static_cast<std::size_t>(self)].left =
        build(x, y, std::move(left_idx), depth + 1, spec, leaf_lambda);
    nodes_[static_cast<std::size_t>(self)].right =
        build(x, y, std::move(right_idx), depth + 1, spec, leaf_lambda);
    return self;
  }

  static SplitChoice find_best_split(const FeatureMatrix& x, const TargetVector& y,
                                     const std::vector<std::size_t>& idx,
                                     std::size_t min_samples_leaf) {
    const std::size_t n = idx.size();
    SplitChoice best;
    std::vector<std::size_t> order(idx);
    std::vector<double> prefix_sum(n + 1), prefix_sum2(n + 1);

    for (std::size_t f = 0; f < x.cols; ++f) {
      // sort by (value, row index) so equal values have a fixed order
      std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        double va = x.at(a, f), vb = x.at(b, f);
        if (va != vb) return va < vb;
        return a < b;
      });
      prefix_sum[0] = 0.0;
      prefix_sum2[0] = 0.0;
      for (std::size_t k = 0; k < n; ++k) {
        prefix_sum[k + 1] = prefix_sum[k] + y[order[k]];
        prefix_sum2[k + 1] = prefix_sum2[k] + y[order[k]] * y[order[k]];
      }
      for (std::size_t k = min_samples_leaf; k + min_samples_leaf <= n; ++k) {
        if (k == 0 || k == n) continue;
        double lo = x.at(order[k - 1], f);
        double hi = x.at(order[k], f);
        if (lo == hi) continue;
        double nl = static_cast<double>(k);
        double nr = static_cast<double>(n - k);
        double sse_l = prefix_sum2[k] - prefix_sum[k] * prefix_sum[k] / nl;
        double sse_r = (prefix_sum2[n] - prefix_sum2[k]) -
                       (prefix_sum[n] - prefix_sum[k]) * (prefix_sum[n] - prefix_sum[k]) / nr;
        double total = sse_l + sse_r;
        if (total < best.children_sse) {
          best.feature = static_cast<int>(f);
          best.threshold = 0.5 * (lo + hi);
          best.children_sse = total;
        }
      }
    }
    return best;
  }

  std::vector<TreeNode> nodes_;
  std::size_t n_features_ = 0;
  bool degenerate_target_ = false;
};

}  // namespace epilag
