#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace epilag {

/// Row-major M x N design matrix with named feature columns.
struct FeatureMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> values;  // rows * cols
  std::vector<std::string> feature_names;

  double at(std::size_t r, std::size_t c) const { return values[r * cols + c]; }
  double& at(std::size_t r, std::size_t c) { return values[r * cols + c]; }
  std::span<const double> row(std::size_t r) const { return {values.data() + r * cols, cols}; }

  static FeatureMatrix zeros(std::size_t rows, std::size_t cols) {
    FeatureMatrix m;
    m.rows = rows;
    m.cols = cols;
    m.values.assign(rows * cols, 0.0);
    m.feature_names.resize(cols);
    return m;
  }
};

using TargetVector = std::vector<double>;

}  // namespace epilag
