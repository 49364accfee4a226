#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "epilag/matrix.hpp"

namespace epilag {

/// Per-column standardization parameters fitted on the training split.
/// Standard deviation is the population form (divide by M). A constant column
/// gets std = 1 and is flagged, so transforming it yields zeros instead of NaN.
struct Standardizer {
  std::vector<double> means;
  std::vector<double> stds;
  std::vector<std::uint8_t> constant_flags;

  static Standardizer fit(const FeatureMatrix& x) {
    Standardizer s;
    s.means.assign(x.cols, 0.0);
    s.stds.assign(x.cols, 0.0);
    s.constant_flags.assign(x.cols, 0);
    if (x.rows == 0) return s;
    for (std::size_t c = 0; c < x.cols; ++c) {
      double mean = 0.0;
      for (std::size_t r = 0; r < x.rows; ++r) mean += x.at(r, c);
      mean /= static_cast<double>(x.rows);
      double var = 0.0;
      for (std::size_t r = 0; r < x.rows; ++r) {
        double d = x.at(r, c) - mean;
        var += d * d;
      }
      var /= static_cast<double>(x.rows);
      s.means[c] = mean;
      if (var == 0.0) {
        s.stds[c] = 1.0;
        s.constant_flags[c] = 1;
      } else {
        s.stds[c] = std::sqrt(var);
      }
    }
    return s;
  }

  FeatureMatrix transform(const FeatureMatrix& x) const {
    FeatureMatrix out = x;
    for (std::size_t r = 0; r < x.rows; ++r)
      for (std::size_t c = 0; c < x.cols; ++c)
        out.at(r, c) = (x.at(r, c) - means[c]) / stds[c];
    return out;
  }
};

}  // namespace epilag
