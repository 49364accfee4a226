#pragma once

#include <cmath>
#include <span>

#include "epilag/errors.hpp"

namespace epilag {

/// Root mean squared error: sqrt(mean of squared residuals).
inline double rmse(std::span<const double> y, std::span<const double> y_hat) {
  if (y.size() != y_hat.size()) throw LengthMismatch(y.size(), y_hat.size());
  double s = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    double d = y[i] - y_hat[i];
    s += d * d;
  }
  return std::sqrt(s / static_cast<double>(y.size()));
}

/// Mean absolute error.
inline double mae(std::span<const double> y, std::span<const double> y_hat) {
  if (y.size() != y_hat.size()) throw LengthMismatch(y.size(), y_hat.size());
  double s = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) s += std::fabs(y[i] - y_hat[i]);
  return s / static_cast<double>(y.size());
}

/// Coefficient of determination: 1 - SS_res / SS_tot. Exactly 0 for the
/// mean predictor, 1 for a perfect fit, negative for models worse than the
/// mean. Undefined for a constant target (SS_tot = 0).
inline double r2(std::span<const double> y, std::span<const double> y_hat) {
  if (y.size() != y_hat.size()) throw LengthMismatch(y.size(), y_hat.size());
  double mean = 0.0;
  for (double v : y) mean += v;
  mean /= static_cast<double>(y.size());
  double ss_res = 0.0, ss_tot = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    double dr = y[i] - y_hat[i];
    double dt = y[i] - mean;
    ss_res += dr * dr;
    ss_tot += dt * dt;
  }
  if (ss_tot == 0.0) throw ConstantTarget("R² undefined: target has zero variance");
  return 1.0 - ss_res / ss_tot;
}

}  // namespace epilag
