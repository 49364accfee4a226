#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <span>
#include <string_view>
#include <vector>

#include <boost/math/distributions/students_t.hpp>

#include "epilag/errors.hpp"

namespace epilag {

/// Spearman coefficient with its significance. `p_degenerate` marks samples
/// where the t approximation is undefined (n < 4 or |r| = 1); p is reported
/// as 0 in that case.
struct CorrelationResult {
  double r = 0.0;
  double p_value = 0.0;
  std::size_t n = 0;
  bool p_degenerate = false;
};

enum class StrengthClass { very_weak, weak, moderate, strong };

inline std::string_view strength_name(StrengthClass s) {
  switch (s) {
    case StrengthClass::very_weak: return "very_weak";
    case StrengthClass::weak: return "weak";
    case StrengthClass::moderate: return "moderate";
    case StrengthClass::strong: return "strong";
  }
  return "?";
}

/// |r| < 0.3 very weak, [0.3, 0.5) weak, [0.5, 0.7) moderate, >= 0.7 strong.
inline StrengthClass classify_strength(double r) {
  double a = std::fabs(r);
  if (a < 0.3) return StrengthClass::very_weak;
  if (a < 0.5) return StrengthClass::weak;
  if (a < 0.7) return StrengthClass::moderate;
  return StrengthClass::strong;
}

/// 1-based ranks; ties receive the average of the ranks they span, so the
/// rank sum is always n(n+1)/2.
inline std::vector<double> rank(std::span<const double> values) {
  const std::size_t n = values.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });

  std::vector<double> ranks(n);
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j + 1 < n && values[order[j + 1]] == values[order[i]]) ++j;
    // positions i..j (0-based) share the value; average rank = (i+1 + j+1)/2
    double avg = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = avg;
    i = j + 1;
  }
  return ranks;
}

inline bool has_ties(std::span<const double> values) {
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  return std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end();
}

/// Product-moment coefficient: sum (x-x̄)(y-ȳ) / sqrt(sum (x-x̄)² · sum (y-ȳ)²).
inline double pearson(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw LengthMismatch(x.size(), y.size());
  const std::size_t n = x.size();
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);

  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double dx = x[i] - mx;
    double dy = y[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0.0) throw ConstantInput("x has zero variance");
  if (syy == 0.0) throw ConstantInput("y has zero variance");
  return sxy / (std::sqrt(sxx) * std::sqrt(syy));
}

namespace detail {

// Tie-free rank vectors are permutations of 1..n, so the rank differences are
// exact integers and the closed form is evaluated without rounding surprises.
inline double spearman_closed_form(const std::vector<double>& rx, const std::vector<double>& ry) {
  const double n = static_cast<double>(rx.size());
  double sum_d2 = 0.0;
  for (std::size_t i = 0; i < rx.size(); ++i) {
    double d = rx[i] - ry[i];
    sum_d2 += d * d;
  }
  return 1.0 - 6.0 * sum_d2 / (n * (n * n - 1.0));
}

}  // namespace detail

/// Rank correlation. Equals pearson(rank(x), rank(y)); on tie-free inputs the
/// classic 1 - 6·sum d² / (n(n²-1)) form is used, which coincides with the
/// rank Pearson value.
inline double spearman(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw LengthMismatch(x.size(), y.size());
  auto rx = rank(x);
  auto ry = rank(y);
  if (!has_ties(x) && !has_ties(y)) return detail::spearman_closed_form(rx, ry);
  return pearson(rx, ry);
}

struct PValue {
  double value = 0.0;
  bool degenerate = false;
};

/// Two-sided p for a Spearman coefficient via the t approximation
/// t = r·sqrt((n-2)/(1-r²)) with n-2 degrees of freedom.
inline PValue spearman_p(double r, std::size_t n) {
  if (n < 4 || std::fabs(r) >= 1.0) return {0.0, true};
  double dof = static_cast<double>(n - 2);
  double t = r * std::sqrt(dof / (1.0 - r * r));
  boost::math::students_t_distribution<double> dist(dof);
  double p = 2.0 * boost::math::cdf(boost::math::complement(dist, std::fabs(t)));
  return {p, false};
}

/// Spearman r + significance in one call.
inline CorrelationResult correlate_spearman(std::span<const double> x,
                                            std::span<const double> y) {
  CorrelationResult res;
  res.n = x.size();
  res.r = spearman(x, y);
  auto p = spearman_p(res.r, res.n);
  res.p_value = p.value;
  res.p_degenerate = p.degenerate;
  return res;
}

}  // namespace epilag
