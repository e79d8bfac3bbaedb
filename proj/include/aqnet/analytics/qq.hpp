#pragma once

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

namespace aqnet::analytics {

struct QQPairs {
  std::vector<double> probabilities;
  std::vector<std::pair<double, double>> points;  // (quantile_x, quantile_y)

  double max_abs_difference() const noexcept;
};

/// Linear interpolation between order statistics of an ascending sample at
/// zero-indexed position p * (n - 1).
double sample_quantile(std::span<const double> sorted, double p);

/// Quantiles of x and y at p_i = (i - 0.5) / k, i = 1..k. Throws
/// ValidationError if either sample has fewer than 2 values, k is 0, or a
/// value is non-finite.
QQPairs qq_pairs(std::span<const double> x, std::span<const double> y, std::size_t k = 100);

}  // namespace aqnet::analytics
