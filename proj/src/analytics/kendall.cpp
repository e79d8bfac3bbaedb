#include "aqnet/analytics/kendall.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "aqnet/core/errors.hpp"

namespace aqnet::analytics {

namespace {

int sign(double v) noexcept { return (v > 0.0) - (v < 0.0); }

PairCounts count_quadratic(std::span<const std::pair<double, double>> pairs) {
  PairCounts c;
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    for (std::size_t j = i + 1; j < pairs.size(); ++j) {
      // Sign of (dx * dy) without forming the product, which can underflow.
      const int s = sign(pairs[i].first - pairs[j].first) * sign(pairs[i].second - pairs[j].second);
      if (s > 0) ++c.concordant;
      else if (s < 0) ++c.discordant;
      else ++c.tied;
    }
  }
  return c;
}

// Inversions of `v`, sorting it in the process.
std::int64_t count_inversions(std::vector<double>& v, std::vector<double>& scratch, std::size_t lo, std::size_t hi) {
  if (hi - lo < 2) return 0;
  const std::size_t mid = lo + (hi - lo) / 2;
  std::int64_t inv = count_inversions(v, scratch, lo, mid) + count_inversions(v, scratch, mid, hi);
  std::size_t i = lo, j = mid, k = lo;
  while (i < mid && j < hi) {
    if (v[j] < v[i]) {
      inv += static_cast<std::int64_t>(mid - i);
      scratch[k++] = v[j++];
    } else {
      scratch[k++] = v[i++];
    }
  }
  while (i < mid) scratch[k++] = v[i++];
  while (j < hi) scratch[k++] = v[j++];
  std::copy(scratch.begin() + static_cast<std::ptrdiff_t>(lo), scratch.begin() + static_cast<std::ptrdiff_t>(hi),
            v.begin() + static_cast<std::ptrdiff_t>(lo));
  return inv;
}

bool has_ties(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  return std::adjacent_find(v.begin(), v.end()) != v.end();
}

}  // namespace

PairCounts count_pairs(std::span<const std::pair<double, double>> pairs) {
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    if (!std::isfinite(pairs[i].first) || !std::isfinite(pairs[i].second)) {
      throw ValidationError("kendall_tau: non-finite value at index " + std::to_string(i));
    }
  }
  const std::size_t n = pairs.size();
  if (n < 2) return {};

  std::vector<std::pair<double, double>> sorted(pairs.begin(), pairs.end());
  std::sort(sorted.begin(), sorted.end());
  std::vector<double> xs(n), ys(n);
  for (std::size_t i = 0; i < n; ++i) {
    xs[i] = sorted[i].first;
    ys[i] = sorted[i].second;
  }
  if (std::adjacent_find(xs.begin(), xs.end()) != xs.end() || has_ties(ys)) return count_quadratic(pairs);

  // No ties: every pair is concordant or discordant, and discordant pairs are
  // exactly the inversions of y ordered by x.
  std::vector<double> scratch(n);
  const std::int64_t discordant = count_inversions(ys, scratch, 0, n);
  const auto total = static_cast<std::int64_t>(n) * static_cast<std::int64_t>(n - 1) / 2;
  return {total - discordant, discordant, 0};
}

std::optional<double> kendall_tau(std::span<const std::pair<double, double>> pairs) {
  const PairCounts c = count_pairs(pairs);
  const std::int64_t denom = c.concordant + c.discordant;
  if (pairs.size() < 2 || denom == 0) return std::nullopt;
  return static_cast<double>(c.concordant - c.discordant) / static_cast<double>(denom);
}

}  // namespace aqnet::analytics
