#include "aqnet/analytics/qq.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "aqnet/core/errors.hpp"

namespace aqnet::analytics {

double QQPairs::max_abs_difference() const noexcept {
  double m = 0.0;
  for (const auto& [qx, qy] : points) m = std::max(m, std::abs(qy - qx));
  return m;
}

double sample_quantile(std::span<const double> sorted, double p) {
  const std::size_t n = sorted.size();
  if (n == 0) throw ValidationError("quantile of an empty sample");
  const double pos = std::clamp(p, 0.0, 1.0) * static_cast<double>(n - 1);
  const auto lo = std::min(static_cast<std::size_t>(pos), n - 1);
  if (lo + 1 >= n) return sorted[n - 1];
  const double a = sorted[lo];
  const double b = sorted[lo + 1];
  // Clamping keeps the result monotone in p despite rounding.
  return std::clamp(a + (pos - static_cast<double>(lo)) * (b - a), a, b);
}

namespace {

std::vector<double> sorted_sample(std::span<const double> v, const char* name) {
  if (v.size() < 2) {
    throw ValidationError(std::string("qq_pairs: ") + name + " needs at least 2 values, got " + std::to_string(v.size()),
                          {{name, "at least 2 values required"}});
  }
  std::vector<double> s(v.begin(), v.end());
  if (!std::all_of(s.begin(), s.end(), [](double d) { return std::isfinite(d); })) {
    throw ValidationError(std::string("qq_pairs: non-finite value in ") + name, {{name, "values must be finite"}});
  }
  std::sort(s.begin(), s.end());
  return s;
}

}  // namespace

QQPairs qq_pairs(std::span<const double> x, std::span<const double> y, std::size_t k) {
  if (k == 0) throw ValidationError("qq_pairs: k must be positive", {{"k", "must be >= 1"}});
  const auto sx = sorted_sample(x, "x");
  const auto sy = sorted_sample(y, "y");
  QQPairs out;
  out.probabilities.reserve(k);
  out.points.reserve(k);
  for (std::size_t i = 1; i <= k; ++i) {
    const double p = (static_cast<double>(i) - 0.5) / static_cast<double>(k);
    out.probabilities.push_back(p);
    out.points.emplace_back(sample_quantile(sx, p), sample_quantile(sy, p));
  }
  return out;
}

}  // namespace aqnet::analytics
