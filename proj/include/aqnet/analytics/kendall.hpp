#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <utility>

namespace aqnet::analytics {

struct PairCounts {
  std::int64_t concordant = 0;
  std::int64_t discordant = 0;
  std::int64_t tied = 0;  // (x_i - x_j)(y_i - y_j) == 0
};

/// Concordant/discordant/tied counts over all index pairs i < j. Uses an
/// O(n log n) inversion count when neither coordinate has ties, otherwise the
/// O(n^2) definition. Throws ValidationError on non-finite input.
PairCounts count_pairs(std::span<const std::pair<double, double>> pairs);

/// (n_c - n_d) / (n_c + n_d). Tied pairs count in neither term, so this
/// differs from tau-b on tied data. nullopt if n < 2 or n_c + n_d == 0.
std::optional<double> kendall_tau(std::span<const std::pair<double, double>> pairs);

}  // namespace aqnet::analytics
