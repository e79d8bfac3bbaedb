#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "aqnet/core/time_series.hpp"

namespace aqnet::analytics {

inline constexpr std::size_t kDefaultMinPairs = 30;

/// Pairwise Kendall tau between nodes for one parameter. Entries are absent
/// when fewer than `min_pairs` aligned buckets exist.
struct CorrelationMatrix {
  std::vector<std::string> node_ids;
  Parameter parameter = Parameter::pm25;
  AveragingWindow window = AveragingWindow::five_minutes();
  std::size_t min_pairs = kDefaultMinPairs;
  std::vector<std::vector<std::optional<double>>> tau;
  std::vector<std::vector<std::size_t>> pair_counts;

  std::optional<double> at(std::string_view a, std::string_view b) const;
  /// Smallest and largest present off-diagonal entry.
  std::optional<std::pair<double, double>> off_diagonal_range() const;
};

/// Each off-diagonal entry is kendall_tau(align_pair(i, j, window)), computed
/// once per unordered pair. The diagonal is 1 where the node has at least
/// max(2, min_pairs) buckets. All series must carry `parameter`.
CorrelationMatrix correlation_matrix(std::span<const TimeSeries> series, Parameter parameter,
                                     const AveragingWindow& window, std::size_t min_pairs = kDefaultMinPairs);

}  // namespace aqnet::analytics
