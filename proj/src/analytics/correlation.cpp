#include "aqnet/analytics/correlation.hpp"

#include <algorithm>

#include "aqnet/analytics/kendall.hpp"
#include "aqnet/core/errors.hpp"

namespace aqnet::analytics {

std::optional<double> CorrelationMatrix::at(std::string_view a, std::string_view b) const {
  const auto ia = std::find(node_ids.begin(), node_ids.end(), a);
  const auto ib = std::find(node_ids.begin(), node_ids.end(), b);
  if (ia == node_ids.end() || ib == node_ids.end()) {
    throw NotFoundError("node not in matrix: " + std::string(ia == node_ids.end() ? a : b));
  }
  return tau[static_cast<std::size_t>(ia - node_ids.begin())][static_cast<std::size_t>(ib - node_ids.begin())];
}

std::optional<std::pair<double, double>> CorrelationMatrix::off_diagonal_range() const {
  std::optional<std::pair<double, double>> r;
  for (std::size_t i = 0; i < tau.size(); ++i) {
    for (std::size_t j = i + 1; j < tau.size(); ++j) {
      if (!tau[i][j]) continue;
      const double v = *tau[i][j];
      r = r ? std::pair{std::min(r->first, v), std::max(r->second, v)} : std::pair{v, v};
    }
  }
  return r;
}

CorrelationMatrix correlation_matrix(std::span<const TimeSeries> series, Parameter parameter,
                                     const AveragingWindow& window, std::size_t min_pairs) {
  if (series.size() < 2) throw InsufficientDataError("correlation matrix needs at least 2 nodes");
  for (const auto& s : series) {
    if (s.parameter() != parameter) {
      throw ValidationError("series " + s.node_id() + " carries " + std::string(to_string(s.parameter())) +
                            ", expected " + std::string(to_string(parameter)));
    }
  }
  const std::size_t n = series.size();
  CorrelationMatrix m;
  m.parameter = parameter;
  m.window = window;
  m.min_pairs = min_pairs;
  m.tau.assign(n, std::vector<std::optional<double>>(n));
  m.pair_counts.assign(n, std::vector<std::size_t>(n, 0));
  for (const auto& s : series) m.node_ids.push_back(s.node_id());

  std::vector<TimeSeries> averaged;
  averaged.reserve(n);
  for (const auto& s : series) averaged.push_back(window_average(s, window));

  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t count = averaged[i].size();
    m.pair_counts[i][i] = count;
    if (count >= std::max<std::size_t>(2, min_pairs)) m.tau[i][i] = 1.0;
    for (std::size_t j = i + 1; j < n; ++j) {
      // Already averaged, so re-windowing inside align_pair is the identity.
      const auto pairs = align_pair(averaged[i], averaged[j], window);
      m.pair_counts[i][j] = m.pair_counts[j][i] = pairs.size();
      if (pairs.size() >= min_pairs) m.tau[i][j] = m.tau[j][i] = kendall_tau(pairs);
    }
  }
  return m;
}

}  // namespace aqnet::analytics
