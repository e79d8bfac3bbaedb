#include "aqnet/cleaning/cleaning.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <spdlog/spdlog.h>

#include "aqnet/core/errors.hpp"

namespace aqnet::cleaning {

FeatureVector to_feature_vector(const SensorSample& s) {
  FeatureVector v;
  v.timestamp = s.timestamp;
  v.complete = true;
  for (std::size_t i = 0; i < kAllParameters.size(); ++i) {
    const auto& x = s.get(kAllParameters[i]);
    if (x) {
      v.features[i] = *x;
    } else {
      v.complete = false;
    }
  }
  return v;
}

void validate(const ClusterParams& p) {
  std::map<std::string, std::string> bad;
  if (!(p.eps > 0.0) || !std::isfinite(p.eps)) bad["eps"] = "must be > 0";
  if (p.min_pts < 2) bad["min_pts"] = "must be >= 2";
  if (!(p.eps_quantile >= 0.0 && p.eps_quantile <= 1.0)) bad["eps_quantile"] = "must be in [0, 1]";
  if (!(p.eps_scale > 0.0) || !std::isfinite(p.eps_scale)) bad["eps_scale"] = "must be > 0";
  if (!bad.empty()) throw ValidationError("invalid cluster parameters", std::move(bad));
}

void validate(const CleanOptions& o) {
  validate(o.cluster);
  if (o.batch_seconds <= 0) throw ValidationError("batch window must be positive", {{"batch_seconds", "must be > 0"}});
}

std::size_t OutlierResult::count(Label l) const noexcept {
  return static_cast<std::size_t>(std::count(labels.begin(), labels.end(), l));
}

namespace {

// Mean and population standard deviation, summed in sorted order so the
// result does not depend on input order.
std::pair<double, double> moments(std::vector<double> xs) {
  std::sort(xs.begin(), xs.end());
  const double n = static_cast<double>(xs.size());
  const double mean = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
  std::vector<double> sq(xs.size());
  std::transform(xs.begin(), xs.end(), sq.begin(), [mean](double x) { return (x - mean) * (x - mean); });
  std::sort(sq.begin(), sq.end());
  return {mean, std::sqrt(std::accumulate(sq.begin(), sq.end(), 0.0) / n)};
}

}  // namespace

OutlierResult detect_outliers(std::span<const FeatureVector> vectors, const ClusterParams& params) {
  validate(params);
  OutlierResult result;
  result.labels.assign(vectors.size(), Label::incomplete);

  std::vector<std::size_t> complete;
  for (std::size_t i = 0; i < vectors.size(); ++i) {
    if (vectors[i].complete) complete.push_back(i);
  }
  const std::size_t n = complete.size();
  if (n < static_cast<std::size_t>(params.min_pts)) {
    for (const std::size_t i : complete) result.labels[i] = Label::core;
    if (n > 0) {
      result.warning = "only " + std::to_string(n) + " complete vectors (< min_pts " +
                       std::to_string(params.min_pts) + "); outlier detection skipped";
    }
    return result;
  }

  std::vector<std::array<double, 4>> z(n);
  for (std::size_t f = 0; f < 4; ++f) {
    std::vector<double> col(n);
    for (std::size_t k = 0; k < n; ++k) col[k] = vectors[complete[k]].features[f];
    const auto [mean, sd] = moments(col);
    for (std::size_t k = 0; k < n; ++k) z[k][f] = sd > 0.0 ? (col[k] - mean) / sd : 0.0;
  }

  // Sweep over points sorted by the first coordinate; any pair farther apart
  // than eps in that coordinate alone cannot be neighbours.
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&z](std::size_t a, std::size_t b) { return z[a][0] < z[b][0]; });

  const auto dist2 = [&z](std::size_t a, std::size_t b) {
    double d = 0.0;
    for (std::size_t f = 0; f < 4; ++f) d += (z[a][f] - z[b][f]) * (z[a][f] - z[b][f]);
    return d;
  };
  const auto gap2 = [&z](std::size_t a, std::size_t b) {
    const double d0 = z[a][0] - z[b][0];
    return d0 * d0;
  };

  // Squared distance to the (min_pts - 1)-th nearest other vector; a vector
  // is core exactly when this is within the radius.
  const auto k = static_cast<std::size_t>(params.min_pts) - 1;
  std::vector<double> kdist2(n);
  std::vector<double> heap;
  for (std::size_t pos = 0; pos < n; ++pos) {
    const std::size_t a = order[pos];
    heap.clear();
    const auto offer = [&](std::size_t b) {
      // Once k candidates are held, anything farther in z0 alone cannot improve them.
      if (heap.size() == k && gap2(a, b) > heap.front()) return false;
      const double d = dist2(a, b);
      if (heap.size() < k) {
        heap.push_back(d);
        std::push_heap(heap.begin(), heap.end());
      } else if (d < heap.front()) {
        std::pop_heap(heap.begin(), heap.end());
        heap.back() = d;
        std::push_heap(heap.begin(), heap.end());
      }
      return true;
    };
    for (std::size_t q = pos + 1; q < n && offer(order[q]); ++q) {
    }
    for (std::size_t q = pos; q-- > 0 && offer(order[q]);) {
    }
    kdist2[a] = heap.front();
  }

  double eps2 = params.eps * params.eps;
  if (params.eps_quantile > 0.0) {
    std::vector<double> sorted = kdist2;
    const auto at = static_cast<std::size_t>(std::floor(params.eps_quantile * static_cast<double>(n - 1)));
    std::nth_element(sorted.begin(), sorted.begin() + static_cast<std::ptrdiff_t>(at), sorted.end());
    eps2 = std::max(eps2, params.eps_scale * params.eps_scale * sorted[at]);
  }
  result.eps = std::sqrt(eps2);

  // Visits neighbours of sorted position `pos` (excluding itself) until `visit` returns true.
  const auto scan = [&](std::size_t pos, auto&& visit) {
    const std::size_t a = order[pos];
    for (std::size_t q = pos + 1; q < n && gap2(a, order[q]) <= eps2; ++q) {
      if (dist2(a, order[q]) <= eps2 && visit(order[q])) return;
    }
    for (std::size_t q = pos; q-- > 0 && gap2(a, order[q]) <= eps2;) {
      if (dist2(a, order[q]) <= eps2 && visit(order[q])) return;
    }
  };

  std::vector<char> core(n, 0);
  for (std::size_t i = 0; i < n; ++i) core[i] = kdist2[i] <= eps2;
  for (std::size_t pos = 0; pos < n; ++pos) {
    const std::size_t idx = order[pos];
    Label label = Label::core;
    if (!core[idx]) {
      bool near_core = false;
      scan(pos, [&](std::size_t j) { return near_core = core[j] != 0; });
      label = near_core ? Label::border : Label::noise;
    }
    result.labels[complete[idx]] = label;
  }
  return result;
}

std::vector<SensorSample> normalize_samples(std::vector<SensorSample> samples) {
  std::stable_sort(samples.begin(), samples.end(),
                   [](const SensorSample& a, const SensorSample& b) { return a.timestamp < b.timestamp; });
  std::vector<SensorSample> out;
  out.reserve(samples.size());
  for (auto& s : samples) {
    if (!out.empty() && out.back().timestamp == s.timestamp) {
      out.back() = std::move(s);
    } else {
      out.push_back(std::move(s));
    }
  }
  return out;
}

CleanedFeed clean(const NodeFeed& feed, const CleanOptions& options) {
  validate(options);
  CleanedFeed out;
  out.node_id = feed.node_id;
  const std::vector<SensorSample> samples = normalize_samples(feed.samples);
  out.input_vectors = samples.size();

  std::vector<char> keep(samples.size(), 1);
  if (options.rh_max) {
    for (std::size_t i = 0; i < samples.size(); ++i) {
      if (samples[i].humidity && *samples[i].humidity > *options.rh_max) {
        keep[i] = 0;
        ++out.dropped_humidity;
      }
    }
  }

  std::size_t begin = 0;
  while (begin < samples.size()) {
    const Timestamp batch = floor_div(samples[begin].timestamp, options.batch_seconds);
    std::size_t end = begin;
    while (end < samples.size() && floor_div(samples[end].timestamp, options.batch_seconds) == batch) ++end;

    std::vector<FeatureVector> vectors;
    std::vector<std::size_t> index;
    for (std::size_t i = begin; i < end; ++i) {
      if (!keep[i]) continue;
      vectors.push_back(to_feature_vector(samples[i]));
      index.push_back(i);
    }
    const OutlierResult r = detect_outliers(vectors, options.cluster);
    if (r.warning) {
      std::string msg = feed.node_id + " batch " + format_iso8601(batch * options.batch_seconds) + ": " + *r.warning;
      spdlog::warn("{}", msg);
      out.warnings.push_back(std::move(msg));
    }
    for (std::size_t k = 0; k < vectors.size(); ++k) {
      if (r.labels[k] == Label::noise) {
        keep[index[k]] = 0;
        ++out.dropped_noise;
        out.dropped_timestamps.push_back(samples[index[k]].timestamp);
      }
    }
    begin = end;
  }

  for (const Parameter p : kAllParameters) {
    std::vector<TimePoint> points;
    for (std::size_t i = 0; i < samples.size(); ++i) {
      if (keep[i] && samples[i].get(p)) points.push_back({samples[i].timestamp, *samples[i].get(p)});
    }
    out.series.emplace(p, TimeSeries(feed.node_id, p, std::move(points)));
  }
  return out;
}

CleanedFeed pipeline(const NodeFeed& feed, const CleanOptions& options, const AveragingWindow& window) {
  CleanedFeed out = clean(feed, options);
  for (auto& [p, series] : out.series) series = window_average(series, window);
  return out;
}

}  // namespace aqnet::cleaning
