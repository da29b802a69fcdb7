#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <vector>

#include "locland/geometry.hpp"
#include "locland/landscape.hpp"

namespace locland {

/// A connected set of grid indices with its internal landscape peak.
struct Region {
  std::vector<Index> indices;
  Index peak_index = 0;
  double peak_value = 0.0;
};

namespace detail {

inline void sort_regions(std::vector<Region>& regions) {
  std::sort(regions.begin(), regions.end(), [](const Region& a,
                                               const Region& b) {
    if (a.peak_value != b.peak_value) return a.peak_value > b.peak_value;
    return a.peak_index < b.peak_index;
  });
}

}  // namespace detail

/// One region per index whose value dominates its window ball. A plateau
/// tied across the window yields a single region anchored at the smallest
/// index (so a constant landscape gives exactly one region, at index 0).
/// Regions carry the window ball as indices, sorted by descending peak.
inline std::vector<Region> local_maxima(const Landscape& landscape,
                                        int window) {
  if (window < 1) throw InvalidInputError("local_maxima: window must be >= 1");
  const auto& values = landscape.values;
  const auto& geometry = landscape.geometry;
  std::vector<Region> out;
  for (Index k = 0; k < values.size(); ++k) {
    auto ball = geometry.ball(k, window);
    bool is_peak = true;
    for (Index j : ball) {
      if (values(j) > values(k) || (values(j) == values(k) && j < k)) {
        is_peak = false;
        break;
      }
    }
    if (is_peak) out.push_back({std::move(ball), k, values(k)});
  }
  detail::sort_regions(out);
  return out;
}

/// Connected components of {k : values[k] >= y} under unit-distance
/// adjacency, each with its internal peak; empty set gives an empty list.
inline std::vector<Region> superlevel_regions(const Landscape& landscape,
                                              double y) {
  const auto& values = landscape.values;
  const auto& geometry = landscape.geometry;
  const Index n = values.size();
  std::vector<char> visited(n, 0);
  std::vector<Region> out;
  for (Index seed = 0; seed < n; ++seed) {
    if (visited[seed] || !(values(seed) >= y)) continue;
    Region region;
    std::vector<Index> stack{seed};
    visited[seed] = 1;
    while (!stack.empty()) {
      const Index i = stack.back();
      stack.pop_back();
      region.indices.push_back(i);
      for (Index j : geometry.neighbors(i)) {
        if (!visited[j] && values(j) >= y) {
          visited[j] = 1;
          stack.push_back(j);
        }
      }
    }
    std::sort(region.indices.begin(), region.indices.end());
    region.peak_index = region.indices.front();
    region.peak_value = values(region.peak_index);
    for (Index i : region.indices) {
      if (values(i) > region.peak_value) {
        region.peak_value = values(i);
        region.peak_index = i;
      }
    }
    out.push_back(std::move(region));
  }
  detail::sort_regions(out);
  return out;
}

/// Spectral data for the proof-value threshold log(|lambda_k|^alpha /
/// (2 sqrt(J))).
struct ThresholdOracle {
  double abs_lambda_k = 0.0;
  int alpha = 0;
  Index half_mass_max = 1;  ///< J, the largest half-mass region size
};

struct ThresholdPrediction {
  double y = 0.0;
  bool flagged = false;  ///< fewer than k peaks existed
};

/// Candidate superlevel threshold: by default the k-th largest local-maximum
/// value (window 0 picks the geometry default); with oracle data, the proof
/// value alpha*log|lambda_k| - log(2 sqrt(J)).
inline ThresholdPrediction predict_threshold(
    const Landscape& landscape, int k, int window = 0,
    std::optional<ThresholdOracle> oracle = std::nullopt) {
  if (k < 1 || k > landscape.values.size())
    throw InvalidInputError("predict_threshold: k out of range");
  if (oracle) {
    if (!(oracle->abs_lambda_k > 0.0))
      throw InvalidInputError("predict_threshold: |lambda_k| must be > 0");
    if (oracle->half_mass_max < 1)
      throw InvalidInputError("predict_threshold: half-mass size must be >= 1");
    const double y = oracle->alpha * std::log(oracle->abs_lambda_k) -
                     std::log(2.0 * std::sqrt(static_cast<double>(
                                  oracle->half_mass_max)));
    return {y, false};
  }
  const int w = window > 0 ? window : landscape.geometry.default_window();
  const auto peaks = local_maxima(landscape, w);
  if (static_cast<int>(peaks.size()) >= k)
    return {peaks[k - 1].peak_value, false};
  return {peaks.back().peak_value, true};
}

}  // namespace locland
