#include "ascnet/segmenter/peaks.hpp"

#include <algorithm>
#include <limits>

#include "ascnet/core/error.hpp"

namespace ascnet::segmenter {

std::vector<double> smooth_histogram(const Histogram256& h, int window) {
  if (window < 1 || window % 2 == 0) {
    throw config_error("smooth_window must be an odd positive integer");
  }
  const int n = 256;
  int half = window / 2;
  std::vector<double> s(n);
  for (int i = 0; i < n; ++i) {
    int lo = std::max(0, i - half);
    int hi = std::min(n - 1, i + half);
    double acc = 0.0;
    for (int j = lo; j <= hi; ++j) acc += static_cast<double>(h.counts[static_cast<size_t>(j)]);
    s[i] = acc / (hi - lo + 1);
  }
  return s;
}

namespace {

// Topographic prominence of bin i on curve s: on each side, the running
// minimum until a strictly higher bin (or the edge); the base is the larger
// of the two side minima. A side with no bins imposes no base.
double prominence_at(const std::vector<double>& s, int i) {
  const int n = static_cast<int>(s.size());
  double base = -std::numeric_limits<double>::infinity();
  bool any_side = false;
  {
    double side_min = std::numeric_limits<double>::infinity();
    for (int j = i - 1; j >= 0; --j) {
      if (s[j] > s[i]) break;
      side_min = std::min(side_min, s[j]);
      any_side = true;
    }
    if (side_min != std::numeric_limits<double>::infinity()) base = std::max(base, side_min);
  }
  {
    double side_min = std::numeric_limits<double>::infinity();
    for (int j = i + 1; j < n; ++j) {
      if (s[j] > s[i]) break;
      side_min = std::min(side_min, s[j]);
      any_side = true;
    }
    if (side_min != std::numeric_limits<double>::infinity()) base = std::max(base, side_min);
  }
  if (!any_side) return 0.0;
  return s[i] - base;
}

}  // namespace

PeakList detect_peaks(const Histogram256& h, const PeakParams& params) {
  if (h.total == 0) throw config_error("detect_peaks: empty histogram");
  std::vector<double> s = smooth_histogram(h, params.smooth_window);
  const int n = static_cast<int>(s.size());

  std::vector<Peak> candidates;
  for (int i = 0; i < n; ++i) {
    bool left_ok = i == 0 || s[i] > s[i - 1];
    bool right_ok = i == n - 1 || s[i] > s[i + 1];
    if (!(left_ok && right_ok)) continue;
    double prom = prominence_at(s, i);
    if (prom < params.min_prominence_fraction * static_cast<double>(h.total)) continue;
    candidates.push_back({i, h.counts[static_cast<size_t>(i)], prom});
  }

  // Tallest-wins suppression of peaks closer than min_separation; ties break
  // toward the lower bin.
  std::vector<int> order(candidates.size());
  for (size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    if (s[candidates[a].bin] != s[candidates[b].bin]) {
      return s[candidates[a].bin] > s[candidates[b].bin];
    }
    return candidates[a].bin < candidates[b].bin;
  });
  std::vector<bool> kept(candidates.size(), false);
  for (int idx : order) {
    bool ok = true;
    for (size_t j = 0; j < candidates.size(); ++j) {
      if (!kept[j]) continue;
      if (std::abs(candidates[idx].bin - candidates[j].bin) < params.min_separation) {
        ok = false;
        break;
      }
    }
    kept[static_cast<size_t>(idx)] = ok;
  }

  PeakList out;
  for (size_t i = 0; i < candidates.size(); ++i) {
    if (kept[i]) out.push_back(candidates[i]);
  }
  return out;
}

}  // namespace ascnet::segmenter
