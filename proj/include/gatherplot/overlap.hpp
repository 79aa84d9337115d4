#pragma once

// Overlap and overplotting diagnostics.
//
// Two points overlap under a visual transform <f, s> when
// |f(a) - f(b)| < s. A 2D plot overplots a pair only when it overlaps on both
// axes. Counts are over unordered pairs of distinct indices, so equal values
// still form pairs.

#include <gatherplot/data_model.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <numeric>
#include <span>
#include <utility>
#include <vector>

namespace gatherplot {

inline constexpr std::size_t kBruteForceBelow = 64;
inline constexpr std::size_t kMaxPairSamples = 16;

struct VisualTransform {
  std::function<double(double)> f = [](double v) { return v; };
  double mark_size = 1.0;

  static VisualTransform identity(double s) { return {[](double v) { return v; }, s}; }

  // Linear map of [d0, d1] onto [p0, p1]; a zero-width domain maps to the
  // middle of the pixel range.
  static VisualTransform linear(double d0, double d1, double p0, double p1, double s) {
    if (d0 == d1) {
      double mid = (p0 + p1) / 2;
      return {[mid](double) { return mid; }, s};
    }
    double scale = (p1 - p0) / (d1 - d0);
    return {[=](double v) { return p0 + (v - d0) * scale; }, s};
  }
};

struct OverlapReport {
  std::uint64_t overlap_x = 0;
  std::uint64_t overlap_y = 0;
  std::uint64_t overplotting = 0;
  std::vector<std::pair<PointId, PointId>> samples;  // up to kMaxPairSamples, a < b
};

namespace detail {

inline bool overlaps(double a, double b, double s) { return std::abs(a - b) < s; }

inline std::vector<std::size_t> order_by(std::span<const double> coords) {
  std::vector<std::size_t> order(coords.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return coords[a] < coords[b]; });
  return order;
}

// Fenwick tree over positions in y-sorted order.
class CountTree {
 public:
  explicit CountTree(std::size_t n) : tree_(n + 1, 0) {}

  void add(std::size_t pos, int delta) {
    for (++pos; pos < tree_.size(); pos += pos & (~pos + 1)) tree_[pos] += delta;
  }

  // Number of entries at positions [0, end).
  std::int64_t prefix(std::size_t end) const {
    std::int64_t sum = 0;
    for (; end > 0; end -= end & (~end + 1)) sum += tree_[end];
    return sum;
  }

 private:
  std::vector<std::int64_t> tree_;
};

inline std::uint64_t brute_force_1d(std::span<const double> c, double s) {
  std::uint64_t count = 0;
  for (std::size_t i = 0; i < c.size(); ++i) {
    for (std::size_t j = i + 1; j < c.size(); ++j) count += overlaps(c[i], c[j], s);
  }
  return count;
}

inline std::uint64_t brute_force_2d(std::span<const double> x, std::span<const double> y,
                                    double sx, double sy) {
  std::uint64_t count = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    for (std::size_t j = i + 1; j < x.size(); ++j) {
      count += overlaps(x[i], x[j], sx) && overlaps(y[i], y[j], sy);
    }
  }
  return count;
}

// Overplotting pair samples. Points sharing a grid cell of size sx * sy
// always overplot; remaining pairs can only straddle adjacent cells.
inline std::vector<std::pair<PointId, PointId>> sample_pairs(std::span<const double> x,
                                                             std::span<const double> y,
                                                             double sx, double sy,
                                                             std::span<const PointId> ids,
                                                             std::size_t limit) {
  std::vector<std::pair<PointId, PointId>> out;
  if (x.size() < 2 || limit == 0) return out;
  using Cell = std::pair<std::int64_t, std::int64_t>;
  std::vector<std::pair<Cell, std::size_t>> keyed;
  keyed.reserve(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    keyed.push_back({{static_cast<std::int64_t>(std::floor(x[i] / sx)),
                      static_cast<std::int64_t>(std::floor(y[i] / sy))},
                     i});
  }
  std::sort(keyed.begin(), keyed.end());

  auto emit = [&](std::size_t a, std::size_t b) {
    PointId ia = ids[a], ib = ids[b];
    if (ia > ib) std::swap(ia, ib);
    out.emplace_back(ia, ib);
    return out.size() >= limit;
  };

  for (std::size_t g = 0; g < keyed.size();) {
    std::size_t e = g;
    while (e < keyed.size() && keyed[e].first == keyed[g].first) ++e;
    for (std::size_t a = g; a < e; ++a) {
      for (std::size_t b = a + 1; b < e; ++b) {
        if (emit(keyed[a].second, keyed[b].second)) return out;
      }
    }
    g = e;
  }

  // Every cell with two or more points was exhausted above without reaching
  // the limit, so the neighbour scans below touch few points.
  auto cell_begin = [&](const Cell& c) {
    return std::lower_bound(keyed.begin(), keyed.end(), std::pair<Cell, std::size_t>{c, 0});
  };
  for (const auto& [cell, i] : keyed) {
    // Forward half of the 8-neighbourhood so each cell pair is visited once.
    const Cell neighbours[] = {{cell.first, cell.second + 1},
                               {cell.first + 1, cell.second - 1},
                               {cell.first + 1, cell.second},
                               {cell.first + 1, cell.second + 1}};
    for (const auto& nc : neighbours) {
      for (auto it = cell_begin(nc); it != keyed.end() && it->first == nc; ++it) {
        std::size_t j = it->second;
        if (overlaps(x[i], x[j], sx) && overlaps(y[i], y[j], sy)) {
          if (emit(i, j)) return out;
        }
      }
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace detail

// Overlap index of pixel coordinates with mark size `s`.
inline std::uint64_t count_overlapping_pairs(std::span<const double> coords, double s) {
  if (coords.size() < kBruteForceBelow) return detail::brute_force_1d(coords, s);
  std::vector<double> c(coords.begin(), coords.end());
  std::sort(c.begin(), c.end());
  // c[j] - c[i] is monotone in j for sorted input, so the window is exact
  // under the same predicate as the pairwise definition.
  std::uint64_t count = 0;
  std::size_t left = 0;
  for (std::size_t j = 0; j < c.size(); ++j) {
    while (!(c[j] - c[left] < s) && left < j) ++left;
    count += j - left;
  }
  return count;
}

inline std::uint64_t overlap_index_1d(std::span<const double> values, const VisualTransform& t) {
  std::vector<double> coords(values.size());
  std::transform(values.begin(), values.end(), coords.begin(), t.f);
  return count_overlapping_pairs(coords, t.mark_size);
}

// Overplotting index of pixel coordinates: sort by x, sweep a window of
// x-overlapping points, and count y-overlaps inside it with a Fenwick tree
// over y order.
inline std::uint64_t count_overplotting_pairs(std::span<const double> x, std::span<const double> y,
                                              double sx, double sy) {
  const std::size_t n = x.size();
  if (n < kBruteForceBelow) return detail::brute_force_2d(x, y, sx, sy);

  auto by_x = detail::order_by(x);
  auto by_y = detail::order_by(y);
  std::vector<double> ys(n);
  std::vector<std::size_t> y_rank(n);
  for (std::size_t r = 0; r < n; ++r) {
    ys[r] = y[by_y[r]];
    y_rank[by_y[r]] = r;
  }

  detail::CountTree tree(n);
  std::uint64_t count = 0;
  std::size_t left = 0;
  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t i = by_x[k];
    while (left < k && !(x[i] - x[by_x[left]] < sx)) {
      tree.add(y_rank[by_x[left]], -1);
      ++left;
    }
    const double yi = y[i];
    // Positions r with |ys[r] - yi| < sy form a contiguous run of ys.
    auto lo = std::partition_point(ys.begin(), ys.end(),
                                   [&](double v) { return v < yi && !(yi - v < sy); });
    auto hi = std::partition_point(lo, ys.end(), [&](double v) { return v <= yi || v - yi < sy; });
    count += static_cast<std::uint64_t>(tree.prefix(static_cast<std::size_t>(hi - ys.begin())) -
                                        tree.prefix(static_cast<std::size_t>(lo - ys.begin())));
    tree.add(y_rank[i], +1);
  }
  return count;
}

// Diagnostics over pixel coordinates. `ids` defaults to the point indices.
inline OverlapReport overplotting_report(std::span<const double> x, std::span<const double> y,
                                         double sx, double sy, std::span<const PointId> ids = {}) {
  std::vector<PointId> default_ids;
  if (ids.empty()) {
    default_ids.resize(x.size());
    std::iota(default_ids.begin(), default_ids.end(), PointId{0});
    ids = default_ids;
  }
  OverlapReport report;
  report.overlap_x = count_overlapping_pairs(x, sx);
  report.overlap_y = count_overlapping_pairs(y, sy);
  report.overplotting = count_overplotting_pairs(x, y, sx, sy);
  if (report.overplotting > 0) {
    report.samples = detail::sample_pairs(x, y, sx, sy, ids, kMaxPairSamples);
  }
  return report;
}

// Plain scatterplot mapping of one dimension onto [p0, p1]: continuous
// values linearly, categories at the centers of equal bands.
inline VisualTransform scatter_transform(const Dimension& dim, double p0, double p1, double s) {
  if (dim.continuous()) return VisualTransform::linear(dim.min, dim.max, p0, p1, s);
  const double k = static_cast<double>(dim.categories.size());
  const double band = (p1 - p0) / k;
  return {[=](double code) { return p0 + (code + 0.5) * band; }, s};
}

struct DataPoint {
  double x = 0.0;
  double y = 0.0;
};

inline OverlapReport overplotting_index_2d(std::span<const DataPoint> points,
                                           const VisualTransform& tx, const VisualTransform& ty,
                                           std::span<const PointId> ids = {}) {
  std::vector<double> x(points.size()), y(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) {
    x[i] = tx.f(points[i].x);
    y[i] = ty.f(points[i].y);
  }
  return overplotting_report(x, y, tx.mark_size, ty.mark_size, ids);
}

}  // namespace gatherplot
