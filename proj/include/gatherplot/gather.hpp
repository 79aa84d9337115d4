#pragma once

// Per-axis gather transform: value-keyed pixel segments, the mark sizing
// policy, dot-plot binning of continuous dimensions and in-segment order.

#include <gatherplot/data_model.hpp>
#include <gatherplot/error.hpp>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace gatherplot {

inline constexpr double kDefaultGutter = 4.0;
inline constexpr double kMinSegmentWidth = 8.0;
inline constexpr double kFoldWidth = 12.0;
inline constexpr int kMaxMarkSize = 32;
inline constexpr int kMinMarkSize = 1;

enum class SizingPolicy {
  ConstantMarkEqualSegments,
  ConstantMarkDensitySegments,
  ProportionalMark,
};

struct Segment {
  std::string key;
  double lo = 0.0;  // pixels, half-open [lo, hi)
  double hi = 0.0;
  std::vector<PointId> members;  // display order
  double mark_scale = 1.0;       // ProportionalMark: count / max_count
  bool minimized = false;

  double width() const noexcept { return hi - lo; }
  double center() const noexcept { return (lo + hi) / 2; }
};

struct GatherTransform {
  std::vector<Segment> segments;
  SizingPolicy policy = SizingPolicy::ConstantMarkEqualSegments;
  double mark_size = 1.0;  // constant policies: s_max; proportional: base size
  double gutter = kDefaultGutter;

  std::size_t size() const noexcept { return segments.size(); }

  std::size_t member_count() const noexcept {
    std::size_t n = 0;
    for (const auto& s : segments) n += s.members.size();
    return n;
  }

  // Mark size used inside segment i.
  double segment_mark_size(std::size_t i) const {
    if (policy != SizingPolicy::ProportionalMark) return mark_size;
    const auto scale = segments[i].mark_scale;
    return scale > 0 ? mark_size / scale : segments[i].width();
  }

  // One-dimensional gather coordinate of every member: marks laid end to
  // end from the segment start, centered on their slot. Indexed by point id.
  std::vector<double> coordinates(std::size_t point_count) const {
    std::vector<double> out(point_count, 0.0);
    for (std::size_t i = 0; i < segments.size(); ++i) {
      const auto& seg = segments[i];
      const double s = segment_mark_size(i);
      for (std::size_t k = 0; k < seg.members.size(); ++k) {
        out.at(seg.members[k]) = seg.lo + (static_cast<double>(k) + 0.5) * s;
      }
    }
    return out;
  }
};

struct SegmentOptions {
  SizingPolicy policy = SizingPolicy::ConstantMarkEqualSegments;
  double gutter = kDefaultGutter;
  // Floor for density-sized segments; the effective floor is
  // max(min_width, mark_hint).
  double min_width = kMinSegmentWidth;
  double mark_hint = 0.0;
  std::vector<bool> minimized;  // per segment; minimized ones get kFoldWidth
  std::string axis_name = "axis";
};

namespace detail {

// Integer widths: floors of the exact shares, leftover pixels handed out
// left to right.
inline std::vector<double> snap_widths(const std::vector<double>& exact, double total) {
  std::vector<double> out(exact.size());
  double used = 0;
  for (std::size_t i = 0; i < exact.size(); ++i) {
    out[i] = std::floor(exact[i] + 1e-9);
    used += out[i];
  }
  auto spare = static_cast<long long>(std::floor(total - used + 1e-9));
  for (std::size_t i = 0; spare > 0 && i < out.size(); ++i, --spare) out[i] += 1;
  return out;
}

inline double constant_mark_size(const std::vector<Segment>& segs) {
  double s = kMaxMarkSize;
  for (const auto& seg : segs) {
    if (seg.minimized || seg.members.empty()) continue;
    s = std::min(s, std::floor(seg.width() / static_cast<double>(seg.members.size())));
  }
  return std::clamp(s, double(kMinMarkSize), double(kMaxMarkSize));
}

}  // namespace detail

// Lays out one segment per entry of `keys` (in order) across [0, extent).
inline GatherTransform build_segments(std::span<const std::string> keys,
                                      std::vector<std::vector<PointId>> ids_by_value,
                                      double extent, const SegmentOptions& opt = {}) {
  const std::size_t n = keys.size();
  if (n == 0) throw error(errc::parameter, opt.axis_name + ": no values to segment");
  if (ids_by_value.size() != n) {
    throw error(errc::parameter, opt.axis_name + ": member groups do not match the value count");
  }
  if (opt.gutter < 0) throw error(errc::parameter, opt.axis_name + ": negative gutter");

  std::vector<bool> minimized = opt.minimized;
  minimized.resize(n, false);
  const std::size_t n_min = static_cast<std::size_t>(std::count(minimized.begin(), minimized.end(), true));
  const std::size_t n_open = n - n_min;

  const double gutters = opt.gutter * static_cast<double>(n - 1);
  const double open_extent = std::floor(extent - gutters - kFoldWidth * static_cast<double>(n_min) + 1e-9);
  const double floor_width = opt.policy == SizingPolicy::ConstantMarkDensitySegments
                                 ? std::max(opt.min_width, opt.mark_hint)
                                 : 1.0;
  if (open_extent < floor_width * static_cast<double>(n_open) || (n_open == 0 && open_extent < 0)) {
    throw error(errc::capacity, opt.axis_name + ": extent " + format_number(extent) +
                                    " px is too small for " + std::to_string(n) + " segments");
  }

  std::vector<double> exact(n, 0.0);
  std::vector<std::size_t> open;
  for (std::size_t i = 0; i < n; ++i) {
    if (!minimized[i]) open.push_back(i);
  }

  if (opt.policy == SizingPolicy::ConstantMarkDensitySegments) {
    // Proportional shares; segments whose share falls under the floor are
    // pinned to it and the rest re-share what remains.
    std::vector<bool> pinned(n, false);
    bool changed = true;
    while (changed) {
      changed = false;
      double rest = open_extent;
      double rest_count = 0;
      std::size_t free_segments = 0;
      for (auto i : open) {
        if (pinned[i]) {
          rest -= floor_width;
        } else {
          rest_count += static_cast<double>(ids_by_value[i].size());
          ++free_segments;
        }
      }
      for (auto i : open) {
        if (pinned[i]) {
          exact[i] = floor_width;
          continue;
        }
        exact[i] = rest_count > 0 ? rest * static_cast<double>(ids_by_value[i].size()) / rest_count
                                  : rest / static_cast<double>(free_segments);
        if (exact[i] < floor_width) {
          pinned[i] = true;
          changed = true;
        }
      }
    }
  } else {
    for (auto i : open) exact[i] = open_extent / static_cast<double>(n_open);
  }

  std::vector<double> open_exact;
  for (auto i : open) open_exact.push_back(exact[i]);
  auto open_widths = detail::snap_widths(open_exact, open_extent);

  GatherTransform t;
  t.policy = opt.policy;
  t.gutter = opt.gutter;
  t.segments.resize(n);
  double cursor = 0;
  std::size_t next_open = 0;
  std::size_t max_count = 0;
  for (std::size_t i = 0; i < n; ++i) {
    auto& seg = t.segments[i];
    seg.key = keys[i];
    seg.minimized = minimized[i];
    seg.members = std::move(ids_by_value[i]);
    const double w = minimized[i] ? kFoldWidth : open_widths[next_open++];
    seg.lo = cursor;
    seg.hi = cursor + w;
    cursor = seg.hi + opt.gutter;
    max_count = std::max(max_count, seg.members.size());
  }

  if (opt.policy == SizingPolicy::ProportionalMark) {
    double base = kMaxMarkSize;
    for (auto& seg : t.segments) {
      seg.mark_scale = max_count ? static_cast<double>(seg.members.size()) / static_cast<double>(max_count) : 1.0;
      if (!seg.minimized && max_count) base = std::min(base, seg.width() / static_cast<double>(max_count));
    }
    t.mark_size = base;
  } else {
    t.mark_size = detail::constant_mark_size(t.segments);
  }
  return t;
}

// ---------------------------------------------------------------------------
// Dot-plot binning

struct BinningResult {
  Quantizer quantizer;
  int dot_size = 1;  // pixels; equals the bin width in pixels
  std::size_t densest_bin_count = 0;
  bool legibility_warning = false;

  double pixel_extent() const { return static_cast<double>(dot_size * quantizer.size()); }
};

// Initial dot size for n points on an axis of `extent` pixels: 0.25 / sqrt(n)
// of the axis length.
inline double wilkinson_dot_size(std::size_t n, double extent) {
  return 0.25 / std::sqrt(static_cast<double>(std::max<std::size_t>(n, 1))) * extent;
}

// Descending dot-size candidates, starting from the Wilkinson size.
inline std::vector<int> dot_size_ladder(std::size_t n, double extent_main) {
  int top = static_cast<int>(std::floor(wilkinson_dot_size(n, extent_main)));
  top = std::clamp(top, kMinMarkSize, kMaxMarkSize);
  std::vector<int> ladder;
  for (int d = top; d >= kMinMarkSize; --d) ladder.push_back(d);
  return ladder;
}

// Bins spanning the dimension with every bin `dot` pixels wide on an axis of
// `extent_main` pixels.
inline Quantizer pixel_aligned_quantizer(const Dimension& dim, int dot, double extent_main) {
  if (dim.min == dim.max) return Quantizer(dim, {dim.min, dim.max});
  auto bins = static_cast<std::size_t>(std::max(1.0, std::floor(extent_main / dot)));
  auto [lo, hi] = quantization_span(dim);
  std::vector<double> edges;
  for (std::size_t i = 0; i < bins; ++i) {
    edges.push_back(lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(bins));
  }
  edges.push_back(hi);
  return Quantizer(dim, std::move(edges));
}

// Chooses the largest dot size on the ladder for which the densest bin of
// any group stacks within `extent_cross`. Groups are the points sharing a
// cross-axis segment; pass a single group for a plain dot plot.
inline BinningResult bin_continuous_grouped(const Dimension& dim,
                                            std::span<const std::vector<double>> groups,
                                            double extent_main, double extent_cross) {
  if (!dim.continuous()) throw error(errc::parameter, "dimension '" + dim.name + "' is not continuous");
  if (!(extent_main > 0) || !(extent_cross > 0)) {
    throw error(errc::parameter, "binning extents must be positive");
  }
  std::size_t n = 0;
  for (const auto& g : groups) n += g.size();

  auto densest = [&](const Quantizer& q) {
    std::size_t best = 0;
    std::vector<std::size_t> counts(q.size());
    for (const auto& g : groups) {
      std::fill(counts.begin(), counts.end(), 0);
      for (double v : g) best = std::max(best, ++counts[q.bin_of(v)]);
    }
    return best;
  };

  for (int d : dot_size_ladder(n, extent_main)) {
    auto q = pixel_aligned_quantizer(dim, d, extent_main);
    const auto c = densest(q);
    const auto capacity = static_cast<std::size_t>(std::floor(extent_cross / d));
    if (c <= capacity) return {std::move(q), d, c, false};
  }
  auto q = pixel_aligned_quantizer(dim, kMinMarkSize, extent_main);
  const auto c = densest(q);
  return {std::move(q), kMinMarkSize, c, true};
}

inline BinningResult bin_continuous(const Dimension& dim, std::span<const double> values,
                                    double extent_main, double extent_cross) {
  if (values.empty()) throw error(errc::parameter, "cannot bin an empty value list");
  std::vector<std::vector<double>> one{std::vector<double>(values.begin(), values.end())};
  return bin_continuous_grouped(dim, one, extent_main, extent_cross);
}

// Stable sort of segment members by a dimension (category order or value).
// Without an order dimension the input order is kept.
inline std::vector<PointId> order_within_segment(std::vector<PointId> members, const Dataset& data,
                                                 std::optional<std::size_t> order_dim) {
  if (!order_dim) return members;
  auto column = data.column(*order_dim);
  std::stable_sort(members.begin(), members.end(),
                   [&](PointId a, PointId b) { return column[a] < column[b]; });
  return members;
}

}  // namespace gatherplot
