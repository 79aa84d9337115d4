#pragma once

// Two-dimensional gatherplot layout: per-axis gather transforms, cell
// packing in absolute, normalized and streamgraph modes, undefined axes,
// the rotated same-variable dot plot, and axis folding.

#include <gatherplot/data_model.hpp>
#include <gatherplot/error.hpp>
#include <gatherplot/gather.hpp>
#include <gatherplot/geometry.hpp>
#include <gatherplot/ticks.hpp>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <map>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace gatherplot {

inline constexpr double kStreamgraphAspect = 3.0;
inline constexpr std::size_t kDefaultContinuousBins = 10;
inline constexpr std::string_view kUndefinedKey = "(all)";

enum class LayoutMode { Auto, Absolute, Normalized, Streamgraph };

constexpr std::string_view to_string(LayoutMode m) noexcept {
  switch (m) {
    case LayoutMode::Auto: return "auto";
    case LayoutMode::Absolute: return "absolute";
    case LayoutMode::Normalized: return "normalized";
    case LayoutMode::Streamgraph: return "streamgraph";
  }
  return "auto";
}

inline LayoutMode parse_layout_mode(std::string_view s) {
  if (s == "auto") return LayoutMode::Auto;
  if (s == "absolute") return LayoutMode::Absolute;
  if (s == "normalized") return LayoutMode::Normalized;
  if (s == "streamgraph") return LayoutMode::Streamgraph;
  throw error(errc::parameter, "unknown layout mode '" + std::string(s) + "'");
}

enum class FoldState { Normal, Minimized, Maximized };

constexpr std::string_view to_string(FoldState s) noexcept {
  switch (s) {
    case FoldState::Normal: return "normal";
    case FoldState::Minimized: return "min";
    case FoldState::Maximized: return "max";
  }
  return "normal";
}

using FoldKey = std::pair<Axis, std::string>;

struct GatherplotSpec {
  std::optional<std::string> x_dim;
  std::optional<std::string> y_dim;
  std::optional<std::string> color_dim;
  LayoutMode mode = LayoutMode::Auto;
  Rect region{0, 0, 600, 600};
  std::map<FoldKey, FoldState> folds;
  SizingPolicy policy = SizingPolicy::ConstantMarkEqualSegments;
  double gutter = kDefaultGutter;
  std::optional<int> streamgraph_k;  // marks along the shorter cell edge
  std::size_t continuous_bins = kDefaultContinuousBins;  // continuous vs continuous

  friend bool operator==(const GatherplotSpec&, const GatherplotSpec&) = default;
};

// Parses "x=Crew:min" (states: min, max, normal).
inline std::pair<FoldKey, FoldState> parse_fold(std::string_view text) {
  auto eq = text.find('=');
  auto colon = text.rfind(':');
  if (eq == std::string_view::npos || colon == std::string_view::npos || colon < eq) {
    throw error(errc::parameter, "fold '" + std::string(text) + "' is not of the form axis=value:state");
  }
  auto axis_text = text.substr(0, eq);
  Axis axis;
  if (axis_text == "x" || axis_text == "X") {
    axis = Axis::X;
  } else if (axis_text == "y" || axis_text == "Y") {
    axis = Axis::Y;
  } else {
    throw error(errc::parameter, "fold axis must be x or y, got '" + std::string(axis_text) + "'");
  }
  auto state_text = text.substr(colon + 1);
  FoldState state;
  if (state_text == "min" || state_text == "minimized") {
    state = FoldState::Minimized;
  } else if (state_text == "max" || state_text == "maximized") {
    state = FoldState::Maximized;
  } else if (state_text == "normal" || state_text == "restore") {
    state = FoldState::Normal;
  } else {
    throw error(errc::parameter, "unknown fold state '" + std::string(state_text) + "'");
  }
  return {{axis, std::string(text.substr(eq + 1, colon - eq - 1))}, state};
}

struct AxisLayout {
  Axis axis = Axis::X;
  std::optional<std::string> dimension;
  std::string kind = "undefined";  // undefined | categorical | binned | quantized
  GatherTransform transform;       // segments in screen pixels, in data order
};

struct LegendEntry {
  std::string key;
  int color_index = 0;
};

struct PlotLayout {
  Rect region;
  LayoutMode mode_used = LayoutMode::Absolute;
  bool rotated = false;    // same continuous dimension on both axes
  double mark_size = 0.0;  // global absolute-mode mark size
  int streamgraph_k = 0;
  AxisLayout x_axis;
  AxisLayout y_axis;
  std::vector<GroupLayout> groups;
  std::vector<BracketTick> ticks;
  std::optional<std::string> color_dim;
  std::vector<LegendEntry> legend;
  std::vector<std::string> warnings;

  std::size_t mark_count() const noexcept {
    std::size_t n = 0;
    for (const auto& g : groups) n += g.marks.size();
    return n;
  }
};

// A cell to pack: its box and its members in display order.
struct CellInput {
  std::string x_key;
  std::string y_key;
  Rect box;
  std::vector<PointId> members;
};

inline LayoutMode resolve_mode(LayoutMode requested, double cell_aspect) {
  if (requested != LayoutMode::Auto) return requested;
  if (!(cell_aspect > 0)) throw error(errc::parameter, "cell aspect must be positive");
  const double elongation = std::max(cell_aspect, 1.0 / cell_aspect);
  return elongation > kStreamgraphAspect ? LayoutMode::Streamgraph : LayoutMode::Absolute;
}

namespace detail {

inline double snap_down(double v) { return std::floor(v / kPixelQuantum + 1e-9) * kPixelQuantum; }

inline std::size_t ceil_div(std::size_t a, std::size_t b) { return (a + b - 1) / b; }

inline std::size_t grid_capacity(const Rect& box, double m) {
  const double cols = std::floor(box.w / m);
  const double rows = std::floor(box.h / m);
  return static_cast<std::size_t>(std::max(0.0, cols) * std::max(0.0, rows));
}

inline GroupLayout empty_group(const CellInput& cell) {
  GroupLayout g;
  g.x_key = cell.x_key;
  g.y_key = cell.y_key;
  g.box = cell.box;
  return g;
}

}  // namespace detail

// Absolute-mode mark size candidates: whole pixels from the cap down to
// 1 px, then sub-pixel steps of the layout quantum.
inline std::vector<double> absolute_size_ladder() {
  std::vector<double> ladder;
  for (int m = kMaxMarkSize; m >= kMinMarkSize; --m) ladder.push_back(m);
  for (int q = 63; q >= 1; --q) ladder.push_back(q * kPixelQuantum);
  return ladder;
}

inline bool absolute_fits(std::span<const CellInput> cells, double m) {
  for (const auto& c : cells) {
    if (!c.members.empty() && detail::grid_capacity(c.box, m) < c.members.size()) return false;
  }
  return true;
}

// Largest ladder size for which every cell grid-packs its members.
inline double absolute_mark_size(std::span<const CellInput> cells) {
  for (double m : absolute_size_ladder()) {
    if (absolute_fits(cells, m)) return m;
  }
  throw error(errc::capacity, "cells are too small to pack their members at any mark size");
}

struct PackResult {
  std::vector<GroupLayout> groups;
  double mark_size = 0.0;
  bool legibility_warning = false;
};

// One global square mark size; each group is a column-major grid filled
// bottom to top, shaped after its box and centered in it.
inline PackResult layout_absolute(std::span<const CellInput> cells) {
  PackResult out;
  const double m = absolute_mark_size(cells);
  out.mark_size = m;
  out.legibility_warning = m < kMinMarkSize;
  for (const auto& cell : cells) {
    auto g = detail::empty_group(cell);
    const std::size_t count = cell.members.size();
    if (count > 0) {
      const auto max_cols = static_cast<std::size_t>(std::floor(cell.box.w / m));
      const auto max_rows = static_cast<std::size_t>(std::floor(cell.box.h / m));
      auto rows = static_cast<std::size_t>(
          std::ceil(std::sqrt(static_cast<double>(count) * cell.box.h / cell.box.w)));
      rows = std::clamp<std::size_t>(rows, 1, max_rows);
      auto cols = detail::ceil_div(count, rows);
      if (cols > max_cols) {
        cols = max_cols;
        rows = detail::ceil_div(count, cols);
      }
      cols = detail::ceil_div(count, rows);
      g.cols = static_cast<int>(cols);
      g.rows = static_cast<int>(rows);

      const double ox = cell.box.x + detail::snap_down((cell.box.w - static_cast<double>(cols) * m) / 2);
      const double oy = cell.box.bottom() - detail::snap_down((cell.box.h - static_cast<double>(rows) * m) / 2);
      g.marks.reserve(count);
      for (std::size_t k = 0; k < count; ++k) {
        const auto col = static_cast<double>(k / rows);
        const auto row = static_cast<double>(k % rows);
        MarkGeometry mark;
        mark.id = cell.members[k];
        mark.x = ox + col * m;
        mark.y = oy - (row + 1) * m;
        mark.w = mark.h = m;
        mark.corner_radius = m / 2;
        g.marks.push_back(std::move(mark));
      }
    }
    out.groups.push_back(std::move(g));
  }
  return out;
}

// Every group tiles its box exactly with marks of equal area. Columns:
// cols = ceil(sqrt(count * w / h)); column j holds k_j of the members (the
// first count % cols columns one more) and is w * k_j / count wide, so each
// mark covers box_area / count.
inline PackResult layout_normalized(std::span<const CellInput> cells) {
  PackResult out;
  for (const auto& cell : cells) {
    auto g = detail::empty_group(cell);
    const std::size_t count = cell.members.size();
    if (count > 0) {
      const Rect& b = cell.box;
      auto cols = static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(count) * b.w / b.h)));
      cols = std::clamp<std::size_t>(cols, 1, count);
      const std::size_t base = count / cols, extra = count % cols;
      g.cols = static_cast<int>(cols);
      g.rows = static_cast<int>(base + (extra ? 1 : 0));

      struct Slot {
        double x0, x1, y0, y1;
      };
      std::vector<Slot> slots;
      slots.reserve(count);
      double min_w = b.w, min_h = b.h;
      std::size_t before = 0;
      for (std::size_t c = 0; c < cols; ++c) {
        const std::size_t k = base + (c < extra ? 1 : 0);
        const double x0 = b.x + snap(b.w * static_cast<double>(before) / static_cast<double>(count));
        before += k;
        const double x1 = b.x + snap(b.w * static_cast<double>(before) / static_cast<double>(count));
        min_w = std::min(min_w, x1 - x0);
        for (std::size_t r = 0; r < k; ++r) {
          const double y1 = b.bottom() - snap(b.h * static_cast<double>(r) / static_cast<double>(k));
          const double y0 = b.bottom() - snap(b.h * static_cast<double>(r + 1) / static_cast<double>(k));
          min_h = std::min(min_h, y1 - y0);
          slots.push_back({x0, x1, y0, y1});
        }
      }
      if (!(min_w > 0) || !(min_h > 0)) {
        throw error(errc::capacity, "cell is too small to tile " + std::to_string(count) + " marks");
      }
      const double radius = rounded_corner(min_w, min_h);

      g.marks.reserve(count);
      for (std::size_t k = 0; k < count; ++k) {
        const auto& s = slots[k];
        MarkGeometry mark;
        mark.id = cell.members[k];
        mark.x = s.x0;
        mark.w = s.x1 - s.x0;
        mark.y = s.y0;
        mark.h = s.y1 - s.y0;
        mark.corner_radius = radius;
        g.marks.push_back(std::move(mark));
      }
    }
    out.groups.push_back(std::move(g));
  }
  return out;
}

namespace detail {

struct RibbonShape {
  bool horizontal = true;  // long edge along x
  double short_edge = 0;
  double long_edge = 0;
};

inline RibbonShape ribbon_shape(const Rect& box) {
  return box.w >= box.h ? RibbonShape{true, box.h, box.w} : RibbonShape{false, box.w, box.h};
}

inline bool ribbons_fit(std::span<const CellInput> cells, std::size_t k) {
  for (const auto& c : cells) {
    if (c.members.empty()) continue;
    auto shape = ribbon_shape(c.box);
    const double lines = static_cast<double>(ceil_div(c.members.size(), k));
    if (lines * (shape.short_edge / static_cast<double>(k)) > shape.long_edge) return false;
  }
  return true;
}

}  // namespace detail

// Smallest cross count k for which every ribbon of square marks fits its
// box along the long edge.
inline int default_streamgraph_k(std::span<const CellInput> cells) {
  double limit = 1;
  for (const auto& c : cells) limit = std::max(limit, detail::ribbon_shape(c.box).short_edge / kPixelQuantum);
  for (std::size_t k = 1; k <= static_cast<std::size_t>(limit); ++k) {
    if (detail::ribbons_fit(cells, k)) return static_cast<int>(k);
  }
  return static_cast<int>(limit);
}

// Ribbons of k marks across each box's shorter edge, growing along the
// longer edge by ceil(count / k) lines. When square marks would overrun a
// box, the step along the long edge shrinks for every group alike.
inline PackResult layout_streamgraph(std::span<const CellInput> cells, int k) {
  if (k < 1) throw error(errc::parameter, "streamgraph cross count must be at least 1");
  PackResult out;
  const auto kk = static_cast<std::size_t>(k);

  double step_scale = 1.0;  // long-edge step as a fraction of the short-edge mark size
  for (const auto& c : cells) {
    if (c.members.empty()) continue;
    auto shape = detail::ribbon_shape(c.box);
    const double s = shape.short_edge / k;
    const double lines = static_cast<double>(detail::ceil_div(c.members.size(), kk));
    step_scale = std::min(step_scale, shape.long_edge / (lines * s));
  }

  for (const auto& cell : cells) {
    auto g = detail::empty_group(cell);
    const std::size_t count = cell.members.size();
    if (count > 0) {
      const Rect& b = cell.box;
      auto shape = detail::ribbon_shape(b);
      const double s = shape.short_edge / k;
      const double step = s * step_scale;
      const std::size_t lines = detail::ceil_div(count, kk);
      const std::size_t lanes = std::min(kk, count);
      const double length = step * static_cast<double>(lines);
      const double lead = detail::snap_down((shape.long_edge - length) / 2);

      // Lane edges span the full short edge; line edges advance from `lead`.
      std::vector<double> lane_e(kk + 1), line_e(lines + 1);
      for (std::size_t j = 0; j <= kk; ++j) lane_e[j] = snap(shape.short_edge * static_cast<double>(j) / k);
      for (std::size_t l = 0; l <= lines; ++l) line_e[l] = lead + snap(step * static_cast<double>(l));

      g.cols = static_cast<int>(shape.horizontal ? lines : lanes);
      g.rows = static_cast<int>(shape.horizontal ? lanes : lines);
      double min_w = b.w, min_h = b.h;
      g.marks.reserve(count);
      for (std::size_t j = 0; j < count; ++j) {
        const auto line = j / kk;
        const auto lane = j % kk;
        MarkGeometry mark;
        mark.id = cell.members[j];
        const double a0 = line_e[line], a1 = line_e[line + 1];
        const double c0 = lane_e[lane], c1 = lane_e[lane + 1];
        if (shape.horizontal) {
          mark.x = b.x + a0;
          mark.w = a1 - a0;
          mark.y = b.bottom() - c1;
          mark.h = c1 - c0;
        } else {
          mark.x = b.x + c0;
          mark.w = c1 - c0;
          mark.y = b.bottom() - a1;
          mark.h = a1 - a0;
        }
        min_w = std::min(min_w, mark.w);
        min_h = std::min(min_h, mark.h);
        g.marks.push_back(std::move(mark));
      }
      const double radius = rounded_corner(min_w, min_h);
      for (auto& mark : g.marks) mark.corner_radius = radius;
    }
    out.groups.push_back(std::move(g));
  }
  return out;
}

// Minimized strips: members fall back to a linear run along the strip's
// longer edge and may overlap there.
inline GroupLayout layout_folded_cell(const CellInput& cell) {
  auto g = detail::empty_group(cell);
  g.folded = true;
  const std::size_t count = cell.members.size();
  if (count == 0) return g;
  const Rect& b = cell.box;
  const bool vertical = b.h >= b.w;
  const double extent = vertical ? b.h : b.w;
  const double n = static_cast<double>(count);
  const double len = snap(std::max(extent / n, std::min(1.0, extent)));
  const double step = count > 1 ? (extent - len) / (n - 1) : 0.0;
  g.cols = vertical ? 1 : static_cast<int>(count);
  g.rows = vertical ? static_cast<int>(count) : 1;
  g.marks.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    const double start = std::min(snap(static_cast<double>(i) * step), extent - len);
    MarkGeometry mark;
    mark.id = cell.members[i];
    if (vertical) {
      mark.x = b.x;
      mark.w = b.w;
      mark.h = len;
      mark.y = b.bottom() - start - len;
    } else {
      mark.x = b.x + start;
      mark.w = len;
      mark.y = b.y;
      mark.h = b.h;
    }
    mark.corner_radius = rounded_corner(mark.w, mark.h);
    g.marks.push_back(std::move(mark));
  }
  return g;
}

namespace detail {

struct AxisPlan {
  Axis axis = Axis::X;
  std::optional<std::size_t> dim;
  std::string kind = "undefined";
  std::vector<std::string> keys;
  std::vector<std::size_t> segment_of;  // per point
  std::vector<bool> minimized;
  int dot = 0;  // binned axes: bin width in pixels
};

inline std::string axis_label(Axis a) { return std::string(to_string(a)) + " axis"; }

inline void plan_undefined(AxisPlan& p, std::size_t n) {
  p.kind = "undefined";
  p.keys = {std::string(kUndefinedKey)};
  p.segment_of.assign(n, 0);
  p.minimized.assign(1, false);
}

inline void plan_categorical(AxisPlan& p, const Dataset& data, std::size_t d,
                             const std::map<FoldKey, FoldState>& folds) {
  const auto& dim = data.dimension(d);
  p.kind = "categorical";
  p.keys = dim.categories;
  p.segment_of.resize(data.size());
  for (PointId i = 0; i < data.size(); ++i) p.segment_of[i] = data.code(d, i);
  p.minimized.assign(p.keys.size(), false);

  std::optional<std::string> maximized;
  for (const auto& [key, state] : folds) {
    if (key.first == p.axis && state == FoldState::Maximized) maximized = key.second;
  }
  for (std::size_t i = 0; i < p.keys.size(); ++i) {
    if (maximized) {
      p.minimized[i] = p.keys[i] != *maximized;
    } else if (auto it = folds.find({p.axis, p.keys[i]}); it != folds.end()) {
      p.minimized[i] = it->second == FoldState::Minimized;
    }
  }
}

inline void plan_quantized(AxisPlan& p, const Dataset& data, std::size_t d, std::size_t bins) {
  auto q = quantize(data.dimension(d), QuantizePolicy::fixed_count(bins));
  p.kind = "quantized";
  p.keys = q.labels();
  p.segment_of.resize(data.size());
  for (PointId i = 0; i < data.size(); ++i) p.segment_of[i] = q.bin_of(data.value(d, i));
  p.minimized.assign(p.keys.size(), false);
}

inline std::vector<std::vector<PointId>> members_by_segment(const AxisPlan& p) {
  std::vector<std::vector<PointId>> out(p.keys.size());
  for (PointId i = 0; i < p.segment_of.size(); ++i) out[p.segment_of[i]].push_back(i);
  return out;
}

// Local [0, extent) transform for categorical, undefined and quantized axes.
inline GatherTransform segment_axis(const AxisPlan& p, double extent, const GatherplotSpec& spec) {
  SegmentOptions opt;
  opt.policy = spec.policy;
  opt.gutter = p.keys.size() > 1 ? spec.gutter : 0.0;
  opt.minimized = p.minimized;
  opt.axis_name = axis_label(p.axis);
  return build_segments(p.keys, members_by_segment(p), extent, opt);
}

inline GatherTransform binned_axis(const AxisPlan& p) {
  GatherTransform t;
  t.gutter = 0;
  t.mark_size = p.dot;
  auto members = members_by_segment(p);
  for (std::size_t i = 0; i < p.keys.size(); ++i) {
    Segment s;
    s.key = p.keys[i];
    s.lo = static_cast<double>(i) * p.dot;
    s.hi = s.lo + p.dot;
    s.members = std::move(members[i]);
    t.segments.push_back(std::move(s));
  }
  return t;
}

// Moves a local transform into screen pixels. Y segments run bottom-up.
inline GatherTransform to_screen(GatherTransform t, Axis axis, const Rect& region) {
  for (auto& s : t.segments) {
    if (axis == Axis::X) {
      s.lo += region.x;
      s.hi += region.x;
    } else {
      const double lo = region.bottom() - s.hi;
      const double hi = region.bottom() - s.lo;
      s.lo = lo;
      s.hi = hi;
    }
  }
  return t;
}

struct ColorPlan {
  std::optional<std::size_t> dim;
  std::vector<std::string> keys;
  std::vector<int> index_of;  // per point
};

inline ColorPlan plan_color(const Dataset& data, std::optional<std::size_t> d, std::size_t bins) {
  ColorPlan c;
  c.dim = d;
  c.index_of.assign(data.size(), 0);
  if (!d) return c;
  const auto& dim = data.dimension(*d);
  if (dim.categorical()) {
    c.keys = dim.categories;
    for (PointId i = 0; i < data.size(); ++i) c.index_of[i] = static_cast<int>(data.code(*d, i));
  } else {
    auto q = quantize(dim, QuantizePolicy::fixed_count(bins));
    c.keys = q.labels();
    for (PointId i = 0; i < data.size(); ++i) c.index_of[i] = static_cast<int>(q.bin_of(data.value(*d, i)));
  }
  return c;
}

inline void apply_colors(std::vector<GroupLayout>& groups, const ColorPlan& color) {
  for (auto& g : groups) {
    for (auto& m : g.marks) {
      m.color_index = color.index_of[m.id];
      m.color_key = color.keys.empty() ? std::string() : color.keys[static_cast<std::size_t>(m.color_index)];
    }
  }
}

inline Rect snapped_region(const Rect& r) {
  if (!(r.w > 0) || !(r.h > 0)) throw error(errc::parameter, "plot region must have positive size");
  return {std::floor(r.x), std::floor(r.y), std::floor(r.w), std::floor(r.h)};
}

}  // namespace detail

// Same continuous dimension on both axes: the dot plot is rotated onto the
// diagonal. Bin i sits at lattice cell (p, p), p = offset + i, and its stack
// runs perpendicular to the diagonal through cells (p - o, p + o). Lattice
// cells never share interiors, so the result is overlap-free.
inline PlotLayout layout_rotated(const Dataset& data, std::size_t d, const GatherplotSpec& spec) {
  const Rect region = detail::snapped_region(spec.region);
  const auto& dim = data.dimension(d);
  auto values = data.column(d);
  const std::size_t n = data.size();
  const double side = std::min(region.w, region.h);

  struct Choice {
    int m = 1;
    std::size_t grid = 1;
    std::size_t bins = 1;
    std::size_t offset = 0;
  };
  std::optional<Choice> choice;
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  auto [span_lo, span_hi] = quantization_span(dim);
  // Same edges and clamping as Quantizer::bin_of, counted on sorted values.
  auto fits = [&](std::size_t grid, std::size_t bins) {
    if (bins > grid) return false;
    const std::size_t offset = (grid - bins) / 2;
    std::size_t below = 0;
    for (std::size_t i = 0; i < bins; ++i) {
      std::size_t upto = n;
      if (i + 1 < bins) {
        const double edge = span_lo + (span_hi - span_lo) * static_cast<double>(i + 1) / static_cast<double>(bins);
        upto = static_cast<std::size_t>(std::lower_bound(sorted.begin(), sorted.end(), edge) - sorted.begin());
      }
      const std::size_t count = upto - below;
      below = upto;
      const std::size_t p = offset + i;
      if (count > 2 * std::min(p, grid - 1 - p) + 1) return false;
    }
    return true;
  };
  for (int m : dot_size_ladder(n, side)) {
    const auto grid = static_cast<std::size_t>(std::floor(side / m));
    if (grid == 0) continue;
    const std::size_t max_bins = dim.min == dim.max ? 1 : grid;
    for (std::size_t bins = max_bins; bins >= 1; --bins) {
      if (fits(grid, bins)) {
        choice = Choice{m, grid, bins, (grid - bins) / 2};
        break;
      }
    }
    if (choice) break;
  }

  PlotLayout layout;
  layout.region = region;
  layout.rotated = true;
  layout.mode_used = LayoutMode::Absolute;
  if (!choice) {
    throw error(errc::capacity, "region is too small for the rotated dot plot of '" + dim.name + "'");
  }
  const auto [m, grid, bins, offset] = *choice;
  layout.mark_size = m;

  auto q = dim.min == dim.max ? Quantizer(dim, {dim.min, dim.max})
                              : quantize(dim, QuantizePolicy::fixed_count(bins));
  const double span = static_cast<double>(grid) * m;
  const double ox = region.x + detail::snap_down((region.w - span) / 2);
  const double oy = region.bottom() - detail::snap_down((region.h - span) / 2);

  std::optional<std::size_t> color_dim;
  if (spec.color_dim) color_dim = data.index_of(*spec.color_dim);
  auto color = detail::plan_color(data, color_dim, spec.continuous_bins);

  std::vector<std::vector<PointId>> members(q.size());
  for (PointId i = 0; i < n; ++i) members[q.bin_of(values[i])].push_back(i);

  GatherTransform xt, yt;
  xt.gutter = yt.gutter = 0;
  xt.mark_size = yt.mark_size = m;
  for (std::size_t b = 0; b < q.size(); ++b) {
    auto ordered = order_within_segment(members[b], data, color_dim);
    const auto p = static_cast<double>(offset + b);

    Segment xs{q.labels()[b], ox + p * m, ox + (p + 1) * m, ordered};
    Segment ys{q.labels()[b], oy - (p + 1) * m, oy - p * m, ordered};
    xt.segments.push_back(xs);
    yt.segments.push_back(ys);

    GroupLayout g;
    g.x_key = g.y_key = q.labels()[b];
    g.cols = 1;
    g.rows = static_cast<int>(ordered.size());
    const auto count = static_cast<long long>(ordered.size());
    const long long first = -((count - 1) / 2);
    double x0 = ox + p * m, y0 = oy - (p + 1) * m, x1 = x0 + m, y1 = y0 + m;
    for (long long k = 0; k < count; ++k) {
      const auto o = static_cast<double>(first + k);
      MarkGeometry mark;
      mark.id = ordered[static_cast<std::size_t>(k)];
      mark.x = ox + (p - o) * m;
      mark.y = oy - (p + o + 1) * m;
      mark.w = mark.h = m;
      mark.corner_radius = m / 2.0;
      x0 = std::min(x0, mark.x);
      y0 = std::min(y0, mark.y);
      x1 = std::max(x1, mark.x + m);
      y1 = std::max(y1, mark.y + m);
      g.marks.push_back(std::move(mark));
    }
    g.box = {x0, y0, x1 - x0, y1 - y0};
    layout.groups.push_back(std::move(g));
  }
  detail::apply_colors(layout.groups, color);

  layout.x_axis = {Axis::X, dim.name, "binned", std::move(xt)};
  layout.y_axis = {Axis::Y, dim.name, "binned", std::move(yt)};
  layout.ticks = bracket_ticks(layout.x_axis.transform, Axis::X);
  auto yticks = bracket_ticks(layout.y_axis.transform, Axis::Y);
  layout.ticks.insert(layout.ticks.end(), yticks.begin(), yticks.end());
  if (spec.color_dim) {
    layout.color_dim = spec.color_dim;
    for (std::size_t i = 0; i < color.keys.size(); ++i) layout.legend.push_back({color.keys[i], static_cast<int>(i)});
  }
  return layout;
}

namespace detail {

inline void validate_folds(const Dataset& data, const GatherplotSpec& spec) {
  std::map<Axis, int> maximized;
  for (const auto& [key, state] : spec.folds) {
    const auto& name = key.first == Axis::X ? spec.x_dim : spec.y_dim;
    if (!name) {
      throw error(errc::parameter, "cannot fold the undefined " + axis_label(key.first));
    }
    const auto& dim = data.dimension(*name);
    if (!dim.categorical()) {
      throw error(errc::parameter, "folding needs a categorical axis; '" + dim.name + "' is continuous");
    }
    if (std::find(dim.categories.begin(), dim.categories.end(), key.second) == dim.categories.end()) {
      throw error(errc::parameter, "unknown value '" + key.second + "' on " + axis_label(key.first));
    }
    if (state == FoldState::Maximized && ++maximized[key.first] > 1) {
      throw error(errc::parameter, "at most one value per axis can be maximized");
    }
  }
}

}  // namespace detail

inline PlotLayout layout_gatherplot(const Dataset& data, const GatherplotSpec& spec) {
  std::optional<std::size_t> xd, yd, cd;
  if (spec.x_dim) xd = data.index_of(*spec.x_dim);
  if (spec.y_dim) yd = data.index_of(*spec.y_dim);
  if (spec.color_dim) cd = data.index_of(*spec.color_dim);
  detail::validate_folds(data, spec);
  if (spec.continuous_bins < 1) throw error(errc::parameter, "continuous bin count must be at least 1");

  if (xd && yd && *xd == *yd && data.dimension(*xd).continuous()) {
    return layout_rotated(data, *xd, spec);
  }

  const Rect region = detail::snapped_region(spec.region);
  const std::size_t n = data.size();
  detail::AxisPlan xp, yp;
  xp.axis = Axis::X;
  yp.axis = Axis::Y;
  xp.dim = xd;
  yp.dim = yd;

  auto is_cont = [&](std::optional<std::size_t> d) { return d && data.dimension(*d).continuous(); };
  auto plan_discrete = [&](detail::AxisPlan& p) {
    if (!p.dim) {
      detail::plan_undefined(p, n);
    } else if (data.dimension(*p.dim).categorical()) {
      detail::plan_categorical(p, data, *p.dim, spec.folds);
    } else {
      detail::plan_quantized(p, data, *p.dim, spec.continuous_bins);
    }
  };

  const bool both_cont = is_cont(xd) && is_cont(yd);
  std::vector<std::string> warnings;
  GatherTransform xt, yt;

  // A continuous axis opposite a discrete one is binned as a dot plot whose
  // densest stack must fit the cross cell.
  auto bin_axis = [&](detail::AxisPlan& p, const detail::AxisPlan& cross, const GatherTransform& cross_t,
                      double extent_main) {
    const auto& dim = data.dimension(*p.dim);
    double cross_extent = 0;
    for (const auto& s : cross_t.segments) {
      if (!s.minimized) cross_extent = cross_extent > 0 ? std::min(cross_extent, s.width()) : s.width();
    }
    if (cross_extent <= 0) cross_extent = cross_t.segments.front().width();
    std::vector<std::vector<double>> groups(cross.keys.size());
    for (PointId i = 0; i < n; ++i) {
      if (!cross.minimized[cross.segment_of[i]]) groups[cross.segment_of[i]].push_back(data.value(*p.dim, i));
    }
    auto bin = bin_continuous_grouped(dim, groups, extent_main, cross_extent);
    if (bin.legibility_warning) {
      warnings.push_back("dot size for '" + dim.name + "' clamped to 1 px; the densest bin does not fit");
    }
    p.kind = "binned";
    p.dot = bin.dot_size;
    p.keys = bin.quantizer.labels();
    p.segment_of.resize(n);
    for (PointId i = 0; i < n; ++i) p.segment_of[i] = bin.quantizer.bin_of(data.value(*p.dim, i));
    p.minimized.assign(p.keys.size(), false);
    return detail::binned_axis(p);
  };

  if (both_cont || (!is_cont(xd) && !is_cont(yd))) {
    plan_discrete(xp);
    plan_discrete(yp);
    xt = detail::segment_axis(xp, region.w, spec);
    yt = detail::segment_axis(yp, region.h, spec);
  } else if (is_cont(xd)) {
    plan_discrete(yp);
    yt = detail::segment_axis(yp, region.h, spec);
    xt = bin_axis(xp, yp, yt, region.w);
  } else {
    plan_discrete(xp);
    xt = detail::segment_axis(xp, region.w, spec);
    yt = bin_axis(yp, xp, xt, region.h);
  }
  xt = detail::to_screen(std::move(xt), Axis::X, region);
  yt = detail::to_screen(std::move(yt), Axis::Y, region);

  auto color = detail::plan_color(data, cd, spec.continuous_bins);
  for (auto* t : {&xt, &yt}) {
    for (auto& s : t->segments) s.members = order_within_segment(std::move(s.members), data, cd);
  }

  // Cells, x-major.
  const std::size_t nx = xt.size(), ny = yt.size();
  std::vector<std::vector<PointId>> cell_members(nx * ny);
  for (PointId i = 0; i < n; ++i) cell_members[xp.segment_of[i] * ny + yp.segment_of[i]].push_back(i);

  std::vector<CellInput> open_cells, folded_cells;
  std::vector<std::pair<bool, std::size_t>> slot;  // (folded, index) per cell in x-major order
  for (std::size_t i = 0; i < nx; ++i) {
    for (std::size_t j = 0; j < ny; ++j) {
      const auto& xs = xt.segments[i];
      const auto& ys = yt.segments[j];
      CellInput c;
      c.x_key = xs.key;
      c.y_key = ys.key;
      c.box = {xs.lo, ys.lo, xs.width(), ys.width()};
      c.members = order_within_segment(std::move(cell_members[i * ny + j]), data, cd);
      const bool folded = xs.minimized || ys.minimized;
      auto& bucket = folded ? folded_cells : open_cells;
      slot.emplace_back(folded, bucket.size());
      bucket.push_back(std::move(c));
    }
  }

  PlotLayout layout;
  layout.region = region;
  double aspect = 1.0;
  if (!open_cells.empty()) aspect = open_cells.front().box.w / open_cells.front().box.h;
  layout.mode_used = resolve_mode(spec.mode, aspect);

  PackResult packed;
  // Reported for every mode: the size absolute mode would use.
  double absolute_m = 0;
  if (!open_cells.empty()) {
    if (layout.mode_used == LayoutMode::Absolute) {
      absolute_m = absolute_mark_size(open_cells);
    } else {
      for (double m : absolute_size_ladder()) {
        if (absolute_fits(open_cells, m)) {
          absolute_m = m;
          break;
        }
      }
    }
  }
  switch (layout.mode_used) {
    case LayoutMode::Normalized:
      packed = layout_normalized(open_cells);
      break;
    case LayoutMode::Streamgraph: {
      const int k = spec.streamgraph_k ? *spec.streamgraph_k : default_streamgraph_k(open_cells);
      layout.streamgraph_k = k;
      packed = layout_streamgraph(open_cells, k);
      break;
    }
    default:
      packed = layout_absolute(open_cells);
      break;
  }
  layout.mark_size = absolute_m;
  if (layout.mode_used == LayoutMode::Absolute && absolute_m < kMinMarkSize && !open_cells.empty()) {
    warnings.push_back("mark size fell below 1 px (" + format_number(absolute_m) + " px)");
  }

  for (const auto& [folded, idx] : slot) {
    layout.groups.push_back(folded ? layout_folded_cell(folded_cells[idx]) : std::move(packed.groups[idx]));
  }
  detail::apply_colors(layout.groups, color);

  layout.x_axis = {Axis::X, spec.x_dim, xp.kind, std::move(xt)};
  layout.y_axis = {Axis::Y, spec.y_dim, yp.kind, std::move(yt)};
  layout.ticks = bracket_ticks(layout.x_axis.transform, Axis::X);
  auto yticks = bracket_ticks(layout.y_axis.transform, Axis::Y);
  layout.ticks.insert(layout.ticks.end(), yticks.begin(), yticks.end());
  layout.color_dim = spec.color_dim;
  for (std::size_t i = 0; i < color.keys.size(); ++i) layout.legend.push_back({color.keys[i], static_cast<int>(i)});
  layout.warnings = std::move(warnings);
  return layout;
}

// Updated spec after folding `value_key` on `axis`. Maximizing a value
// minimizes every other value of that axis; Normal restores the value.
inline GatherplotSpec fold_spec(const Dataset& data, GatherplotSpec spec, Axis axis,
                                const std::string& value_key, FoldState state) {
  const auto& name = axis == Axis::X ? spec.x_dim : spec.y_dim;
  if (!name) throw error(errc::parameter, "cannot fold the undefined " + detail::axis_label(axis));
  const auto& dim = data.dimension(*name);
  if (!dim.categorical()) {
    throw error(errc::parameter, "folding needs a categorical axis; '" + dim.name + "' is continuous");
  }
  if (std::find(dim.categories.begin(), dim.categories.end(), value_key) == dim.categories.end()) {
    throw error(errc::parameter, "unknown value '" + value_key + "' on " + detail::axis_label(axis));
  }
  switch (state) {
    case FoldState::Normal: {
      auto it = spec.folds.find({axis, value_key});
      if (it != spec.folds.end() && it->second == FoldState::Maximized) {
        std::erase_if(spec.folds, [&](const auto& kv) { return kv.first.first == axis; });
      } else if (it != spec.folds.end()) {
        spec.folds.erase(it);
      }
      break;
    }
    case FoldState::Minimized:
      spec.folds[{axis, value_key}] = FoldState::Minimized;
      break;
    case FoldState::Maximized:
      std::erase_if(spec.folds, [&](const auto& kv) { return kv.first.first == axis; });
      spec.folds[{axis, value_key}] = FoldState::Maximized;
      break;
  }
  return spec;
}

struct FoldResult {
  GatherplotSpec spec;
  PlotLayout layout;
};

inline FoldResult fold_axis(const Dataset& data, const GatherplotSpec& spec, Axis axis,
                            const std::string& value_key, FoldState state) {
  auto updated = fold_spec(data, spec, axis, value_key, state);
  auto layout = layout_gatherplot(data, updated);
  return {std::move(updated), std::move(layout)};
}

}  // namespace gatherplot
