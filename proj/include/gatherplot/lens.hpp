#pragma once

// GatherLens: local gathering of the scatterplot points under a rectangular
// lens, laid out as stacked groups, a histogram, or a pie of per-point
// wedges.

#include <gatherplot/data_model.hpp>
#include <gatherplot/error.hpp>
#include <gatherplot/gather.hpp>
#include <gatherplot/geometry.hpp>
#include <gatherplot/layout.hpp>
#include <gatherplot/overlap.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace gatherplot {

inline constexpr double kDefaultScatterMark = 4.0;

enum class LensMode { Standard, Histogram, Pie };

constexpr std::string_view to_string(LensMode m) noexcept {
  switch (m) {
    case LensMode::Standard: return "standard";
    case LensMode::Histogram: return "histogram";
    case LensMode::Pie: return "pie";
  }
  return "standard";
}

inline LensMode parse_lens_mode(std::string_view s) {
  if (s == "standard") return LensMode::Standard;
  if (s == "histogram") return LensMode::Histogram;
  if (s == "pie") return LensMode::Pie;
  throw error(errc::parameter, "unknown lens mode '" + std::string(s) + "'");
}

struct LensSpec {
  Rect region;
  LensMode mode = LensMode::Standard;
  std::string group_dim;
};

// A plain scatterplot mark: square of side `size` centered on (x, y).
struct ScatterMark {
  PointId id = 0;
  double x = 0.0;
  double y = 0.0;
  double size = kDefaultScatterMark;

  Rect rect() const noexcept { return {x - size / 2, y - size / 2, size, size}; }
  friend bool operator==(const ScatterMark&, const ScatterMark&) = default;
};

// Linear scatterplot of two continuous dimensions inside `region`; mark
// centers stay half a mark away from the region edges.
inline std::vector<ScatterMark> scatter_layout(const Dataset& data, std::string_view x_dim,
                                               std::string_view y_dim, const Rect& region,
                                               double mark_size = kDefaultScatterMark) {
  const auto xd = data.index_of(x_dim);
  const auto yd = data.index_of(y_dim);
  for (auto d : {xd, yd}) {
    if (!data.dimension(d).continuous()) {
      throw error(errc::parameter,
                  "scatterplot axes must be continuous; '" + data.dimension(d).name + "' is categorical");
    }
  }
  if (!(mark_size > 0)) throw error(errc::parameter, "mark size must be positive");
  const auto& dx = data.dimension(xd);
  const auto& dy = data.dimension(yd);
  const double half = mark_size / 2;
  auto fx = VisualTransform::linear(dx.min, dx.max, region.x + half, region.right() - half, mark_size).f;
  auto fy = VisualTransform::linear(dy.min, dy.max, region.bottom() - half, region.y + half, mark_size).f;
  std::vector<ScatterMark> marks;
  marks.reserve(data.size());
  for (PointId i = 0; i < data.size(); ++i) {
    marks.push_back({i, fx(data.value(xd, i)), fy(data.value(yd, i)), mark_size});
  }
  return marks;
}

// Ids whose mark rectangle touches the lens (closed intersection). A lens
// with zero area captures nothing.
inline std::vector<PointId> capture(std::span<const ScatterMark> scatter, const LensSpec& spec) {
  std::vector<PointId> ids;
  if (!(spec.region.w > 0) || !(spec.region.h > 0)) return ids;
  for (const auto& m : scatter) {
    if (m.rect().touches(spec.region)) ids.push_back(m.id);
  }
  std::sort(ids.begin(), ids.end());
  return ids;
}

struct PieSector {
  std::string key;
  int color_index = 0;
  std::size_t count = 0;
  double start_deg = 0.0;  // clockwise from 12 o'clock
  double sweep_deg = 0.0;
};

// One annular cell of the pie, owned by a single point.
struct WedgeMark {
  PointId id = 0;
  double cx = 0.0;
  double cy = 0.0;
  double r_inner = 0.0;
  double r_outer = 0.0;
  double start_deg = 0.0;
  double sweep_deg = 0.0;
  std::string color_key;
  int color_index = 0;
};

struct LensLayout {
  Rect region;
  LensMode mode = LensMode::Standard;
  std::string group_dim;
  std::vector<PointId> captured_ids;
  std::vector<PointId> base_suppressed;
  std::vector<GroupLayout> groups;  // standard and histogram
  std::vector<PieSector> sectors;   // pie
  std::vector<WedgeMark> wedges;    // pie
  double mark_size = 0.0;
  int rings = 0;

  std::size_t mark_count() const noexcept {
    std::size_t n = wedges.size();
    for (const auto& g : groups) n += g.marks.size();
    return n;
  }
};

namespace detail {

struct LensGroups {
  std::vector<std::string> keys;  // present values, in dimension order
  std::vector<int> color_index;
  std::vector<std::vector<PointId>> members;
};

inline LensGroups lens_groups(std::span<const PointId> captured, const Dataset& data,
                              const std::string& group_dim) {
  const auto d = data.index_of(group_dim);
  const auto& dim = data.dimension(d);
  std::vector<std::string> all_keys;
  std::vector<std::size_t> bin(data.size(), 0);
  if (dim.categorical()) {
    all_keys = dim.categories;
    for (PointId id : captured) bin.at(id) = data.code(d, id);
  } else {
    auto q = quantize(dim, QuantizePolicy::fixed_count(kDefaultContinuousBins));
    all_keys = q.labels();
    for (PointId id : captured) bin.at(id) = q.bin_of(data.value(d, id));
  }
  std::vector<std::vector<PointId>> by_key(all_keys.size());
  std::vector<PointId> sorted(captured.begin(), captured.end());
  std::sort(sorted.begin(), sorted.end());
  for (PointId id : sorted) by_key[bin[id]].push_back(id);

  LensGroups out;
  for (std::size_t k = 0; k < all_keys.size(); ++k) {
    if (by_key[k].empty()) continue;
    out.keys.push_back(all_keys[k]);
    out.color_index.push_back(static_cast<int>(k));
    out.members.push_back(std::move(by_key[k]));
  }
  return out;
}

inline std::vector<CellInput> lens_columns(const LensGroups& groups, const Rect& region) {
  const double gutter = groups.keys.size() > 1 ? kDefaultGutter : 0.0;
  SegmentOptions opt;
  opt.gutter = gutter;
  opt.axis_name = "lens";
  auto t = build_segments(groups.keys, groups.members, std::floor(region.w), opt);
  std::vector<CellInput> cells;
  for (const auto& seg : t.segments) {
    cells.push_back({seg.key, std::string(kUndefinedKey),
                     {std::floor(region.x) + seg.lo, std::floor(region.y), seg.width(), std::floor(region.h)},
                     seg.members});
  }
  return cells;
}

inline void color_groups(std::vector<GroupLayout>& groups, const LensGroups& lg) {
  for (std::size_t g = 0; g < groups.size(); ++g) {
    for (auto& m : groups[g].marks) {
      m.color_key = lg.keys[g];
      m.color_index = lg.color_index[g];
    }
  }
}

// Row-major, bottom-up packing at one global mark size, all columns on a
// common baseline.
inline PackResult histogram_columns(std::span<const CellInput> cells) {
  auto fits = [&](double m) {
    for (const auto& c : cells) {
      const auto per_row = static_cast<std::size_t>(std::floor(c.box.w / m));
      const auto rows = static_cast<std::size_t>(std::floor(c.box.h / m));
      if (per_row == 0 || per_row * rows < c.members.size()) return false;
    }
    return true;
  };
  double m = 0;
  for (double candidate : absolute_size_ladder()) {
    if (fits(candidate)) {
      m = candidate;
      break;
    }
  }
  if (m == 0) throw error(errc::capacity, "lens is too small for its histogram");

  PackResult out;
  out.mark_size = m;
  for (const auto& c : cells) {
    GroupLayout g;
    g.x_key = c.x_key;
    g.y_key = c.y_key;
    g.box = c.box;
    const auto per_row = static_cast<std::size_t>(std::floor(c.box.w / m));
    const std::size_t count = c.members.size();
    g.cols = static_cast<int>(std::min(per_row, count));
    g.rows = static_cast<int>((count + per_row - 1) / per_row);
    const double ox = c.box.x + std::floor((c.box.w - static_cast<double>(per_row) * m) / 2 / kPixelQuantum) * kPixelQuantum;
    for (std::size_t k = 0; k < count; ++k) {
      MarkGeometry mark;
      mark.id = c.members[k];
      mark.x = ox + static_cast<double>(k % per_row) * m;
      mark.y = c.box.bottom() - static_cast<double>(k / per_row + 1) * m;
      mark.w = mark.h = m;
      mark.corner_radius = m / 2;
      g.marks.push_back(std::move(mark));
    }
    out.groups.push_back(std::move(g));
  }
  return out;
}

// Splits `count` cells over rings in proportion to ring area (2r + 1),
// largest remainder first, ties to the inner ring.
inline std::vector<std::size_t> ring_shares(std::size_t count, std::size_t rings) {
  const double total = static_cast<double>(rings * rings);
  std::vector<std::size_t> share(rings);
  std::vector<std::pair<double, std::size_t>> remainder;
  std::size_t used = 0;
  for (std::size_t r = 0; r < rings; ++r) {
    const double exact = static_cast<double>(count) * static_cast<double>(2 * r + 1) / total;
    share[r] = static_cast<std::size_t>(std::floor(exact));
    used += share[r];
    remainder.push_back({-(exact - std::floor(exact)), r});
  }
  std::sort(remainder.begin(), remainder.end());
  for (std::size_t i = 0; used < count; ++i, ++used) ++share[remainder[i % rings].second];
  return share;
}

}  // namespace detail

inline LensLayout layout_lens(std::span<const PointId> captured, const Dataset& data, const LensSpec& spec) {
  auto groups = detail::lens_groups(captured, data, spec.group_dim);
  LensLayout out;
  out.region = spec.region;
  out.mode = spec.mode;
  out.group_dim = spec.group_dim;
  out.captured_ids.assign(captured.begin(), captured.end());
  std::sort(out.captured_ids.begin(), out.captured_ids.end());
  out.base_suppressed = out.captured_ids;
  if (out.captured_ids.empty()) return out;

  switch (spec.mode) {
    case LensMode::Standard: {
      auto cells = detail::lens_columns(groups, spec.region);
      auto packed = layout_absolute(cells);
      out.mark_size = packed.mark_size;
      out.groups = std::move(packed.groups);
      detail::color_groups(out.groups, groups);
      break;
    }
    case LensMode::Histogram: {
      auto cells = detail::lens_columns(groups, spec.region);
      auto packed = detail::histogram_columns(cells);
      out.mark_size = packed.mark_size;
      out.groups = std::move(packed.groups);
      detail::color_groups(out.groups, groups);
      break;
    }
    case LensMode::Pie: {
      const double total = static_cast<double>(out.captured_ids.size());
      const double cx = spec.region.x + spec.region.w / 2;
      const double cy = spec.region.y + spec.region.h / 2;
      const double radius = std::min(spec.region.w, spec.region.h) / 2;
      const auto rings = static_cast<std::size_t>(
          std::max(1.0, std::round(std::sqrt(total / std::numbers::pi))));
      out.rings = static_cast<int>(rings);
      const double thickness = radius / static_cast<double>(rings);

      std::size_t before = 0;
      for (std::size_t g = 0; g < groups.keys.size(); ++g) {
        const auto& members = groups.members[g];
        PieSector sector;
        sector.key = groups.keys[g];
        sector.color_index = groups.color_index[g];
        sector.count = members.size();
        // Cumulative boundaries keep the sweeps summing to exactly 360.
        sector.start_deg = 360.0 * static_cast<double>(before) / total;
        before += members.size();
        sector.sweep_deg = 360.0 * static_cast<double>(before) / total - sector.start_deg;

        auto shares = detail::ring_shares(members.size(), rings);
        std::size_t next = 0;
        for (std::size_t r = 0; r < rings; ++r) {
          const double step = shares[r] ? sector.sweep_deg / static_cast<double>(shares[r]) : 0.0;
          for (std::size_t c = 0; c < shares[r]; ++c) {
            WedgeMark w;
            w.id = members[next++];
            w.cx = cx;
            w.cy = cy;
            w.r_inner = thickness * static_cast<double>(r);
            w.r_outer = thickness * static_cast<double>(r + 1);
            w.start_deg = sector.start_deg + step * static_cast<double>(c);
            w.sweep_deg = step;
            w.color_key = sector.key;
            w.color_index = sector.color_index;
            out.wedges.push_back(std::move(w));
          }
        }
        out.sectors.push_back(std::move(sector));
      }
      break;
    }
  }
  return out;
}

// The scatterplot as drawn under an active lens: suppressed ids removed.
inline std::vector<ScatterMark> visible_base(std::span<const ScatterMark> scatter, const LensLayout& lens) {
  std::vector<ScatterMark> out;
  out.reserve(scatter.size());
  for (const auto& m : scatter) {
    if (!std::binary_search(lens.base_suppressed.begin(), lens.base_suppressed.end(), m.id)) out.push_back(m);
  }
  return out;
}

}  // namespace gatherplot
