#include "support.hpp"

#include <gtest/gtest.h>

#include <functional>
#include <set>

namespace gp = gatherplot;
using namespace testing_support;

namespace {

gp::errc error_code(const std::function<void()>& f) {
  try {
    f();
  } catch (const gp::error& e) {
    return e.code();
  }
  ADD_FAILURE() << "expected gatherplot::error";
  return gp::errc::not_found;
}

std::vector<std::vector<gp::PointId>> groups_of_sizes(const std::vector<std::size_t>& sizes) {
  std::vector<std::vector<gp::PointId>> out;
  gp::PointId next = 0;
  for (auto n : sizes) {
    out.emplace_back();
    for (std::size_t i = 0; i < n; ++i) out.back().push_back(next++);
  }
  return out;
}

std::vector<std::string> keys(std::size_t n) {
  std::vector<std::string> k;
  for (std::size_t i = 0; i < n; ++i) k.push_back("k" + std::to_string(i));
  return k;
}

gp::CellInput cell(gp::Rect box, std::size_t count, gp::PointId first = 0) {
  gp::CellInput c;
  c.box = box;
  for (std::size_t i = 0; i < count; ++i) c.members.push_back(first + static_cast<gp::PointId>(i));
  return c;
}

std::vector<gp::MarkGeometry> marks_of(const std::vector<gp::GroupLayout>& groups) {
  std::vector<gp::MarkGeometry> out;
  for (const auto& g : groups) out.insert(out.end(), g.marks.begin(), g.marks.end());
  return out;
}

gp::Dimension continuous(const std::string& name, const std::vector<double>& v) {
  gp::Dimension d;
  d.name = name;
  d.kind = gp::DimensionKind::Continuous;
  d.min = *std::min_element(v.begin(), v.end());
  d.max = *std::max_element(v.begin(), v.end());
  return d;
}

// Densest bin by linear scan over the quantizer's edges.
std::size_t scan_densest(const gp::Quantizer& q, const std::vector<double>& values) {
  const auto& e = q.edges();
  std::vector<std::size_t> counts(q.size(), 0);
  for (double v : values) {
    std::size_t b = q.size() - 1;
    for (std::size_t i = 0; i + 1 < e.size(); ++i) {
      if (v >= e[i] && v < e[i + 1]) {  // NOLINT
        b = i;
        break;
      }
    }
    if (v < e.front()) b = 0;
    ++counts[b];
  }
  return *std::max_element(counts.begin(), counts.end());
}

gp::GatherplotSpec spec_xy(std::optional<std::string> x, std::optional<std::string> y,
                           std::optional<std::string> color = std::nullopt,
                           gp::LayoutMode mode = gp::LayoutMode::Auto, gp::Rect region = {0, 0, 600, 600}) {
  gp::GatherplotSpec s;
  s.x_dim = std::move(x);
  s.y_dim = std::move(y);
  s.color_dim = std::move(color);
  s.mode = mode;
  s.region = region;
  return s;
}

const gp::GroupLayout* find_group(const gp::PlotLayout& l, const std::string& xk, const std::string& yk) {
  for (const auto& g : l.groups)
    if (g.x_key == xk && g.y_key == yk) return &g;
  return nullptr;
}

}  // namespace

// ---------------------------------------------------------------- segments

TEST(Segments, TitanicClassOnFourHundredPixels) {
  auto data = load_fixture("titanic.csv");
  const auto d = data.index_of("class");
  std::vector<std::vector<gp::PointId>> ids(4);
  for (gp::PointId i = 0; i < data.size(); ++i) ids[data.code(d, i)].push_back(i);
  auto t = gp::build_segments(data.dimension(d).categories, ids, 400, {});
  ASSERT_EQ(t.size(), 4u);
  for (std::size_t i = 0; i < 4; ++i) {
    EXPECT_EQ(t.segments[i].width(), 97) << i;
    EXPECT_EQ(t.segments[i].lo, 101.0 * i);
  }
  EXPECT_EQ(t.member_count(), 2201u);
}

TEST(Segments, OneCategorySpansTheExtent) {
  auto t = gp::build_segments(keys(1), groups_of_sizes({5}), 321, {});
  ASSERT_EQ(t.size(), 1u);
  EXPECT_EQ(t.segments[0].lo, 0);
  EXPECT_EQ(t.segments[0].hi, 321);
}

TEST(Segments, AdaptiveWidthsFollowCounts) {
  gp::SegmentOptions opt;
  opt.policy = gp::SizingPolicy::ConstantMarkDensitySegments;
  opt.gutter = 0;
  auto t = gp::build_segments(keys(3), groups_of_sizes({10, 30, 60}), 500, opt);
  EXPECT_EQ(t.segments[0].width(), 50);
  EXPECT_EQ(t.segments[1].width(), 150);
  EXPECT_EQ(t.segments[2].width(), 300);
  double sum = 0;
  for (const auto& s : t.segments) sum += s.width();
  EXPECT_EQ(sum, 500);
}

TEST(Segments, AdaptiveProportionalityAndFloorOnRandomCounts) {
  Rng rng(42);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = rng.between(1, 12);
    std::vector<std::size_t> counts(n);
    for (auto& c : counts) c = rng.below(5) == 0 ? rng.below(3) : rng.between(1, 400);
    const double extent = rng.between(200, 2000);
    gp::SegmentOptions opt;
    opt.policy = gp::SizingPolicy::ConstantMarkDensitySegments;
    opt.gutter = static_cast<double>(rng.below(6));
    auto t = gp::build_segments(keys(n), groups_of_sizes(counts), extent, opt);
    const double floor_w = gp::kMinSegmentWidth;
    double used = 0;
    for (std::size_t i = 0; i < n; ++i) {
      const auto& s = t.segments[i];
      ASSERT_GE(s.width(), floor_w - 1e-9);
      ASSERT_EQ(s.width(), std::floor(s.width()));
      if (i > 0) {
        ASSERT_GE(s.lo, t.segments[i - 1].hi);
      }
      used += s.width();
    }
    ASSERT_LE(used + opt.gutter * static_cast<double>(n - 1), extent);
    // Pairs above the floor keep their count ratio within rounding.
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        const auto &a = t.segments[i], &b = t.segments[j];
        if (a.width() <= floor_w + 1 || b.width() <= floor_w + 1 || counts[j] == 0) continue;
        const double expect = b.width() * static_cast<double>(counts[i]) / static_cast<double>(counts[j]);
        ASSERT_NEAR(a.width(), expect, 1.0 + static_cast<double>(counts[i]) / static_cast<double>(counts[j]));
      }
    }
  }
}

TEST(Segments, CapacityErrorNamesTheAxis) {
  gp::SegmentOptions opt;
  opt.axis_name = "x axis";
  try {
    gp::build_segments(keys(10), groups_of_sizes(std::vector<std::size_t>(10, 1)), 20, opt);
    FAIL();
  } catch (const gp::error& e) {
    EXPECT_EQ(e.code(), gp::errc::capacity);
    EXPECT_NE(std::string(e.what()).find("x axis"), std::string::npos);
  }
}

TEST(Segments, PartitionAndDisjointnessOnRandomInput) {
  Rng rng(8);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = rng.between(1, 20);
    std::vector<std::size_t> counts(n);
    for (auto& c : counts) c = rng.below(50);
    gp::SegmentOptions opt;
    opt.policy = static_cast<gp::SizingPolicy>(rng.below(3));
    auto t = gp::build_segments(keys(n), groups_of_sizes(counts), 1000, opt);
    std::vector<gp::PointId> all;
    for (std::size_t i = 0; i < n; ++i) {
      const auto& s = t.segments[i];
      ASSERT_LT(s.lo, s.hi);
      if (i > 0) {
        ASSERT_LE(t.segments[i - 1].hi, s.lo);
      }
      ASSERT_EQ(s.members.size(), counts[i]);
      all.insert(all.end(), s.members.begin(), s.members.end());
    }
    std::sort(all.begin(), all.end());
    ASSERT_TRUE(is_identity(all, all.size()));
    ASSERT_LE(t.segments.back().hi, 1000);
  }
}

TEST(Segments, EqualPolicyKeepsEmptyCategories) {
  auto t = gp::build_segments(keys(3), groups_of_sizes({4, 0, 2}), 300, {});
  ASSERT_EQ(t.size(), 3u);
  EXPECT_TRUE(t.segments[1].members.empty());
  // 292 px over three: the leftover pixel goes to the first segment.
  EXPECT_EQ(t.segments[0].width(), 98);
  EXPECT_EQ(t.segments[1].width(), 97);
}

TEST(Segments, ConstantMarkSizeFitsDensestSegment) {
  auto t = gp::build_segments(keys(2), groups_of_sizes({3, 12}), 200, {});
  // (200 - 4) / 2 = 98 px per segment; 98 / 12 -> 8 px marks.
  EXPECT_EQ(t.mark_size, 8);
  auto coords = t.coordinates(15);
  for (gp::PointId i = 0; i < 15; ++i) {
    const auto& s = t.segments[i < 3 ? 0 : 1];
    EXPECT_GE(coords[i] - t.mark_size / 2, s.lo);
    EXPECT_LE(coords[i] + t.mark_size / 2, s.hi);
  }
  std::vector<double> c(coords.begin(), coords.end());
  EXPECT_EQ(brute_pairs_1d(c, t.mark_size), 0u);
}

TEST(Segments, ProportionalMarkScalesWithCount) {
  gp::SegmentOptions opt;
  opt.policy = gp::SizingPolicy::ProportionalMark;
  auto t = gp::build_segments(keys(3), groups_of_sizes({5, 20, 10}), 296, opt);
  for (const auto& s : t.segments) EXPECT_EQ(s.width(), 96);
  EXPECT_DOUBLE_EQ(t.segments[0].mark_scale, 0.25);
  EXPECT_DOUBLE_EQ(t.segments[1].mark_scale, 1.0);
  EXPECT_DOUBLE_EQ(t.segments[2].mark_scale, 0.5);
  // Every segment's marks fill its width.
  for (std::size_t i = 0; i < 3; ++i) {
    EXPECT_DOUBLE_EQ(t.segment_mark_size(i) * static_cast<double>(t.segments[i].members.size()),
                     t.mark_size * static_cast<double>(t.segments[1].members.size()));
  }
}

TEST(Segments, MinimizedSegmentsTakeTheFoldWidth) {
  gp::SegmentOptions opt;
  opt.minimized = {false, true, false};
  auto t = gp::build_segments(keys(3), groups_of_sizes({5, 5, 5}), 400, opt);
  EXPECT_EQ(t.segments[1].width(), gp::kFoldWidth);
  EXPECT_EQ(t.segments[0].width(), (400 - 12 - 8) / 2);
  EXPECT_TRUE(t.segments[1].minimized);
}

TEST(Segments, Deterministic) {
  auto a = gp::build_segments(keys(4), groups_of_sizes({3, 9, 1, 4}), 333, {});
  auto b = gp::build_segments(keys(4), groups_of_sizes({3, 9, 1, 4}), 333, {});
  for (std::size_t i = 0; i < 4; ++i) {
    EXPECT_EQ(a.segments[i].lo, b.segments[i].lo);
    EXPECT_EQ(a.segments[i].hi, b.segments[i].hi);
    EXPECT_EQ(a.segments[i].members, b.segments[i].members);
  }
}

// ---------------------------------------------------------------- binning

TEST(Binning, WilkinsonSeed) {
  EXPECT_DOUBLE_EQ(gp::wilkinson_dot_size(16, 1.0), 0.0625);
  EXPECT_DOUBLE_EQ(gp::wilkinson_dot_size(16, 400), 25);
  auto ladder = gp::dot_size_ladder(16, 400);
  EXPECT_EQ(ladder.front(), 25);
  EXPECT_EQ(ladder.back(), 1);
  EXPECT_EQ(gp::dot_size_ladder(1, 10000).front(), gp::kMaxMarkSize);
  EXPECT_EQ(gp::dot_size_ladder(100000, 100).front(), 1);
}

TEST(Binning, IdenticalValuesPickLargestFittingLadderSize) {
  std::vector<double> v(100, 7.0);
  auto dim = continuous("v", v);
  auto r = gp::bin_continuous(dim, v, 200, 200);
  // Oracle: walk the ladder, re-pack the 100-stack at each size.
  int expect = 0;
  for (int d = static_cast<int>(std::floor(0.25 / std::sqrt(100.0) * 200)); d >= 1; --d) {
    if (100 <= static_cast<int>(std::floor(200.0 / d))) {
      expect = d;
      break;
    }
  }
  EXPECT_EQ(expect, 2);
  EXPECT_EQ(r.dot_size, expect);
  EXPECT_EQ(r.densest_bin_count, 100u);
  EXPECT_FALSE(r.legibility_warning);

  auto halved = gp::bin_continuous(dim, v, 200, 100);
  EXPECT_LE(halved.dot_size, r.dot_size);
}

TEST(Binning, NoFitDegradesToOnePixelWithWarning) {
  std::vector<double> v(500, 1.0);
  auto r = gp::bin_continuous(continuous("v", v), v, 100, 50);
  EXPECT_EQ(r.dot_size, 1);
  EXPECT_TRUE(r.legibility_warning);
}

TEST(Binning, FeasibleMaximalAndMonotoneOnRandomData) {
  Rng rng(99);
  for (int trial = 0; trial < 60; ++trial) {
    const std::size_t n = rng.between(1, 3000);
    std::vector<double> v(n);
    const bool ties = rng.coin();
    for (auto& x : v) x = ties ? std::floor(rng.uniform(0, 25)) : rng.uniform(0, 1) * rng.uniform(0, 1) * 100;
    auto dim = continuous("v", v);
    const double main = rng.between(50, 900), cross = rng.between(20, 600);
    auto r = gp::bin_continuous(dim, v, main, cross);
    const auto densest = scan_densest(r.quantizer, v);
    ASSERT_EQ(densest, r.densest_bin_count);
    ASSERT_LE(r.pixel_extent(), main);
    if (!r.legibility_warning) {
      ASSERT_LE(densest * static_cast<std::size_t>(r.dot_size), static_cast<std::size_t>(cross));
      // The next larger ladder size does not fit.
      const auto ladder = gp::dot_size_ladder(n, main);
      if (r.dot_size < ladder.front()) {
        const int bigger = r.dot_size + 1;
        auto q = gp::pixel_aligned_quantizer(dim, bigger, main);
        ASSERT_GT(scan_densest(q, v) * static_cast<std::size_t>(bigger), static_cast<std::size_t>(cross));
      }
    }
    auto halved = gp::bin_continuous(dim, v, main, cross / 2);
    ASSERT_LE(halved.dot_size, r.dot_size);
  }
}

TEST(Binning, BinWidthEqualsDotSize) {
  std::vector<double> v;
  for (int i = 0; i < 64; ++i) v.push_back(i * 1.5);
  auto r = gp::bin_continuous(continuous("v", v), v, 300, 300);
  EXPECT_EQ(r.quantizer.size(), static_cast<std::size_t>(300 / r.dot_size));
}

// ---------------------------------------------------------------- ordering

TEST(Ordering, StableByCategory) {
  auto data = gp::ingest_csv("color\nB\nA\nB\nA\n", [] {
    gp::IngestOptions o;
    o.category_order["color"] = {"A", "B"};
    return o;
  }());
  auto out = gp::order_within_segment({0, 1, 2, 3}, data, 0);
  EXPECT_EQ(out, (std::vector<gp::PointId>{1, 3, 0, 2}));
}

TEST(Ordering, NoOrderDimensionKeepsInputOrder) {
  auto data = gp::ingest_csv("c\na\nb\nc\n");
  EXPECT_EQ(gp::order_within_segment({2, 0, 1}, data, std::nullopt), (std::vector<gp::PointId>{2, 0, 1}));
}

TEST(Ordering, TitanicFirstClassBySurvival) {
  auto data = load_fixture("titanic.csv");
  const auto cls = data.index_of("class"), surv = data.index_of("survived");
  std::vector<gp::PointId> first;
  for (gp::PointId i = 0; i < data.size(); ++i)
    if (data.text(cls, i) == "1st") first.push_back(i);
  // Reference: ids grouped by category code order, id order inside.
  std::vector<gp::PointId> expect;
  for (const auto& v : data.dimension(surv).categories)
    for (auto id : first)
      if (data.text(surv, id) == v) expect.push_back(id);
  EXPECT_EQ(gp::order_within_segment(first, data, surv), expect);
}

// ---------------------------------------------------------------- mode

TEST(Mode, AspectThreshold) {
  EXPECT_EQ(gp::resolve_mode(gp::LayoutMode::Auto, 400.0 / 100), gp::LayoutMode::Streamgraph);
  EXPECT_EQ(gp::resolve_mode(gp::LayoutMode::Auto, 1.0), gp::LayoutMode::Absolute);
  EXPECT_EQ(gp::resolve_mode(gp::LayoutMode::Auto, 300.0 / 100), gp::LayoutMode::Absolute);
  EXPECT_EQ(gp::resolve_mode(gp::LayoutMode::Auto, 100.0 / 300), gp::LayoutMode::Absolute);
  EXPECT_EQ(gp::resolve_mode(gp::LayoutMode::Auto, 100.0 / 301), gp::LayoutMode::Streamgraph);
  EXPECT_EQ(gp::resolve_mode(gp::LayoutMode::Normalized, 10), gp::LayoutMode::Normalized);
  EXPECT_EQ(gp::resolve_mode(gp::LayoutMode::Absolute, 10), gp::LayoutMode::Absolute);
  EXPECT_EQ(error_code([] { gp::resolve_mode(gp::LayoutMode::Auto, 0); }), gp::errc::parameter);
}

TEST(Mode, AutoNeverPicksNormalized) {
  for (double a = 0.05; a < 20; a *= 1.1) EXPECT_NE(gp::resolve_mode(gp::LayoutMode::Auto, a), gp::LayoutMode::Normalized);
}

// ---------------------------------------------------------------- absolute

TEST(Absolute, TenAndFortyInSquareBoxes) {
  std::vector<gp::CellInput> cells{cell({0, 0, 100, 100}, 10), cell({110, 0, 100, 100}, 40, 10)};
  // Packing oracle.
  auto packs = [&](int m) {
    for (const auto& c : cells) {
      const int per = static_cast<int>(100 / m);
      if (per * per < static_cast<int>(c.members.size())) return false;
    }
    return true;
  };
  EXPECT_FALSE(packs(15));
  EXPECT_TRUE(packs(14));
  auto r = gp::layout_absolute(cells);
  EXPECT_EQ(r.mark_size, 14);
  for (const auto& g : r.groups) {
    for (const auto& m : g.marks) {
      EXPECT_EQ(m.w, 14);
      EXPECT_EQ(m.h, 14);
      EXPECT_EQ(m.corner_radius, 7);
      EXPECT_TRUE(g.box.contains(m.rect()));
    }
  }
  EXPECT_EQ(interior_overlaps(marks_of(r.groups)), 0u);
}

TEST(Absolute, SinglePointAtCapCentered) {
  std::vector<gp::CellInput> cells{cell({0, 0, 100, 100}, 1)};
  auto r = gp::layout_absolute(cells);
  ASSERT_EQ(r.groups[0].marks.size(), 1u);
  const auto& m = r.groups[0].marks[0];
  EXPECT_EQ(m.w, gp::kMaxMarkSize);
  EXPECT_EQ(m.x + m.w / 2, 50);
  EXPECT_EQ(m.y + m.h / 2, 50);
}

TEST(Absolute, EmptyCellKeepsItsBox) {
  std::vector<gp::CellInput> cells{cell({5, 6, 70, 80}, 0), cell({100, 0, 50, 50}, 3)};
  auto r = gp::layout_absolute(cells);
  EXPECT_TRUE(r.groups[0].marks.empty());
  EXPECT_EQ(r.groups[0].box, (gp::Rect{5, 6, 70, 80}));
}

TEST(Absolute, FillsColumnsBottomUp) {
  std::vector<gp::CellInput> cells{cell({0, 0, 100, 100}, 5)};
  auto r = gp::layout_absolute(cells);
  const auto& marks = r.groups[0].marks;
  // Second mark sits on top of the first, in the same column.
  EXPECT_EQ(marks[1].x, marks[0].x);
  EXPECT_EQ(marks[1].y + marks[1].h, marks[0].y);
}

TEST(Absolute, MaximalOnRandomConfigurations) {
  Rng rng(5);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<gp::CellInput> cells;
    const std::size_t n = rng.between(1, 8);
    gp::PointId next = 0;
    for (std::size_t i = 0; i < n; ++i) {
      const auto count = rng.below(300);
      cells.push_back(cell({static_cast<double>(i) * 200, 0, static_cast<double>(rng.between(20, 190)),
                            static_cast<double>(rng.between(20, 400))},
                           count, next));
      next += static_cast<gp::PointId>(count);
    }
    auto r = gp::layout_absolute(cells);
    const auto ladder = gp::absolute_size_ladder();
    const auto at = std::find(ladder.begin(), ladder.end(), r.mark_size);
    ASSERT_NE(at, ladder.end());
    auto fits = [&](double m) {
      for (const auto& c : cells)
        if (std::floor(c.box.w / m) * std::floor(c.box.h / m) < static_cast<double>(c.members.size())) return false;
      return true;
    };
    ASSERT_TRUE(fits(r.mark_size));
    if (at != ladder.begin()) {
      ASSERT_FALSE(fits(*(at - 1)));
    }
    ASSERT_EQ(interior_overlaps(marks_of(r.groups)), 0u);
    for (std::size_t i = 0; i < n; ++i) {
      ASSERT_EQ(r.groups[i].marks.size(), cells[i].members.size());
      for (const auto& m : r.groups[i].marks) ASSERT_TRUE(cells[i].box.contains(m.rect()));
    }
  }
}

TEST(Absolute, SubPixelFallbackFlagsLegibility) {
  std::vector<gp::CellInput> cells{cell({0, 0, 10, 10}, 400)};
  auto r = gp::layout_absolute(cells);
  EXPECT_LT(r.mark_size, 1);
  EXPECT_TRUE(r.legibility_warning);
  EXPECT_EQ(interior_overlaps(marks_of(r.groups)), 0u);
}

// ---------------------------------------------------------------- normalized

TEST(Normalized, MarkAreaInverseToCount) {
  std::vector<gp::CellInput> cells{cell({0, 0, 100, 100}, 10), cell({110, 0, 100, 100}, 40, 10)};
  auto r = gp::layout_normalized(cells);
  auto area = [](const gp::MarkGeometry& m) { return m.w * m.h; };
  double a10 = 0, a40 = 0;
  for (const auto& m : r.groups[0].marks) a10 += area(m) / 10;
  for (const auto& m : r.groups[1].marks) a40 += area(m) / 40;
  EXPECT_NEAR(a10 / a40, 4.0, 1e-9);
  // Exact tiling, each mark within a 1/64 px snap of box_area / count.
  for (std::size_t g = 0; g < 2; ++g) {
    double total = 0;
    const double each = 10000.0 / static_cast<double>(cells[g].members.size());
    for (const auto& m : r.groups[g].marks) {
      total += area(m);
      EXPECT_NEAR(area(m), each, 100 * gp::kPixelQuantum * 2);
    }
    EXPECT_DOUBLE_EQ(total, 10000);
  }
  EXPECT_EQ(interior_overlaps(marks_of(r.groups)), 0u);
}

TEST(Normalized, SingleMarkFillsBox) {
  std::vector<gp::CellInput> cells{cell({3, 4, 50, 70}, 1)};
  auto r = gp::layout_normalized(cells);
  EXPECT_EQ(r.groups[0].marks[0].rect(), (gp::Rect{3, 4, 50, 70}));
  EXPECT_EQ(r.groups[0].marks[0].corner_radius, 3);
}

TEST(Normalized, TilesRandomBoxesExactly) {
  Rng rng(12);
  for (int trial = 0; trial < 100; ++trial) {
    const gp::Rect box{0, 0, static_cast<double>(rng.between(10, 400)), static_cast<double>(rng.between(10, 400))};
    const std::size_t count = rng.between(1, 800);
    std::vector<gp::CellInput> cells{cell(box, count)};
    auto r = gp::layout_normalized(cells);
    double total = 0;
    for (const auto& m : r.groups[0].marks) {
      ASSERT_TRUE(box.contains(m.rect()));
      total += m.w * m.h;
    }
    ASSERT_NEAR(total, box.area(), 1e-6);
    ASSERT_EQ(interior_overlaps(r.groups[0].marks), 0u);
    // Column-major: cols = ceil(sqrt(count * w / h)).
    const auto cols = std::min<std::size_t>(
        count, static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(count) * box.w / box.h))));
    ASSERT_EQ(r.groups[0].cols, static_cast<int>(cols));
  }
}

// ---------------------------------------------------------------- streamgraph

TEST(Streamgraph, RibbonLengthsAreCeilOfCountOverK) {
  std::vector<gp::CellInput> cells{cell({0, 0, 400, 40}, 8), cell({0, 50, 400, 40}, 16, 8)};
  auto r = gp::layout_streamgraph(cells, 4);
  EXPECT_EQ(r.groups[0].cols, 2);
  EXPECT_EQ(r.groups[1].cols, 4);
  EXPECT_EQ(r.groups[0].rows, 4);
  for (const auto& g : r.groups) {
    for (const auto& m : g.marks) {
      EXPECT_EQ(m.h, 10);
      EXPECT_EQ(m.w, 10);
      EXPECT_TRUE(g.box.contains(m.rect()));
    }
  }
  EXPECT_EQ(interior_overlaps(marks_of(r.groups)), 0u);
}

TEST(Streamgraph, EmptyAndSingleFile) {
  std::vector<gp::CellInput> cells{cell({0, 0, 100, 400}, 0), cell({200, 0, 100, 400}, 3)};
  auto r = gp::layout_streamgraph(cells, 1);
  EXPECT_TRUE(r.groups[0].marks.empty());
  ASSERT_EQ(r.groups[1].marks.size(), 3u);
  EXPECT_EQ(r.groups[1].cols, 1);
  EXPECT_EQ(r.groups[1].rows, 3);
  for (const auto& m : r.groups[1].marks) EXPECT_EQ(m.w, 100);
}

TEST(Streamgraph, OverrunCompressesLongEdgeForAll) {
  std::vector<gp::CellInput> cells{cell({0, 0, 100, 20}, 50), cell({0, 30, 100, 20}, 10, 50)};
  auto r = gp::layout_streamgraph(cells, 2);
  EXPECT_EQ(interior_overlaps(marks_of(r.groups)), 0u);
  for (const auto& g : r.groups)
    for (const auto& m : g.marks) EXPECT_TRUE(g.box.contains(m.rect()));
  EXPECT_EQ(r.groups[0].marks[0].w, r.groups[1].marks[0].w);
}

TEST(Streamgraph, DefaultKIsSmallestThatFits) {
  std::vector<gp::CellInput> cells{cell({0, 0, 400, 40}, 300)};
  const int k = gp::default_streamgraph_k(cells);
  auto fits = [&](int kk) { return std::ceil(300.0 / kk) * (40.0 / kk) <= 400; };
  EXPECT_TRUE(fits(k));
  if (k > 1) {
    EXPECT_FALSE(fits(k - 1));
  }
  EXPECT_THROW(gp::layout_streamgraph(cells, 0), gp::error);
}

// ---------------------------------------------------------------- gatherplot

class Titanic : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    text_ = new std::string(read_file(fixture_path("titanic.csv")));
    data_ = new gp::Dataset(gp::ingest_csv(*text_));
  }
  static void TearDownTestSuite() {
    delete data_;
    delete text_;
  }
  static std::string* text_;
  static gp::Dataset* data_;
};
std::string* Titanic::text_ = nullptr;
gp::Dataset* Titanic::data_ = nullptr;

TEST_F(Titanic, UndefinedYGivesOneRowOfFourGroups) {
  auto l = gp::layout_gatherplot(*data_, spec_xy("class", std::nullopt, "survived"));
  ASSERT_EQ(l.groups.size(), 4u);
  EXPECT_EQ(l.mark_count(), 2201u);
  for (const auto& g : l.groups) {
    EXPECT_EQ(g.y_key, gp::kUndefinedKey);
    EXPECT_EQ(g.box.y, l.groups[0].box.y);
    EXPECT_EQ(g.box.h, l.groups[0].box.h);
  }
  EXPECT_EQ(l.y_axis.kind, "undefined");
}

TEST_F(Titanic, BothUndefinedIsOneGroup) {
  auto l = gp::layout_gatherplot(*data_, spec_xy(std::nullopt, std::nullopt));
  ASSERT_EQ(l.groups.size(), 1u);
  EXPECT_EQ(l.groups[0].marks.size(), 2201u);
  EXPECT_TRUE(is_identity(mark_ids(l), 2201));
}

TEST_F(Titanic, CellCountsMatchRawTableInEveryMode) {
  auto raw = raw_counts(*text_, {"class", "sex"});
  for (auto mode : {gp::LayoutMode::Absolute, gp::LayoutMode::Normalized, gp::LayoutMode::Streamgraph,
                    gp::LayoutMode::Auto}) {
    auto l = gp::layout_gatherplot(*data_, spec_xy("class", "sex", "survived", mode));
    EXPECT_EQ(l.groups.size(), 8u);
    EXPECT_TRUE(is_identity(mark_ids(l), 2201));
    for (const auto& [key, count] : raw) {
      auto g = find_group(l, key[0], key[1]);
      ASSERT_NE(g, nullptr);
      EXPECT_EQ(g->marks.size(), count) << key[0] << "/" << key[1];
    }
    EXPECT_EQ(interior_overlaps(all_marks(l)), 0u);
    EXPECT_TRUE(contained(l));
  }
}

TEST_F(Titanic, NormalizedSurvivorFractionMatchesTable) {
  auto raw = raw_counts(*text_, {"class", "sex", "survived"});
  auto l = gp::layout_gatherplot(*data_, spec_xy("class", "sex", "survived", gp::LayoutMode::Normalized));
  for (const auto& g : l.groups) {
    std::size_t yes = 0;
    double yes_area = 0, area = 0;
    for (const auto& m : g.marks) {
      area += m.w * m.h;
      if (m.color_key == "Yes") {
        ++yes;
        yes_area += m.w * m.h;
      }
    }
    const std::size_t expect_yes = raw[{g.x_key, g.y_key, "Yes"}];
    const std::size_t expect_all = expect_yes + raw[{g.x_key, g.y_key, "No"}];
    EXPECT_EQ(yes, expect_yes);
    EXPECT_EQ(g.marks.size(), expect_all);
    if (area > 0) {
      EXPECT_NEAR(yes_area / area, static_cast<double>(expect_yes) / static_cast<double>(expect_all), 0.01);
    }
  }
}

TEST_F(Titanic, ColorRunsAreContiguous) {
  auto l = gp::layout_gatherplot(*data_, spec_xy("class", "sex", "survived", gp::LayoutMode::Normalized));
  for (const auto& g : l.groups) {
    int changes = 0;
    for (std::size_t i = 1; i < g.marks.size(); ++i) changes += g.marks[i].color_index != g.marks[i - 1].color_index;
    EXPECT_LE(changes, 1);
  }
  ASSERT_EQ(l.legend.size(), 2u);
  EXPECT_EQ(l.legend[0].key, data_->dimension("survived").categories[0]);
  EXPECT_EQ(l.legend[1].color_index, 1);
}

TEST_F(Titanic, AbsoluteUniformAndMaximal) {
  auto l = gp::layout_gatherplot(*data_, spec_xy("class", "sex", "survived", gp::LayoutMode::Absolute));
  const double m = l.mark_size;
  std::vector<gp::CellInput> cells;
  for (const auto& g : l.groups) {
    cells.push_back(cell(g.box, g.marks.size()));
    for (const auto& mk : g.marks) {
      EXPECT_EQ(mk.w, m);
      EXPECT_EQ(mk.h, m);
    }
  }
  EXPECT_TRUE(gp::absolute_fits(cells, m));
  EXPECT_FALSE(gp::absolute_fits(cells, m + 1));
}

TEST_F(Titanic, NormalizedBoxesShareTheLattice) {
  auto l = gp::layout_gatherplot(*data_, spec_xy("class", "sex", std::nullopt, gp::LayoutMode::Normalized));
  for (const auto& a : l.groups) {
    for (const auto& b : l.groups) {
      if (a.x_key == b.x_key) {
        EXPECT_EQ(a.box.w, b.box.w);
      }
      if (a.y_key == b.y_key) {
        EXPECT_EQ(a.box.h, b.box.h);
      }
    }
  }
}

TEST_F(Titanic, ElongatedRegionPicksStreamgraph) {
  auto l = gp::layout_gatherplot(*data_, spec_xy("class", "sex", std::nullopt, gp::LayoutMode::Auto, {0, 0, 900, 150}));
  EXPECT_EQ(l.mode_used, gp::LayoutMode::Streamgraph);
  EXPECT_EQ(l.mark_count(), 2201u);
  EXPECT_EQ(interior_overlaps(all_marks(l)), 0u);
  // Every full line spans exactly k marks across the short edge.
  const auto k = static_cast<std::size_t>(l.streamgraph_k);
  for (const auto& g : l.groups) {
    if (g.marks.size() >= k) {
      EXPECT_EQ(static_cast<std::size_t>(g.rows), k);
    }
  }
  auto square = gp::layout_gatherplot(*data_, spec_xy("class", "sex"));
  EXPECT_EQ(square.mode_used, gp::LayoutMode::Absolute);
}

TEST_F(Titanic, StreamgraphUserK) {
  auto s = spec_xy("class", "sex", std::nullopt, gp::LayoutMode::Streamgraph);
  s.streamgraph_k = 5;
  auto l = gp::layout_gatherplot(*data_, s);
  EXPECT_EQ(l.streamgraph_k, 5);
  EXPECT_EQ(interior_overlaps(all_marks(l)), 0u);
  EXPECT_TRUE(contained(l));
}

TEST_F(Titanic, MinimizeCrew) {
  auto s = spec_xy("class", "sex", "survived");
  auto folded = gp::fold_axis(*data_, s, gp::Axis::X, "Crew", gp::FoldState::Minimized);
  const auto& segs = folded.layout.x_axis.transform.segments;
  ASSERT_EQ(segs.size(), 4u);
  EXPECT_EQ(segs[3].width(), gp::kFoldWidth);
  EXPECT_TRUE(segs[3].minimized);
  for (int i = 0; i < 3; ++i) EXPECT_EQ(segs[i].width(), (600 - 12 - 3 * 4) / 3);
  EXPECT_TRUE(is_identity(mark_ids(folded.layout), 2201));
  EXPECT_EQ(interior_overlaps(all_marks(folded.layout, false)), 0u);
  EXPECT_TRUE(contained(folded.layout));
  for (const auto& g : folded.layout.groups) EXPECT_EQ(g.folded, g.x_key == "Crew");
}

TEST_F(Titanic, MaximizeAdult) {
  auto s = spec_xy("class", "age");
  auto folded = gp::fold_axis(*data_, s, gp::Axis::Y, "Adult", gp::FoldState::Maximized);
  const auto& segs = folded.layout.y_axis.transform.segments;
  ASSERT_EQ(segs.size(), 2u);
  EXPECT_TRUE(segs[0].minimized);
  EXPECT_EQ(segs[0].key, "Child");
  EXPECT_EQ(segs[0].width(), gp::kFoldWidth);
  EXPECT_EQ(segs[1].width(), 600 - 12 - 4);
  EXPECT_EQ(folded.layout.mark_count(), 2201u);
}

TEST_F(Titanic, FoldRestoreRoundTrip) {
  auto s = spec_xy("class", "sex", "survived");
  const auto before = gp::to_json(gp::layout_gatherplot(*data_, s)).dump();
  auto a = gp::fold_axis(*data_, s, gp::Axis::X, "Crew", gp::FoldState::Minimized);
  EXPECT_NE(gp::to_json(a.layout).dump(), before);
  auto b = gp::fold_axis(*data_, a.spec, gp::Axis::X, "Crew", gp::FoldState::Normal);
  EXPECT_EQ(b.spec, s);
  EXPECT_EQ(gp::to_json(b.layout).dump(), before);
  auto c = gp::fold_axis(*data_, s, gp::Axis::X, "2nd", gp::FoldState::Maximized);
  auto d = gp::fold_axis(*data_, c.spec, gp::Axis::X, "2nd", gp::FoldState::Normal);
  EXPECT_EQ(gp::to_json(d.layout).dump(), before);
}

TEST_F(Titanic, FoldConservesMembership) {
  auto s = spec_xy("class", "sex", "survived");
  auto base = gp::layout_gatherplot(*data_, s);
  auto membership = [](const gp::PlotLayout& l) {
    std::map<std::pair<std::string, std::string>, std::vector<gp::PointId>> m;
    for (const auto& g : l.groups) {
      auto& ids = m[{g.x_key, g.y_key}];
      for (const auto& mk : g.marks) ids.push_back(mk.id);
      std::sort(ids.begin(), ids.end());
    }
    return m;
  };
  for (const char* v : {"1st", "2nd", "3rd", "Crew"}) {
    for (auto st : {gp::FoldState::Minimized, gp::FoldState::Maximized}) {
      auto f = gp::fold_axis(*data_, s, gp::Axis::X, v, st);
      EXPECT_EQ(membership(f.layout), membership(base)) << v;
    }
  }
}

TEST_F(Titanic, FoldErrors) {
  auto s = spec_xy("class", "sex");
  EXPECT_EQ(error_code([&] { gp::fold_axis(*data_, s, gp::Axis::X, "Steerage", gp::FoldState::Minimized); }),
            gp::errc::parameter);
  EXPECT_EQ(error_code([&] { gp::fold_axis(*data_, spec_xy(std::nullopt, "sex"), gp::Axis::X, "x", gp::FoldState::Minimized); }),
            gp::errc::parameter);
  auto two = s;
  two.folds[{gp::Axis::X, "1st"}] = gp::FoldState::Maximized;
  two.folds[{gp::Axis::X, "2nd"}] = gp::FoldState::Maximized;
  EXPECT_EQ(error_code([&] { gp::layout_gatherplot(*data_, two); }), gp::errc::parameter);
}

TEST_F(Titanic, UnknownDimension) {
  EXPECT_EQ(error_code([&] { gp::layout_gatherplot(*data_, spec_xy("foo", "sex")); }), gp::errc::unknown_dimension);
}

TEST_F(Titanic, TicksMatchSegments) {
  auto l = gp::layout_gatherplot(*data_, spec_xy("class", "sex"));
  std::size_t nx = 0, ny = 0;
  for (const auto& t : l.ticks) (t.axis == gp::Axis::X ? nx : ny)++;
  EXPECT_EQ(nx, 4u);
  EXPECT_EQ(ny, 2u);
  for (std::size_t i = 1; i < 4; ++i) EXPECT_LT(l.ticks[i - 1].hi, l.ticks[i].lo);
}

TEST(Gatherplot, FoldOnContinuousAxisIsRejected) {
  auto cars = load_fixture("cars.csv");
  auto s = spec_xy("MPG", "Origin");
  EXPECT_EQ(error_code([&] { gp::fold_axis(cars, s, gp::Axis::X, "9", gp::FoldState::Minimized); }),
            gp::errc::parameter);
}

TEST(Gatherplot, ContinuousAgainstCategoricalIsBinned) {
  auto cars = load_fixture("cars.csv");
  auto l = gp::layout_gatherplot(cars, spec_xy("MPG", "Origin", "Cylinders"));
  EXPECT_EQ(l.x_axis.kind, "binned");
  EXPECT_EQ(l.y_axis.kind, "categorical");
  EXPECT_TRUE(is_identity(mark_ids(l), cars.size()));
  EXPECT_EQ(interior_overlaps(all_marks(l)), 0u);
  EXPECT_TRUE(contained(l));
  const auto& segs = l.x_axis.transform.segments;
  for (const auto& s : segs) EXPECT_EQ(s.width(), segs[0].width());
}

TEST(Gatherplot, TwoContinuousAxesAreQuantized) {
  auto cars = load_fixture("cars.csv");
  auto l = gp::layout_gatherplot(cars, spec_xy("MPG", "Horsepower"));
  EXPECT_EQ(l.x_axis.kind, "quantized");
  EXPECT_EQ(l.x_axis.transform.size(), gp::kDefaultContinuousBins);
  EXPECT_EQ(l.y_axis.transform.size(), gp::kDefaultContinuousBins);
  EXPECT_TRUE(is_identity(mark_ids(l), cars.size()));
  EXPECT_EQ(interior_overlaps(all_marks(l)), 0u);
}

TEST(Gatherplot, SameContinuousVariableRotates) {
  Rng rng(5000);
  std::vector<double> v(5000);
  for (auto& x : v) x = rng.uniform();
  gp::Dataset data({continuous("r", v)}, {v});
  auto l = gp::layout_gatherplot(data, spec_xy("r", "r"));
  EXPECT_TRUE(l.rotated);
  EXPECT_TRUE(is_identity(mark_ids(l), 5000));
  EXPECT_EQ(interior_overlaps(all_marks(l)), 0u);
  // Group centers climb the diagonal.
  for (std::size_t i = 1; i < l.groups.size(); ++i) {
    const auto& a = l.x_axis.transform.segments[i - 1];
    const auto& b = l.x_axis.transform.segments[i];
    EXPECT_LT(a.lo, b.lo);
    EXPECT_GT(l.y_axis.transform.segments[i - 1].lo, l.y_axis.transform.segments[i].lo);
  }
  for (const auto& m : all_marks(l)) {
    EXPECT_GE(m.x, l.region.x);
    EXPECT_GE(m.y, l.region.y);
    EXPECT_LE(m.x + m.w, l.region.right());
    EXPECT_LE(m.y + m.h, l.region.bottom());
  }
}

TEST(Gatherplot, CarsDiagonalRotatesWithoutOverlap) {
  auto cars = load_fixture("cars.csv");
  auto l = gp::layout_gatherplot(cars, spec_xy("MPG", "MPG", "Origin"));
  EXPECT_TRUE(l.rotated);
  EXPECT_EQ(interior_overlaps(all_marks(l)), 0u);
  EXPECT_EQ(l.mark_count(), cars.size());
}

TEST(Gatherplot, RandomDatasetsStayOverlapFree) {
  Rng rng(2024);
  for (int trial = 0; trial < 25; ++trial) {
    auto data = random_dataset(rng, rng.between(1, 1500), 2, 2);
    const auto& dims = data.dimensions();
    auto pick = [&]() -> std::optional<std::string> {
      const auto i = rng.below(dims.size() + 1);
      if (i == dims.size()) return std::nullopt;
      return dims[i].name;
    };
    for (auto mode : {gp::LayoutMode::Absolute, gp::LayoutMode::Normalized, gp::LayoutMode::Streamgraph}) {
      auto s = spec_xy(pick(), pick(), pick(), mode,
                       {static_cast<double>(rng.below(50)), static_cast<double>(rng.below(50)),
                        static_cast<double>(rng.between(200, 900)), static_cast<double>(rng.between(200, 900))});
      auto l = gp::layout_gatherplot(data, s);
      ASSERT_TRUE(is_identity(mark_ids(l), data.size()));
      ASSERT_EQ(interior_overlaps(all_marks(l)), 0u);
      if (!l.rotated) {
        ASSERT_TRUE(contained(l));
      }
    }
  }
}

TEST(Gatherplot, FractionalRegionIsFloored) {
  auto data = gp::ingest_csv("a\nx\ny\n");
  auto l = gp::layout_gatherplot(data, spec_xy("a", std::nullopt, std::nullopt, gp::LayoutMode::Auto, {0.5, 0.5, 100.7, 80.2}));
  EXPECT_EQ(l.region, (gp::Rect{0, 0, 100, 80}));
  EXPECT_EQ(error_code([&] { gp::layout_gatherplot(data, spec_xy("a", std::nullopt, std::nullopt, gp::LayoutMode::Auto, {0, 0, 0, 10})); }),
            gp::errc::parameter);
}

// ---------------------------------------------------------------- ticks

TEST(Ticks, BracketInsetAndArms) {
  gp::GatherTransform t;
  t.segments.push_back({"only", 0, 100, {}});
  auto ticks = gp::bracket_ticks(t, gp::Axis::X, 5, 2);
  ASSERT_EQ(ticks.size(), 1u);
  EXPECT_EQ(ticks[0].lo, 2);
  EXPECT_EQ(ticks[0].hi, 98);
  EXPECT_EQ(ticks[0].arm_length, 5);
  EXPECT_EQ(ticks[0].label, "only");
}

TEST(Ticks, DegenerateSegmentCollapsesToMidpoint) {
  gp::GatherTransform t;
  t.segments.push_back({"a", 10, 10, {}});
  t.segments.push_back({"", 20, 23, {}});
  auto ticks = gp::bracket_ticks(t, gp::Axis::Y);
  EXPECT_EQ(ticks[0].lo, 10);
  EXPECT_EQ(ticks[0].hi, 10);
  EXPECT_EQ(ticks[1].lo, 21.5);
  EXPECT_EQ(ticks[1].hi, 21.5);
  EXPECT_FALSE(ticks[1].label.empty());
}

TEST(Ticks, TitanicClassBracketsDoNotTouch) {
  auto data = load_fixture("titanic.csv");
  const auto d = data.index_of("class");
  std::vector<std::vector<gp::PointId>> ids(4);
  for (gp::PointId i = 0; i < data.size(); ++i) ids[data.code(d, i)].push_back(i);
  auto t = gp::build_segments(data.dimension(d).categories, ids, 400, {});
  auto ticks = gp::bracket_ticks(t, gp::Axis::X);
  ASSERT_EQ(ticks.size(), 4u);
  for (std::size_t i = 1; i < 4; ++i) EXPECT_LT(ticks[i - 1].hi, ticks[i].lo);
  EXPECT_EQ(ticks[0].arm_length, gp::kBracketArm);
}
