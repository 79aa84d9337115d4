#pragma once

// Shared test helpers: fixtures, a portable RNG, and brute-force oracles that
// deliberately avoid the library's own algorithms.

#include <gatherplot/gatherplot.hpp>

#include <cstdint>
#include <fstream>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#ifndef GATHERPLOT_TEST_DATA
#error "GATHERPLOT_TEST_DATA must point at tests/data"
#endif

namespace testing_support {

namespace gp = gatherplot;

inline std::string fixture_path(const std::string& name) { return std::string(GATHERPLOT_TEST_DATA) + "/" + name; }

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline gp::Dataset load_fixture(const std::string& name) { return gp::ingest_csv(read_file(fixture_path(name))); }

// mt19937_64 with hand-rolled distributions; the std distributions differ
// between standard libraries.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}

  double uniform() { return static_cast<double>(eng_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  std::size_t below(std::size_t n) { return static_cast<std::size_t>(eng_() % n); }
  std::size_t between(std::size_t lo, std::size_t hi) { return lo + below(hi - lo + 1); }
  bool coin() { return (eng_() & 1u) != 0; }

 private:
  std::mt19937_64 eng_;
};

inline std::uint64_t brute_pairs_1d(const std::vector<double>& c, double s) {
  std::uint64_t n = 0;
  for (std::size_t i = 0; i < c.size(); ++i)
    for (std::size_t j = i + 1; j < c.size(); ++j)
      if (std::abs(c[i] - c[j]) < s) ++n;
  return n;
}

inline std::uint64_t brute_pairs_2d(const std::vector<double>& x, const std::vector<double>& y, double sx,
                                    double sy) {
  std::uint64_t n = 0;
  for (std::size_t i = 0; i < x.size(); ++i)
    for (std::size_t j = i + 1; j < x.size(); ++j)
      if (std::abs(x[i] - x[j]) < sx && std::abs(y[i] - y[j]) < sy) ++n;
  return n;
}

inline std::vector<gp::MarkGeometry> all_marks(const gp::PlotLayout& layout, bool include_folded = true) {
  std::vector<gp::MarkGeometry> out;
  for (const auto& g : layout.groups) {
    if (g.folded && !include_folded) continue;
    out.insert(out.end(), g.marks.begin(), g.marks.end());
  }
  return out;
}

// Number of mark pairs whose open interiors intersect, over all pairs.
inline std::uint64_t interior_overlaps(const std::vector<gp::MarkGeometry>& marks) {
  std::uint64_t n = 0;
  for (std::size_t i = 0; i < marks.size(); ++i) {
    const auto& a = marks[i];
    for (std::size_t j = i + 1; j < marks.size(); ++j) {
      const auto& b = marks[j];
      if (a.x < b.x + b.w && b.x < a.x + a.w && a.y < b.y + b.h && b.y < a.y + a.h) ++n;
    }
  }
  return n;
}

// Marks strictly inside their group box and boxes inside the region.
inline bool contained(const gp::PlotLayout& layout) {
  const auto& r = layout.region;
  for (const auto& g : layout.groups) {
    if (g.box.x < r.x || g.box.y < r.y || g.box.right() > r.right() || g.box.bottom() > r.bottom()) return false;
    for (const auto& m : g.marks) {
      if (m.x < g.box.x || m.y < g.box.y || m.x + m.w > g.box.right() || m.y + m.h > g.box.bottom()) return false;
      if (!(m.w > 0) || !(m.h > 0) || m.corner_radius > std::min(m.w, m.h) / 2) return false;
    }
  }
  return true;
}

// Sorted id list of every emitted mark.
inline std::vector<gp::PointId> mark_ids(const gp::PlotLayout& layout) {
  std::vector<gp::PointId> ids;
  for (const auto& g : layout.groups)
    for (const auto& m : g.marks) ids.push_back(m.id);
  std::sort(ids.begin(), ids.end());
  return ids;
}

inline bool is_identity(const std::vector<gp::PointId>& sorted_ids, std::size_t n) {
  if (sorted_ids.size() != n) return false;
  for (std::size_t i = 0; i < n; ++i)
    if (sorted_ids[i] != i) return false;
  return true;
}

// Counts of value tuples over `columns`, straight from CSV text split on
// commas; fixture cells never need quoting.
inline std::map<std::vector<std::string>, std::size_t> raw_counts(const std::string& text,
                                                                  const std::vector<std::string>& columns) {
  std::istringstream in(text);
  std::string line;
  std::getline(in, line);
  auto split = [](const std::string& l) {
    std::vector<std::string> cells;
    std::stringstream ss(l);
    std::string c;
    while (std::getline(ss, c, ',')) {
      if (!c.empty() && c.back() == '\r') c.pop_back();
      cells.push_back(c);
    }
    return cells;
  };
  auto header = split(line);
  std::vector<std::size_t> at;
  for (const auto& c : columns) at.push_back(std::find(header.begin(), header.end(), c) - header.begin());
  std::map<std::vector<std::string>, std::size_t> counts;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    auto cells = split(line);
    std::vector<std::string> key;
    for (auto i : at) key.push_back(cells.at(i));
    ++counts[key];
  }
  return counts;
}

// Random dataset: `cats` categorical dimensions with 1..max_levels levels and
// `conts` continuous ones, some with heavy ties.
inline gp::Dataset random_dataset(Rng& rng, std::size_t n, std::size_t cats, std::size_t conts,
                                  std::size_t max_levels = 6) {
  std::vector<gp::Dimension> dims;
  std::vector<std::vector<double>> cols;
  for (std::size_t c = 0; c < cats; ++c) {
    gp::Dimension d;
    d.name = "c" + std::to_string(c);
    d.kind = gp::DimensionKind::Categorical;
    const std::size_t levels = rng.between(1, max_levels);
    for (std::size_t l = 0; l < levels; ++l) d.categories.push_back("v" + std::to_string(l));
    // Skewed level frequencies.
    std::vector<double> col(n);
    for (auto& v : col) {
      const double u = rng.uniform();
      v = static_cast<double>(std::min(levels - 1, static_cast<std::size_t>(u * u * static_cast<double>(levels))));
    }
    dims.push_back(std::move(d));
    cols.push_back(std::move(col));
  }
  for (std::size_t c = 0; c < conts; ++c) {
    gp::Dimension d;
    d.name = "n" + std::to_string(c);
    d.kind = gp::DimensionKind::Continuous;
    const bool ties = rng.coin();
    std::vector<double> col(n);
    for (auto& v : col) v = ties ? std::floor(rng.uniform(0, 40)) : rng.uniform(-50, 150);
    d.min = *std::min_element(col.begin(), col.end());
    d.max = *std::max_element(col.begin(), col.end());
    d.integral = ties;
    dims.push_back(std::move(d));
    cols.push_back(std::move(col));
  }
  return gp::Dataset(std::move(dims), std::move(cols));
}

}  // namespace testing_support
