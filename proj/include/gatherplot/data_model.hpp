#pragma once

// Typed columnar datasets, CSV ingestion and quantization of continuous
// dimensions into ordered bins.

#include <gatherplot/csv.hpp>
#include <gatherplot/error.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <cstdio>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace gatherplot {

using PointId = std::uint32_t;

// Numeric columns with at most this many distinct values are typed
// categorical.
inline constexpr std::size_t kCategoricalThreshold = 12;

enum class DimensionKind { Categorical, Continuous };

constexpr std::string_view to_string(DimensionKind kind) noexcept {
  return kind == DimensionKind::Categorical ? "categorical" : "continuous";
}

struct Dimension {
  std::string name;
  DimensionKind kind = DimensionKind::Categorical;
  std::vector<std::string> categories;  // categorical only, display order
  double min = 0.0;                     // continuous only
  double max = 0.0;
  bool integral = false;  // continuous column holding only whole numbers

  bool categorical() const noexcept { return kind == DimensionKind::Categorical; }
  bool continuous() const noexcept { return kind == DimensionKind::Continuous; }

  friend bool operator==(const Dimension&, const Dimension&) = default;
};

// Shortest decimal that reads back as the same double; used for CSV
// serialization.
inline std::string format_exact(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

// Human-facing number formatting (10 significant digits, trailing zeros
// dropped), so 0.1 + 0.2 prints as 0.3.
inline std::string format_number(double v) {
  if (v == 0.0) return "0";
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.10g", v);
  return buf;
}

inline std::optional<double> parse_number(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
  if (s.empty()) return std::nullopt;
  if (s.front() == '+') s.remove_prefix(1);
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size() || !std::isfinite(v)) return std::nullopt;
  return v;
}

// Immutable columnar table. Categorical cells hold the category index,
// continuous cells the value. Point ids are the dense row indices.
class Dataset {
 public:
  Dataset() = default;

  Dataset(std::vector<Dimension> dims, std::vector<std::vector<double>> columns,
          std::size_t dropped_rows = 0)
      : dims_(std::move(dims)), columns_(std::move(columns)), dropped_rows_(dropped_rows) {
    if (dims_.size() != columns_.size()) {
      throw error(errc::structural, "dimension/column count mismatch");
    }
    rows_ = columns_.empty() ? 0 : columns_.front().size();
    std::set<std::string> names;
    for (std::size_t d = 0; d < dims_.size(); ++d) {
      const auto& dim = dims_[d];
      if (!names.insert(dim.name).second) {
        throw error(errc::structural, "duplicate dimension name '" + dim.name + "'");
      }
      if (columns_[d].size() != rows_) {
        throw error(errc::structural, "column '" + dim.name + "' has a different length");
      }
      if (dim.categorical()) {
        if (dim.categories.empty()) {
          throw error(errc::structural, "categorical dimension '" + dim.name + "' has no categories");
        }
        std::set<std::string> uniq(dim.categories.begin(), dim.categories.end());
        if (uniq.size() != dim.categories.size()) {
          throw error(errc::structural, "categorical dimension '" + dim.name + "' repeats a category");
        }
        for (double code : columns_[d]) {
          if (code < 0 || code >= static_cast<double>(dim.categories.size()) || code != std::floor(code)) {
            throw error(errc::structural, "column '" + dim.name + "' holds an invalid category code");
          }
        }
      } else {
        if (!(dim.min <= dim.max)) {
          throw error(errc::structural, "continuous dimension '" + dim.name + "' has min > max");
        }
        for (double v : columns_[d]) {
          if (v < dim.min || v > dim.max) {
            throw error(errc::structural, "column '" + dim.name + "' holds a value outside its range");
          }
        }
      }
    }
  }

  std::size_t size() const noexcept { return rows_; }
  bool empty() const noexcept { return rows_ == 0; }
  std::size_t dropped_rows() const noexcept { return dropped_rows_; }

  const std::vector<Dimension>& dimensions() const noexcept { return dims_; }

  std::optional<std::size_t> find(std::string_view name) const {
    for (std::size_t d = 0; d < dims_.size(); ++d) {
      if (dims_[d].name == name) return d;
    }
    return std::nullopt;
  }

  std::size_t index_of(std::string_view name) const {
    if (auto d = find(name)) return *d;
    throw error(errc::unknown_dimension, "unknown dimension '" + std::string(name) + "'");
  }

  const Dimension& dimension(std::size_t d) const { return dims_.at(d); }
  const Dimension& dimension(std::string_view name) const { return dims_[index_of(name)]; }

  std::span<const double> column(std::size_t d) const { return columns_.at(d); }

  double value(std::size_t d, PointId row) const { return columns_[d][row]; }

  std::size_t code(std::size_t d, PointId row) const {
    return static_cast<std::size_t>(columns_[d][row]);
  }

  // Display text of a cell: the category, or the formatted number.
  std::string text(std::size_t d, PointId row) const {
    const auto& dim = dims_[d];
    if (dim.categorical()) return dim.categories[code(d, row)];
    return format_exact(columns_[d][row]);
  }

 private:
  std::vector<Dimension> dims_;
  std::vector<std::vector<double>> columns_;
  std::size_t rows_ = 0;
  std::size_t dropped_rows_ = 0;
};

struct IngestOptions {
  std::map<std::string, DimensionKind, std::less<>> kinds;
  // Explicit category order. Must list every value present; extra entries
  // become empty categories.
  std::map<std::string, std::vector<std::string>, std::less<>> category_order;
};

namespace detail {

inline Dimension type_column(const std::string& name, const std::vector<std::string>& cells,
                             const IngestOptions& options) {
  bool numeric = true;
  std::vector<double> values;
  values.reserve(cells.size());
  for (const auto& cell : cells) {
    auto v = parse_number(cell);
    if (!v) {
      numeric = false;
      break;
    }
    values.push_back(*v);
  }
  std::set<double> distinct_values(values.begin(), values.end());

  DimensionKind kind = numeric && distinct_values.size() > kCategoricalThreshold
                           ? DimensionKind::Continuous
                           : DimensionKind::Categorical;
  if (auto it = options.kinds.find(name); it != options.kinds.end()) kind = it->second;

  Dimension dim;
  dim.name = name;
  dim.kind = kind;
  if (kind == DimensionKind::Continuous) {
    if (!numeric) {
      throw error(errc::parameter, "column '" + name + "' cannot be continuous: non-numeric cells");
    }
    auto [lo, hi] = std::minmax_element(values.begin(), values.end());
    dim.min = *lo;
    dim.max = *hi;
    dim.integral = std::all_of(values.begin(), values.end(),
                               [](double v) { return v == std::floor(v); });
    return dim;
  }

  if (auto it = options.category_order.find(name); it != options.category_order.end()) {
    dim.categories = it->second;
    std::set<std::string> listed(dim.categories.begin(), dim.categories.end());
    for (const auto& cell : cells) {
      if (!listed.count(cell)) {
        throw error(errc::parameter,
                    "category order for '" + name + "' does not list value '" + cell + "'");
      }
    }
    return dim;
  }

  if (numeric) {
    // Ascending numeric order; textual variants of one number stay distinct.
    std::vector<std::pair<double, std::string>> keyed;
    std::set<std::string> seen;
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (seen.insert(cells[i]).second) keyed.emplace_back(values[i], cells[i]);
    }
    std::sort(keyed.begin(), keyed.end());
    for (auto& [v, s] : keyed) dim.categories.push_back(std::move(s));
  } else {
    std::set<std::string> seen;
    for (const auto& cell : cells) {
      if (seen.insert(cell).second) dim.categories.push_back(cell);
    }
  }
  return dim;
}

}  // namespace detail

// Parses CSV text with a header row into a typed dataset. Records with an
// empty cell are dropped and counted in Dataset::dropped_rows().
inline Dataset ingest_csv(std::string_view bytes, const IngestOptions& options = {}) {
  auto rows = csv::parse(bytes);
  if (rows.empty()) throw error(errc::empty_dataset, "input is empty");

  auto header = std::move(rows.front().cells);
  for (auto& name : header) {
    auto v = std::string_view(name);
    while (!v.empty() && v.back() == ' ') v.remove_suffix(1);
    while (!v.empty() && v.front() == ' ') v.remove_prefix(1);
    name = std::string(v);
  }
  const std::size_t width = header.size();

  std::vector<std::vector<std::string>> cells(width);
  std::size_t dropped = 0;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    auto& row = rows[r];
    if (row.cells.size() != width) {
      throw error(errc::structural, "row " + std::to_string(row.line) + " has " +
                                        std::to_string(row.cells.size()) + " fields, expected " +
                                        std::to_string(width));
    }
    bool missing = std::any_of(row.cells.begin(), row.cells.end(), [](const std::string& c) {
      return c.find_first_not_of(" \t") == std::string::npos;
    });
    if (missing) {
      ++dropped;
      continue;
    }
    for (std::size_t c = 0; c < width; ++c) cells[c].push_back(std::move(row.cells[c]));
  }
  if (width == 0 || cells.front().empty()) {
    throw error(errc::empty_dataset, "input has no complete records");
  }

  std::vector<Dimension> dims;
  std::vector<std::vector<double>> columns;
  for (std::size_t c = 0; c < width; ++c) {
    auto dim = detail::type_column(header[c], cells[c], options);
    std::vector<double> column;
    column.reserve(cells[c].size());
    if (dim.continuous()) {
      for (const auto& cell : cells[c]) column.push_back(*parse_number(cell));
    } else {
      std::map<std::string_view, double> codes;
      for (std::size_t i = 0; i < dim.categories.size(); ++i) {
        codes.emplace(dim.categories[i], static_cast<double>(i));
      }
      for (const auto& cell : cells[c]) column.push_back(codes.at(cell));
    }
    dims.push_back(std::move(dim));
    columns.push_back(std::move(column));
  }
  return Dataset(std::move(dims), std::move(columns), dropped);
}

inline std::string to_csv(const Dataset& data) {
  std::string out;
  std::vector<std::string> cells;
  for (const auto& dim : data.dimensions()) cells.push_back(dim.name);
  csv::append_row(out, cells);
  for (PointId r = 0; r < data.size(); ++r) {
    cells.clear();
    for (std::size_t d = 0; d < data.dimensions().size(); ++d) cells.push_back(data.text(d, r));
    csv::append_row(out, cells);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Quantization

struct QuantizePolicy {
  enum class Kind { FixedCount, FixedWidth };
  Kind kind = Kind::FixedCount;
  std::size_t count = 10;
  double width = 1.0;

  static QuantizePolicy fixed_count(std::size_t k) { return {Kind::FixedCount, k, 0.0}; }
  static QuantizePolicy fixed_width(double w) { return {Kind::FixedWidth, 0, w}; }
};

// Maps a continuous dimension onto ordered bins [e0, e1), ..., [e(k-1), ek].
// The last bin is closed; values outside the edges clamp to the end bins.
class Quantizer {
 public:
  Quantizer() = default;

  Quantizer(Dimension source, std::vector<double> edges)
      : source_(std::move(source)), edges_(std::move(edges)) {
    if (edges_.size() < 2) throw error(errc::parameter, "a quantizer needs at least one bin");
    const bool degenerate = edges_.size() == 2 && edges_[0] == edges_[1];
    for (std::size_t i = 1; i < edges_.size() && !degenerate; ++i) {
      if (!(edges_[i - 1] < edges_[i])) {
        throw error(errc::parameter, "quantizer edges must be strictly ascending");
      }
    }
    const std::size_t bins = edges_.size() - 1;
    for (std::size_t i = 0; i < bins; ++i) {
      bool last = i + 1 == bins;
      labels_.push_back("[" + format_number(edges_[i]) + ", " + format_number(edges_[i + 1]) +
                        (last ? "]" : ")"));
    }
  }

  const Dimension& source() const noexcept { return source_; }
  const std::vector<double>& edges() const noexcept { return edges_; }
  const std::vector<std::string>& labels() const noexcept { return labels_; }
  std::size_t size() const noexcept { return labels_.size(); }

  std::size_t bin_of(double v) const noexcept {
    auto it = std::upper_bound(edges_.begin(), edges_.end(), v);
    std::ptrdiff_t idx = (it - edges_.begin()) - 1;
    if (idx < 0) return 0;
    return std::min(static_cast<std::size_t>(idx), size() - 1);
  }

  // The bins as an ordered categorical dimension.
  Dimension as_dimension() const {
    Dimension dim;
    dim.name = source_.name;
    dim.kind = DimensionKind::Categorical;
    dim.categories = labels_;
    return dim;
  }

 private:
  Dimension source_;
  std::vector<double> edges_;
  std::vector<std::string> labels_;
};

// Data-unit span a quantizer has to cover. Whole-number columns are treated
// as unit intervals, so ages 0..79 span [0, 80).
inline std::pair<double, double> quantization_span(const Dimension& dim) {
  return {dim.min, dim.integral ? dim.max + 1.0 : dim.max};
}

inline Quantizer quantize(const Dimension& dim, const QuantizePolicy& policy) {
  if (!dim.continuous()) {
    throw error(errc::parameter, "dimension '" + dim.name + "' is not continuous");
  }
  if (policy.kind == QuantizePolicy::Kind::FixedCount && policy.count < 1) {
    throw error(errc::parameter, "bin count must be at least 1");
  }
  if (policy.kind == QuantizePolicy::Kind::FixedWidth && !(policy.width > 0.0)) {
    throw error(errc::parameter, "bin width must be positive");
  }
  if (dim.min == dim.max) return Quantizer(dim, {dim.min, dim.max});

  auto [lo, hi] = quantization_span(dim);
  std::vector<double> edges;
  if (policy.kind == QuantizePolicy::Kind::FixedCount) {
    const auto k = policy.count;
    for (std::size_t i = 0; i < k; ++i) {
      edges.push_back(lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(k));
    }
    edges.push_back(hi);
  } else {
    const double w = policy.width;
    auto k = static_cast<std::size_t>(std::ceil((hi - lo) / w - 1e-9));
    k = std::max<std::size_t>(k, 1);
    for (std::size_t i = 0; i <= k; ++i) edges.push_back(lo + w * static_cast<double>(i));
  }
  return Quantizer(dim, std::move(edges));
}

}  // namespace gatherplot
