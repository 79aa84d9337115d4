#pragma once

#include <gatherplot/data_model.hpp>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

namespace gatherplot {

// Layout coordinates live on a 1/64 px lattice. Sums and differences of
// lattice values are exact in double precision, so tangent marks compare as
// tangent rather than overlapping by an ulp.
inline constexpr double kPixelQuantum = 1.0 / 64.0;

inline double snap(double v) { return std::round(v / kPixelQuantum) * kPixelQuantum; }

// Pixel rectangle, y pointing down.
struct Rect {
  double x = 0.0;
  double y = 0.0;
  double w = 0.0;
  double h = 0.0;

  double right() const noexcept { return x + w; }
  double bottom() const noexcept { return y + h; }
  double area() const noexcept { return w * h; }

  bool contains(const Rect& r) const noexcept {
    return r.x >= x && r.y >= y && r.right() <= right() && r.bottom() <= bottom();
  }
  // Open interiors intersect; tangent rectangles do not.
  bool interior_intersects(const Rect& r) const noexcept {
    return x < r.right() && r.x < right() && y < r.bottom() && r.y < bottom();
  }
  // Closed rectangles touch or intersect.
  bool touches(const Rect& r) const noexcept {
    return x <= r.right() && r.x <= right() && y <= r.bottom() && r.y <= bottom();
  }

  friend bool operator==(const Rect&, const Rect&) = default;
};

struct MarkGeometry {
  PointId id = 0;
  double x = 0.0;
  double y = 0.0;
  double w = 0.0;
  double h = 0.0;
  double corner_radius = 0.0;
  std::string color_key;
  int color_index = 0;

  Rect rect() const noexcept { return {x, y, w, h}; }
};

struct GroupLayout {
  std::string x_key;
  std::string y_key;
  Rect box;
  std::vector<MarkGeometry> marks;
  int cols = 0;
  int rows = 0;
  bool folded = false;  // lives in a minimized strip
};

// Rounded corners: constant 3 px, turning circular below 6 px.
inline double rounded_corner(double w, double h) { return std::min(3.0, std::min(w, h) / 2); }

}  // namespace gatherplot
