#pragma once

// Bracket ticks: one interval marker per gather segment, arms pointing
// toward the plot, label in the region beyond the bracket.

#include <gatherplot/gather.hpp>

#include <string>
#include <vector>

namespace gatherplot {

enum class Axis { X, Y };

constexpr std::string_view to_string(Axis a) noexcept { return a == Axis::X ? "x" : "y"; }

inline constexpr double kBracketArm = 6.0;
inline constexpr double kBracketInset = 2.0;

struct BracketTick {
  Axis axis = Axis::X;
  double lo = 0.0;  // bracket span after inset, pixels
  double hi = 0.0;
  std::string label;
  double arm_length = kBracketArm;
  double inset = kBracketInset;
  bool minimized = false;

  double mid() const noexcept { return (lo + hi) / 2; }
};

// Segments are in the axis' screen coordinates. A segment narrower than
// twice the inset collapses to a single arm pair at its midpoint.
inline std::vector<BracketTick> bracket_ticks(const GatherTransform& transform, Axis axis,
                                              double arm_length = kBracketArm,
                                              double inset = kBracketInset) {
  std::vector<BracketTick> ticks;
  ticks.reserve(transform.segments.size());
  for (const auto& seg : transform.segments) {
    BracketTick t;
    t.axis = axis;
    t.label = seg.key.empty() ? std::string("(empty)") : seg.key;
    t.arm_length = arm_length;
    t.inset = inset;
    t.minimized = seg.minimized;
    if (seg.hi - seg.lo > 2 * inset) {
      t.lo = seg.lo + inset;
      t.hi = seg.hi - inset;
    } else {
      t.lo = t.hi = seg.center();
    }
    ticks.push_back(std::move(t));
  }
  return ticks;
}

}  // namespace gatherplot
