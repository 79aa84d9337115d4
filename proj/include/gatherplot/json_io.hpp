#pragma once

// JSON documents shared by the CLI, the HTTP service and the frontend. The
// geometry layout follows schema/geometry.schema.json.

#include <gatherplot/data_model.hpp>
#include <gatherplot/layout.hpp>
#include <gatherplot/lens.hpp>
#include <gatherplot/overlap.hpp>

#include "json.hpp"

#include <string>

namespace gatherplot {

using Json = nlohmann::ordered_json;

inline constexpr int kSchemaVersion = 1;

inline Json to_json(const Rect& r) { return {{"x", r.x}, {"y", r.y}, {"width", r.w}, {"height", r.h}}; }

inline Json to_json(const Dimension& dim) {
  Json j = {{"name", dim.name}, {"kind", std::string(to_string(dim.kind))}};
  if (dim.categorical()) {
    j["categories"] = dim.categories;
  } else {
    j["range"] = {dim.min, dim.max};
  }
  return j;
}

inline Json dataset_descriptor(const Dataset& data, const std::string& name = {}) {
  Json dims = Json::array();
  for (const auto& d : data.dimensions()) dims.push_back(to_json(d));
  Json j = {{"schema_version", kSchemaVersion}};
  if (!name.empty()) j["name"] = name;
  j["row_count"] = data.size();
  j["dropped_rows"] = data.dropped_rows();
  j["dimensions"] = std::move(dims);
  return j;
}

inline Json to_json(const MarkGeometry& m) {
  return {{"id", m.id}, {"x", m.x}, {"y", m.y}, {"w", m.w}, {"h", m.h}, {"r", m.corner_radius}, {"color", m.color_index}};
}

inline Json to_json(const GroupLayout& g) {
  Json marks = Json::array();
  for (const auto& m : g.marks) marks.push_back(to_json(m));
  return {{"cell", {{"x", g.x_key}, {"y", g.y_key}}},
          {"box", to_json(g.box)},
          {"grid", {g.cols, g.rows}},
          {"folded", g.folded},
          {"marks", std::move(marks)}};
}

inline Json to_json(const BracketTick& t) {
  return {{"axis", std::string(to_string(t.axis))},
          {"lo", t.lo},
          {"hi", t.hi},
          {"label", t.label},
          {"arm", t.arm_length},
          {"inset", t.inset},
          {"minimized", t.minimized}};
}

inline Json to_json(const AxisLayout& a) {
  Json segments = Json::array();
  for (const auto& s : a.transform.segments) {
    segments.push_back({{"key", s.key}, {"lo", s.lo}, {"hi", s.hi}, {"count", s.members.size()}, {"minimized", s.minimized}});
  }
  return {{"dimension", a.dimension ? Json(*a.dimension) : Json(nullptr)},
          {"kind", a.kind},
          {"segments", std::move(segments)}};
}

inline Json to_json(const PlotLayout& layout) {
  Json groups = Json::array();
  for (const auto& g : layout.groups) groups.push_back(to_json(g));
  Json ticks = Json::array();
  for (const auto& t : layout.ticks) ticks.push_back(to_json(t));
  Json legend = Json::array();
  for (const auto& l : layout.legend) legend.push_back({{"key", l.key}, {"color_index", l.color_index}});
  return {{"schema_version", kSchemaVersion},
          {"units", "px"},
          {"y_axis", "down"},
          {"region", to_json(layout.region)},
          {"mode_used", std::string(to_string(layout.mode_used))},
          {"rotated", layout.rotated},
          {"mark_size", layout.mark_size},
          {"streamgraph_k", layout.streamgraph_k},
          {"color", layout.color_dim ? Json(*layout.color_dim) : Json(nullptr)},
          {"axes", {{"x", to_json(layout.x_axis)}, {"y", to_json(layout.y_axis)}}},
          {"mark_count", layout.mark_count()},
          {"groups", std::move(groups)},
          {"ticks", std::move(ticks)},
          {"legend", std::move(legend)},
          {"warnings", layout.warnings}};
}

inline Json to_json(const LensLayout& lens) {
  Json groups = Json::array();
  for (const auto& g : lens.groups) groups.push_back(to_json(g));
  Json sectors = Json::array();
  for (const auto& s : lens.sectors) {
    sectors.push_back({{"key", s.key}, {"color_index", s.color_index}, {"count", s.count},
                       {"start_deg", s.start_deg}, {"sweep_deg", s.sweep_deg}});
  }
  Json wedges = Json::array();
  for (const auto& w : lens.wedges) {
    wedges.push_back({{"id", w.id}, {"cx", w.cx}, {"cy", w.cy}, {"r_inner", w.r_inner}, {"r_outer", w.r_outer},
                      {"start_deg", w.start_deg}, {"sweep_deg", w.sweep_deg}, {"color", w.color_index}});
  }
  return {{"region", to_json(lens.region)},
          {"mode", std::string(to_string(lens.mode))},
          {"group", lens.group_dim},
          {"captured", lens.captured_ids},
          {"mark_count", lens.mark_count()},
          {"mark_size", lens.mark_size},
          {"rings", lens.rings},
          {"groups", std::move(groups)},
          {"sectors", std::move(sectors)},
          {"wedges", std::move(wedges)}};
}

inline Json lens_document(const LensLayout& lens) {
  return {{"schema_version", kSchemaVersion},
          {"units", "px"},
          {"y_axis", "down"},
          {"lens", to_json(lens)},
          {"suppressed", lens.base_suppressed}};
}

inline Json to_json(const OverlapReport& r) {
  Json samples = Json::array();
  for (const auto& [a, b] : r.samples) samples.push_back({a, b});
  return {{"schema_version", kSchemaVersion},
          {"overlap_x", r.overlap_x},
          {"overlap_y", r.overlap_y},
          {"overplotting", r.overplotting},
          {"samples", std::move(samples)}};
}

inline std::string dump(const Json& j, int indent = -1) { return j.dump(indent); }

}  // namespace gatherplot
