#pragma once

// SVG 1.1 rendering of plot and lens geometry. Marks are rounded rectangles
// without strokes; every mark carries its point id in `data-id`.

#include <gatherplot/error.hpp>
#include <gatherplot/layout.hpp>
#include <gatherplot/lens.hpp>

#include "json.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

namespace gatherplot {

struct Theme {
  // Paul Tol's muted scheme: ten colour-blind safe categorical colours.
  std::vector<std::string> palette{"#CC6677", "#332288", "#DDCC77", "#117733", "#88CCEE",
                                   "#882255", "#44AA99", "#999933", "#AA4499", "#DDDDDD"};
  std::string font_family = "Helvetica, Arial, sans-serif";
  double font_size = 11.0;
  std::string background = "#FFFFFF";
  std::string ink = "#444444";

  const std::string& color(int index) const {
    return palette[static_cast<std::size_t>(index) % palette.size()];
  }
};

namespace detail {

inline void apply_theme_value(Theme& theme, std::string_view key, const nlohmann::json& v) {
  if (key == "palette") {
    auto colors = v.get<std::vector<std::string>>();
    if (colors.empty()) throw error(errc::parameter, "theme palette is empty");
    theme.palette = std::move(colors);
  } else if (key == "font_family") {
    theme.font_family = v.get<std::string>();
  } else if (key == "font_size") {
    theme.font_size = v.get<double>();
  } else if (key == "background") {
    theme.background = v.get<std::string>();
  }
}

// Flat TOML: `key = "text"`, `key = 12`, `key = ["a", "b"]`, `# comments`.
// Values of that shape are also valid JSON, so each is parsed as JSON.
inline Theme parse_theme_toml(std::string_view text) {
  Theme theme;
  std::istringstream in{std::string(text)};
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
      if (line[i] == '"' && (i == 0 || line[i - 1] != '\\')) quoted = !quoted;
      if (line[i] == '#' && !quoted) {
        line.erase(i);
        break;
      }
    }
    auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos) continue;
    auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw error(errc::structural, "theme line " + std::to_string(number) + ": expected key = value");
    }
    std::string key = line.substr(first, eq - first);
    key.erase(key.find_last_not_of(" \t") + 1);
    try {
      apply_theme_value(theme, key, nlohmann::json::parse(line.substr(eq + 1)));
    } catch (const nlohmann::json::exception& e) {
      throw error(errc::structural, "theme line " + std::to_string(number) + ": " + e.what());
    }
  }
  return theme;
}

}  // namespace detail

inline Theme parse_theme(std::string_view text, bool toml) {
  if (toml) return detail::parse_theme_toml(text);
  Theme theme;
  try {
    auto j = nlohmann::json::parse(text);
    for (auto it = j.begin(); it != j.end(); ++it) detail::apply_theme_value(theme, it.key(), it.value());
  } catch (const nlohmann::json::exception& e) {
    throw error(errc::structural, std::string("theme: ") + e.what());
  }
  return theme;
}

inline Theme load_theme(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw error(errc::parameter, "cannot open theme file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  const bool toml = path.size() >= 5 && path.substr(path.size() - 5) == ".toml";
  return parse_theme(ss.str(), toml);
}

namespace detail {

inline std::string xml_escape(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      case '\'': out += "&apos;"; break;
      default: out += c;
    }
  }
  return out;
}

inline std::string num(double v) {
  if (std::abs(v) < 1e-12) return "0";
  return format_number(std::round(v * 1e6) / 1e6);
}

class SvgWriter {
 public:
  SvgWriter(double width, double height, const Theme& theme) : theme_(theme) {
    out_ << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
         << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" << num(width)
         << "\" height=\"" << num(height) << "\" viewBox=\"0 0 " << num(width) << ' ' << num(height)
         << "\" font-family=\"" << xml_escape(theme.font_family) << "\" font-size=\"" << num(theme.font_size)
         << "\">\n"
         << "<rect class=\"background\" x=\"0\" y=\"0\" width=\"" << num(width) << "\" height=\"" << num(height)
         << "\" fill=\"" << xml_escape(theme.background) << "\"/>\n";
  }

  void raw(std::string_view s) { out_ << s; }

  void mark(const MarkGeometry& m) {
    out_ << "<rect class=\"mark\" data-id=\"" << m.id << "\" x=\"" << num(m.x) << "\" y=\"" << num(m.y)
         << "\" width=\"" << num(m.w) << "\" height=\"" << num(m.h) << "\" rx=\"" << num(m.corner_radius)
         << "\" ry=\"" << num(m.corner_radius) << "\" fill=\"" << xml_escape(theme_.color(m.color_index))
         << "\"/>\n";
  }

  void text(double x, double y, std::string_view anchor, std::string_view cls, std::string_view content,
            std::string_view extra = {}) {
    out_ << "<text class=\"" << cls << "\" x=\"" << num(x) << "\" y=\"" << num(y) << "\" text-anchor=\""
         << anchor << "\" fill=\"" << theme_.ink << '"' << extra << '>' << xml_escape(content) << "</text>\n";
  }

  std::string finish() {
    out_ << "</svg>\n";
    return out_.str();
  }

 private:
  const Theme& theme_;
  std::ostringstream out_;
};

}  // namespace detail

struct SvgMargins {
  double right = 170;   // legend
  double bottom = 56;   // x brackets, labels and title
};

// The canvas extends past the layout region by `margins`; callers place
// the region so that y brackets and labels fit on its left.
inline std::string render_svg(const PlotLayout& layout, const Theme& theme = {}, const SvgMargins& margins = {}) {
  const Rect& r = layout.region;
  const double width = r.right() + margins.right;
  const double height = r.bottom() + margins.bottom;
  const double fs = theme.font_size;
  detail::SvgWriter svg(width, height, theme);

  svg.raw("<g class=\"groups\">\n");
  for (const auto& g : layout.groups) {
    svg.raw("<g class=\"group\" data-x=\"" + detail::xml_escape(g.x_key) + "\" data-y=\"" +
            detail::xml_escape(g.y_key) + "\"" + (g.folded ? " data-folded=\"true\"" : "") + ">\n");
    for (const auto& m : g.marks) svg.mark(m);
    svg.raw("</g>\n");
  }
  svg.raw("</g>\n<g class=\"ticks\" fill=\"none\" stroke=\"" + theme.ink + "\" stroke-width=\"1\">\n");

  const double x_base = r.bottom() + 4;
  const double y_base = r.x - 4;
  std::ostringstream labels;
  for (const auto& t : layout.ticks) {
    const double a = t.arm_length;
    std::ostringstream d;
    if (t.axis == Axis::X) {
      d << "M" << detail::num(t.lo) << ' ' << detail::num(x_base) << " V" << detail::num(x_base + a) << " H"
        << detail::num(t.hi) << " V" << detail::num(x_base);
    } else {
      d << "M" << detail::num(y_base) << ' ' << detail::num(t.lo) << " H" << detail::num(y_base - a) << " V"
        << detail::num(t.hi) << " H" << detail::num(y_base);
    }
    svg.raw("<path class=\"bracket\" data-axis=\"" + std::string(to_string(t.axis)) + "\" d=\"" + d.str() +
            "\"/>\n");
  }
  svg.raw("</g>\n<g class=\"tick-labels\">\n");
  for (const auto& t : layout.ticks) {
    const double span = t.hi - t.lo + 2 * t.inset;
    if (t.axis == Axis::X) {
      if (span < 3 * fs) continue;
      svg.text(t.mid(), x_base + t.arm_length + fs + 2, "middle", "tick-label", t.label);
    } else {
      if (span < fs + 2) continue;
      svg.text(y_base - t.arm_length - 4, t.mid() + fs / 3, "end", "tick-label", t.label);
    }
  }
  svg.raw("</g>\n");

  if (layout.x_axis.dimension) {
    svg.text(r.x + r.w / 2, r.bottom() + margins.bottom - 6, "middle", "axis-title", *layout.x_axis.dimension,
             " font-weight=\"bold\"");
  }
  if (layout.y_axis.dimension) {
    const double x = std::max(fs, 10.0);
    const double y = r.y + r.h / 2;
    svg.text(x, y, "middle", "axis-title", *layout.y_axis.dimension,
             " font-weight=\"bold\" transform=\"rotate(-90 " + detail::num(x) + ' ' + detail::num(y) + ")\"");
  }

  if (!layout.legend.empty()) {
    const double lx = r.right() + 16;
    double ly = r.y + fs;
    svg.raw("<g class=\"legend\">\n");
    if (layout.color_dim) {
      svg.text(lx, ly, "start", "legend-title", *layout.color_dim, " font-weight=\"bold\"");
      ly += fs + 6;
    }
    for (const auto& entry : layout.legend) {
      svg.raw("<rect class=\"legend-swatch\" x=\"" + detail::num(lx) + "\" y=\"" + detail::num(ly - fs + 1) +
              "\" width=\"" + detail::num(fs) + "\" height=\"" + detail::num(fs) + "\" rx=\"2\" fill=\"" +
              detail::xml_escape(theme.color(entry.color_index)) + "\"/>\n");
      svg.text(lx + fs + 6, ly, "start", "legend-label", entry.key);
      ly += fs + 6;
    }
    svg.raw("</g>\n");
  }
  return svg.finish();
}

namespace detail {

inline std::string wedge_path(const WedgeMark& w) {
  auto point = [&](double r, double deg) {
    const double t = deg * std::numbers::pi / 180.0;
    return num(w.cx + r * std::sin(t)) + ' ' + num(w.cy - r * std::cos(t));
  };
  const double a0 = w.start_deg;
  const double a1 = w.start_deg + w.sweep_deg;
  const double mid = (a0 + a1) / 2;
  std::string d = "M" + point(w.r_outer, a0);
  // Two half arcs so a full ring still draws.
  d += " A" + num(w.r_outer) + ' ' + num(w.r_outer) + " 0 0 1 " + point(w.r_outer, mid);
  d += " A" + num(w.r_outer) + ' ' + num(w.r_outer) + " 0 0 1 " + point(w.r_outer, a1);
  if (w.r_inner > 0) {
    d += " L" + point(w.r_inner, a1);
    d += " A" + num(w.r_inner) + ' ' + num(w.r_inner) + " 0 0 0 " + point(w.r_inner, mid);
    d += " A" + num(w.r_inner) + ' ' + num(w.r_inner) + " 0 0 0 " + point(w.r_inner, a0);
  } else {
    d += " L" + num(w.cx) + ' ' + num(w.cy);
  }
  return d + " Z";
}

}  // namespace detail

// Scatterplot with the lens applied: suppressed base marks are omitted,
// the lens frame and its geometry drawn on top.
inline std::string render_lens_svg(std::span<const ScatterMark> scatter, const LensLayout& lens, const Rect& plot,
                                   const std::vector<int>& base_colors = {}, const Theme& theme = {}) {
  detail::SvgWriter svg(plot.right() + 20, plot.bottom() + 20, theme);
  svg.raw("<g class=\"base\">\n");
  for (const auto& m : visible_base(scatter, lens)) {
    const int c = base_colors.empty() ? 0 : base_colors[m.id];
    svg.raw("<circle class=\"base-mark\" data-id=\"" + std::to_string(m.id) + "\" cx=\"" + detail::num(m.x) +
            "\" cy=\"" + detail::num(m.y) + "\" r=\"" + detail::num(m.size / 2) + "\" fill=\"" +
            detail::xml_escape(theme.color(c)) + "\" fill-opacity=\"0.6\"/>\n");
  }
  svg.raw("</g>\n");
  const Rect& r = lens.region;
  svg.raw("<rect class=\"lens-frame\" x=\"" + detail::num(r.x) + "\" y=\"" + detail::num(r.y) + "\" width=\"" +
          detail::num(r.w) + "\" height=\"" + detail::num(r.h) + "\" fill=\"" + theme.background +
          "\" fill-opacity=\"0.92\" stroke=\"" + theme.ink + "\"/>\n<g class=\"lens\">\n");
  for (const auto& g : lens.groups) {
    for (const auto& m : g.marks) svg.mark(m);
  }
  for (const auto& w : lens.wedges) {
    svg.raw("<path class=\"mark wedge\" data-id=\"" + std::to_string(w.id) + "\" d=\"" + detail::wedge_path(w) +
            "\" fill=\"" + detail::xml_escape(theme.color(w.color_index)) + "\"/>\n");
  }
  svg.raw("</g>\n");
  return svg.finish();
}

}  // namespace gatherplot
