#include <gatherplot/gatherplot.hpp>
#include <gatherplot/http_server.hpp>

#include "CLI11.hpp"

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <iterator>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace gp = gatherplot;

namespace {

constexpr int kDataError = 2;

// Canvas offset of the plot region; leaves room for y brackets and labels.
constexpr double kPlotLeft = 96;
constexpr double kPlotTop = 20;

std::string read_input(const std::string& path) {
  if (path == "-") {
    return {std::istreambuf_iterator<char>(std::cin), std::istreambuf_iterator<char>()};
  }
  std::ifstream in(path, std::ios::binary);
  if (!in) throw gp::error(gp::errc::parameter, "cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_output(const std::string& path, const std::string& content) {
  if (path.empty() || path == "-") {
    std::cout << content;
    std::cout.flush();
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw gp::error(gp::errc::parameter, "cannot write '" + path + "'");
  out << content;
}

std::pair<double, double> parse_size(const std::string& text) {
  auto x = text.find_first_of("xX");
  std::optional<double> w, h;
  if (x != std::string::npos) {
    w = gp::parse_number(std::string_view(text).substr(0, x));
    h = gp::parse_number(std::string_view(text).substr(x + 1));
  }
  if (!w || !h || *w <= 0 || *h <= 0) {
    throw gp::error(gp::errc::parameter, "size must look like WIDTHxHEIGHT, got '" + text + "'");
  }
  return {*w, *h};
}

gp::Rect parse_rect(const std::string& text) {
  std::vector<double> v;
  std::string_view rest = text;
  while (true) {
    auto comma = rest.find(',');
    auto n = gp::parse_number(rest.substr(0, comma));
    if (!n) throw gp::error(gp::errc::parameter, "region must be x,y,width,height, got '" + text + "'");
    v.push_back(*n);
    if (comma == std::string_view::npos) break;
    rest.remove_prefix(comma + 1);
  }
  if (v.size() != 4 || v[2] < 0 || v[3] < 0) {
    throw gp::error(gp::errc::parameter, "region must be x,y,width,height, got '" + text + "'");
  }
  return {v[0], v[1], v[2], v[3]};
}

std::optional<std::string> opt_dim(const std::string& s) {
  if (s.empty()) return std::nullopt;
  return s;
}

struct PlotOptions {
  std::string input;
  std::string x, y, color;
  std::string mode = "auto";
  std::string size = "600x600";
  std::vector<std::string> folds;
  int k = 0;
  std::string policy = "equal";
  std::string output;
  std::string theme;
};

gp::GatherplotSpec plot_spec(const PlotOptions& o, double left, double top) {
  gp::GatherplotSpec spec;
  spec.x_dim = opt_dim(o.x);
  spec.y_dim = opt_dim(o.y);
  spec.color_dim = opt_dim(o.color);
  spec.mode = gp::parse_layout_mode(o.mode);
  auto [w, h] = parse_size(o.size);
  spec.region = {left, top, w, h};
  for (const auto& f : o.folds) {
    auto [key, state] = gp::parse_fold(f);
    if (state == gp::FoldState::Normal) {
      spec.folds.erase(key);
    } else {
      spec.folds[key] = state;
    }
  }
  if (o.k > 0) spec.streamgraph_k = o.k;
  if (o.policy == "equal") {
    spec.policy = gp::SizingPolicy::ConstantMarkEqualSegments;
  } else if (o.policy == "adaptive") {
    spec.policy = gp::SizingPolicy::ConstantMarkDensitySegments;
  } else if (o.policy == "proportional") {
    spec.policy = gp::SizingPolicy::ProportionalMark;
  } else {
    throw gp::error(gp::errc::parameter, "unknown sizing policy '" + o.policy + "'");
  }
  return spec;
}

void add_plot_options(CLI::App* cmd, PlotOptions& o) {
  cmd->add_option("input", o.input, "CSV file, or - for stdin")->required();
  cmd->add_option("--x", o.x, "Dimension on the x axis (omit for undefined)");
  cmd->add_option("--y", o.y, "Dimension on the y axis (omit for undefined)");
  cmd->add_option("--color", o.color, "Dimension mapped to color");
  cmd->add_option("--mode", o.mode, "auto, absolute, normalized or streamgraph")->capture_default_str();
  cmd->add_option("--size", o.size, "Plot region as WIDTHxHEIGHT pixels")->capture_default_str();
  cmd->add_option("--fold", o.folds, "Fold a value: axis=value:state (min, max, normal); repeatable");
  cmd->add_option("--k", o.k, "Streamgraph marks across the shorter cell edge");
  cmd->add_option("--policy", o.policy, "Segment sizing: equal, adaptive or proportional")->capture_default_str();
  cmd->add_option("-o,--output", o.output, "Output file (default stdout)");
}

int run_analyze(const std::string& input, const std::string& xn, const std::string& yn, double mark,
                const std::string& size, bool json) {
  if (!(mark > 0)) throw gp::error(gp::errc::parameter, "mark size must be positive");
  auto data = gp::ingest_csv(read_input(input));
  const auto& dx = data.dimension(xn);
  const auto& dy = data.dimension(yn);
  auto [w, h] = parse_size(size);
  auto tx = gp::scatter_transform(dx, mark / 2, w - mark / 2, mark);
  auto ty = gp::scatter_transform(dy, h - mark / 2, mark / 2, mark);
  std::vector<gp::DataPoint> points(data.size());
  const auto xi = data.index_of(xn), yi = data.index_of(yn);
  for (gp::PointId i = 0; i < data.size(); ++i) points[i] = {data.value(xi, i), data.value(yi, i)};
  auto report = gp::overplotting_index_2d(points, tx, ty);
  if (json) {
    std::cout << gp::to_json(report).dump(2) << '\n';
  } else {
    std::cout << "points:       " << data.size() << '\n'
              << "overlap_x:    " << report.overlap_x << '\n'
              << "overlap_y:    " << report.overlap_y << '\n'
              << "overplotting: " << report.overplotting << '\n';
    if (!report.samples.empty()) {
      std::cout << "samples:     ";
      for (auto [a, b] : report.samples) std::cout << " (" << a << ',' << b << ')';
      std::cout << '\n';
    }
  }
  return 0;
}

struct LensOptions {
  std::string input;
  std::string x, y, group;
  std::string mode = "standard";
  std::string region;
  std::string size = "600x600";
  double mark_size = gp::kDefaultScatterMark;
  bool json = false;
  std::string output;
  std::string theme;
};

int run_lens(const LensOptions& o) {
  auto data = gp::ingest_csv(read_input(o.input));
  auto [w, h] = parse_size(o.size);
  const gp::Rect plot{0, 0, w, h};
  gp::LensSpec spec{parse_rect(o.region), gp::parse_lens_mode(o.mode), o.group};
  auto scatter = gp::scatter_layout(data, o.x, o.y, plot, o.mark_size);
  auto lens = gp::layout_lens(gp::capture(scatter, spec), data, spec);
  if (o.json) {
    write_output(o.output, gp::lens_document(lens).dump(2) + "\n");
    return 0;
  }
  // Base marks take the group's colors so the lens reads as a local view.
  const auto gd = data.index_of(o.group);
  std::vector<int> colors(data.size(), 0);
  if (data.dimension(gd).categorical()) {
    for (gp::PointId i = 0; i < data.size(); ++i) colors[i] = static_cast<int>(data.code(gd, i));
  }
  const gp::Theme theme = o.theme.empty() ? gp::Theme{} : gp::load_theme(o.theme);
  write_output(o.output, gp::render_lens_svg(scatter, lens, plot, colors, theme));
  return 0;
}

int run_serve(std::string bind, std::size_t cap, const std::string& theme_path) {
  auto service = std::make_shared<gp::LayoutService>(cap, theme_path.empty() ? gp::Theme{} : gp::load_theme(theme_path));
  gp::HttpServer server(service);
  auto addr = gp::parse_bind(bind);
  const int port = server.bind(addr);
  std::cerr << "gatherplot service listening on http://" << addr.host << ':' << port << " (dataset cap " << cap
            << ")" << std::endl;
  return server.listen() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Gatherplot layout engine: overlap-free unit visualizations of tabular data"};
  app.require_subcommand(1);

  std::string a_input, a_x, a_y, a_size = "600x600";
  double a_mark = 4.0;
  bool a_json = false;
  auto* analyze = app.add_subcommand("analyze", "Report overlap and overplotting of a plain scatterplot");
  analyze->add_option("input", a_input, "CSV file, or - for stdin")->required();
  analyze->add_option("--x", a_x, "Dimension on the x axis")->required();
  analyze->add_option("--y", a_y, "Dimension on the y axis")->required();
  analyze->add_option("--mark-size", a_mark, "Mark size in pixels")->capture_default_str();
  analyze->add_option("--size", a_size, "Plot region as WIDTHxHEIGHT pixels")->capture_default_str();
  analyze->add_flag("--json", a_json, "Print the report as JSON");

  PlotOptions p;
  auto* plot = app.add_subcommand("plot", "Render a gatherplot to SVG");
  add_plot_options(plot, p);
  plot->add_option("--theme", p.theme, "Theme file (.json or .toml)");

  PlotOptions l;
  auto* layout = app.add_subcommand("layout", "Print gatherplot geometry as JSON");
  add_plot_options(layout, l);

  LensOptions lo;
  auto* lens = app.add_subcommand("lens", "Apply a lens to a scatterplot of two continuous dimensions");
  lens->add_option("input", lo.input, "CSV file, or - for stdin")->required();
  lens->add_option("--x", lo.x, "Continuous dimension on the x axis")->required();
  lens->add_option("--y", lo.y, "Continuous dimension on the y axis")->required();
  lens->add_option("--group", lo.group, "Dimension the lens gathers by")->required();
  lens->add_option("--region", lo.region, "Lens rectangle x,y,width,height in plot pixels")->required();
  lens->add_option("--lens-mode", lo.mode, "standard, histogram or pie")->capture_default_str();
  lens->add_option("--size", lo.size, "Scatterplot size as WIDTHxHEIGHT")->capture_default_str();
  lens->add_option("--mark-size", lo.mark_size, "Scatterplot mark size")->capture_default_str();
  lens->add_flag("--json", lo.json, "Print lens geometry as JSON instead of SVG");
  lens->add_option("-o,--output", lo.output, "Output file (default stdout)");
  lens->add_option("--theme", lo.theme, "Theme file (.json or .toml)");

  std::string d_input;
  auto* describe = app.add_subcommand("describe", "Print the typed dimensions of a CSV file");
  describe->add_option("input", d_input, "CSV file, or - for stdin")->required();

  const char* env_bind = std::getenv("GATHERPLOT_BIND");
  const char* env_cap = std::getenv("GATHERPLOT_DATASET_CAP");
  const char* env_theme = std::getenv("GATHERPLOT_THEME");
  std::string s_bind = env_bind ? env_bind : "127.0.0.1:8080";
  std::size_t s_cap = gp::kDefaultDatasetCap;
  if (env_cap) {
    auto v = gp::parse_number(env_cap);
    if (v && *v >= 1) s_cap = static_cast<std::size_t>(*v);
  }
  std::string s_theme = env_theme ? env_theme : "";
  auto* serve = app.add_subcommand("serve", "Run the HTTP layout service");
  serve->add_option("--bind", s_bind, "host:port to listen on (env GATHERPLOT_BIND)")->capture_default_str();
  serve->add_option("--dataset-cap", s_cap, "Datasets kept in memory (env GATHERPLOT_DATASET_CAP)")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  serve->add_option("--theme", s_theme, "Default theme for SVG responses (env GATHERPLOT_THEME)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*analyze) return run_analyze(a_input, a_x, a_y, a_mark, a_size, a_json);
    if (*plot) {
      auto data = gp::ingest_csv(read_input(p.input));
      const gp::Theme theme = p.theme.empty() ? gp::Theme{} : gp::load_theme(p.theme);
      auto result = gp::layout_gatherplot(data, plot_spec(p, kPlotLeft, kPlotTop));
      write_output(p.output, gp::render_svg(result, theme));
      return 0;
    }
    if (*layout) {
      auto data = gp::ingest_csv(read_input(l.input));
      auto result = gp::layout_gatherplot(data, plot_spec(l, 0, 0));
      write_output(l.output, gp::to_json(result).dump() + "\n");
      return 0;
    }
    if (*lens) return run_lens(lo);
    if (*describe) {
      std::cout << gp::dataset_descriptor(gp::ingest_csv(read_input(d_input))).dump(2) << '\n';
      return 0;
    }
    if (*serve) return run_serve(s_bind, s_cap, s_theme);
  } catch (const gp::error& e) {
    std::cerr << "gatherplot: " << gp::to_string(e.code()) << ": " << e.what() << '\n';
    return kDataError;
  }
  return 0;
}
