#pragma once

// Transport-independent layout service: an LRU store of immutable datasets
// plus request routing. http_server.hpp binds it to sockets.

#include <gatherplot/data_model.hpp>
#include <gatherplot/error.hpp>
#include <gatherplot/json_io.hpp>
#include <gatherplot/layout.hpp>
#include <gatherplot/lens.hpp>
#include <gatherplot/svg.hpp>

#include <cstdio>
#include <list>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

namespace gatherplot {

inline constexpr std::size_t kDefaultDatasetCap = 16;

struct StoredDataset {
  std::string id;
  std::string name;
  std::shared_ptr<const Dataset> data;
};

class DatasetStore {
 public:
  explicit DatasetStore(std::size_t cap = kDefaultDatasetCap) : cap_(cap) {
    if (cap_ == 0) throw error(errc::parameter, "dataset cap must be at least 1");
  }

  StoredDataset add(Dataset data, std::string name) {
    std::lock_guard lock(mu_);
    char buf[32];
    std::snprintf(buf, sizeof buf, "ds-%06llu", static_cast<unsigned long long>(++counter_));
    StoredDataset entry{buf, std::move(name), std::make_shared<const Dataset>(std::move(data))};
    order_.push_front(entry.id);
    entries_.emplace(entry.id, Slot{entry, order_.begin()});
    while (entries_.size() > cap_) {
      entries_.erase(order_.back());
      order_.pop_back();
    }
    return entry;
  }

  // Lookup counts as use for eviction order.
  std::optional<StoredDataset> get(const std::string& id) {
    std::lock_guard lock(mu_);
    auto it = entries_.find(id);
    if (it == entries_.end()) return std::nullopt;
    order_.splice(order_.begin(), order_, it->second.pos);
    return it->second.entry;
  }

  bool erase(const std::string& id) {
    std::lock_guard lock(mu_);
    auto it = entries_.find(id);
    if (it == entries_.end()) return false;
    order_.erase(it->second.pos);
    entries_.erase(it);
    return true;
  }

  std::size_t size() const {
    std::lock_guard lock(mu_);
    return entries_.size();
  }

  std::size_t cap() const noexcept { return cap_; }

 private:
  struct Slot {
    StoredDataset entry;
    std::list<std::string>::iterator pos;
  };
  std::size_t cap_;
  unsigned long long counter_ = 0;
  mutable std::mutex mu_;
  std::list<std::string> order_;  // most recent first
  std::unordered_map<std::string, Slot> entries_;
};

struct Request {
  std::string method;
  std::string path;
  std::multimap<std::string, std::string> query;
  std::string body;

  std::optional<std::string> param(const std::string& key) const {
    auto it = query.find(key);
    if (it == query.end()) return std::nullopt;
    return it->second;
  }
};

struct Response {
  int status = 200;
  std::string content_type = "application/json";
  std::string body;
};

namespace detail {

inline int http_status(errc code) {
  switch (code) {
    case errc::not_found: return 404;
    case errc::capacity: return 422;
    default: return 400;
  }
}

inline Response json_response(int status, const Json& body) { return {status, "application/json", body.dump()}; }

inline Response error_response(int status, std::string_view code, const std::string& message) {
  return json_response(status, {{"error", {{"code", code}, {"message", message}}}});
}

inline std::vector<std::string> split_path(std::string_view path) {
  std::vector<std::string> parts;
  std::size_t i = 0;
  while (i < path.size()) {
    auto j = path.find('/', i);
    if (j == std::string_view::npos) j = path.size();
    if (j > i) parts.emplace_back(path.substr(i, j - i));
    i = j + 1;
  }
  return parts;
}

inline double number_param(const Request& req, const std::string& key, double fallback) {
  auto v = req.param(key);
  if (!v) return fallback;
  auto n = parse_number(*v);
  if (!n) throw error(errc::parameter, "query parameter '" + key + "' must be a number, got '" + *v + "'");
  return *n;
}

inline std::optional<std::string> dim_param(const Request& req, const std::string& key) {
  auto v = req.param(key);
  if (!v || v->empty()) return std::nullopt;
  return v;
}

template <class T>
T json_field(const Json& body, const char* key, T fallback) {
  if (!body.contains(key) || body[key].is_null()) return fallback;
  try {
    return body[key].get<T>();
  } catch (const nlohmann::json::exception&) {
    throw error(errc::parameter, std::string("field '") + key + "' has the wrong type");
  }
}

}  // namespace detail

// Builds the plot spec for GET /datasets/{id}/layout.
inline GatherplotSpec spec_from_query(const Request& req) {
  GatherplotSpec spec;
  spec.x_dim = detail::dim_param(req, "x");
  spec.y_dim = detail::dim_param(req, "y");
  spec.color_dim = detail::dim_param(req, "color");
  if (auto m = req.param("mode")) spec.mode = parse_layout_mode(*m);
  spec.region = {0, 0, detail::number_param(req, "width", 600), detail::number_param(req, "height", 600)};
  auto [lo, hi] = req.query.equal_range("fold");
  for (auto it = lo; it != hi; ++it) {
    std::string_view list = it->second;
    while (!list.empty()) {
      auto comma = list.find(',');
      auto item = list.substr(0, comma);
      if (!item.empty()) {
        auto [key, state] = parse_fold(item);
        if (state == FoldState::Normal) {
          spec.folds.erase(key);
        } else {
          spec.folds[key] = state;
        }
      }
      if (comma == std::string_view::npos) break;
      list.remove_prefix(comma + 1);
    }
  }
  if (auto k = req.param("k")) {
    const double v = detail::number_param(req, "k", 0);
    if (v < 1 || v != static_cast<int>(v)) throw error(errc::parameter, "k must be a positive integer, got '" + *k + "'");
    spec.streamgraph_k = static_cast<int>(v);
  }
  return spec;
}

class LayoutService {
 public:
  explicit LayoutService(std::size_t dataset_cap = kDefaultDatasetCap, Theme theme = {})
      : store_(dataset_cap), theme_(std::move(theme)) {}

  DatasetStore& store() noexcept { return store_; }

  Response handle(const Request& req) {
    try {
      return route(req);
    } catch (const error& e) {
      return detail::error_response(detail::http_status(e.code()), to_string(e.code()), e.what());
    } catch (const nlohmann::json::exception& e) {
      return detail::error_response(400, "structural", std::string("malformed JSON body: ") + e.what());
    }
  }

 private:
  Response route(const Request& req) {
    auto parts = detail::split_path(req.path);
    if (parts.empty() || parts[0] != "datasets" || parts.size() > 3) {
      return detail::error_response(404, "not_found", "no route for " + req.path);
    }
    if (parts.size() == 1) {
      if (req.method == "POST") return post_dataset(req);
      return detail::error_response(405, "method_not_allowed", req.method + " " + req.path);
    }
    const std::string& id = parts[1];
    if (parts.size() == 2) {
      if (req.method == "GET") return describe(lookup(id));
      if (req.method == "DELETE") {
        if (!store_.erase(id)) throw error(errc::not_found, "unknown dataset '" + id + "'");
        return detail::json_response(200, {{"deleted", id}});
      }
    } else if (parts[2] == "layout" && req.method == "GET") {
      return get_layout(lookup(id), req);
    } else if (parts[2] == "lens" && req.method == "POST") {
      return post_lens(lookup(id), req);
    } else if (parts[2] != "layout" && parts[2] != "lens") {
      return detail::error_response(404, "not_found", "no route for " + req.path);
    }
    return detail::error_response(405, "method_not_allowed", req.method + " " + req.path);
  }

  StoredDataset lookup(const std::string& id) {
    auto entry = store_.get(id);
    if (!entry) throw error(errc::not_found, "unknown dataset '" + id + "'");
    return *entry;
  }

  static Response describe(const StoredDataset& ds, int status = 200) {
    auto j = dataset_descriptor(*ds.data, ds.name);
    Json out = {{"id", ds.id}};
    for (auto it = j.begin(); it != j.end(); ++it) out[it.key()] = it.value();
    return detail::json_response(status, out);
  }

  Response post_dataset(const Request& req) {
    auto data = ingest_csv(req.body);
    auto name = req.param("name").value_or("");
    return describe(store_.add(std::move(data), std::move(name)), 201);
  }

  Response get_layout(const StoredDataset& ds, const Request& req) {
    auto spec = spec_from_query(req);
    auto layout = layout_gatherplot(*ds.data, spec);
    if (req.param("format").value_or("json") == "svg") {
      return {200, "image/svg+xml", render_svg(layout, theme_)};
    }
    return detail::json_response(200, to_json(layout));
  }

  // Body: {"x", "y", "width", "height", "mark_size",
  //        "lens": {"region": {"x","y","width","height"}, "mode", "group"}}
  Response post_lens(const StoredDataset& ds, const Request& req) {
    const auto body = Json::parse(req.body);
    if (!body.is_object()) throw error(errc::parameter, "lens request body must be a JSON object");
    const auto x = detail::json_field<std::string>(body, "x", "");
    const auto y = detail::json_field<std::string>(body, "y", "");
    if (x.empty() || y.empty()) throw error(errc::parameter, "lens request needs scatter axes 'x' and 'y'");
    const Rect plot{0, 0, detail::json_field<double>(body, "width", 600), detail::json_field<double>(body, "height", 600)};
    const double mark = detail::json_field<double>(body, "mark_size", kDefaultScatterMark);
    if (!body.contains("lens") || !body["lens"].is_object()) throw error(errc::parameter, "lens request needs a 'lens' object");
    const auto& lj = body["lens"];
    LensSpec spec;
    if (!lj.contains("region") || !lj["region"].is_object()) throw error(errc::parameter, "lens needs a 'region'");
    const auto& rj = lj["region"];
    spec.region = {detail::json_field<double>(rj, "x", 0), detail::json_field<double>(rj, "y", 0),
                   detail::json_field<double>(rj, "width", 0), detail::json_field<double>(rj, "height", 0)};
    if (spec.region.w < 0 || spec.region.h < 0) throw error(errc::parameter, "lens region size must not be negative");
    spec.mode = parse_lens_mode(detail::json_field<std::string>(lj, "mode", "standard"));
    spec.group_dim = detail::json_field<std::string>(lj, "group", "");
    if (spec.group_dim.empty()) throw error(errc::parameter, "lens needs a 'group' dimension");

    auto scatter = scatter_layout(*ds.data, x, y, plot, mark);
    auto ids = capture(scatter, spec);
    return detail::json_response(200, lens_document(layout_lens(ids, *ds.data, spec)));
  }

  DatasetStore store_;
  Theme theme_;
};

}  // namespace gatherplot
