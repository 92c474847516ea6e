#include "ixai/server.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>

#include "httplib.h"
#include "ixai/display.hpp"
#include "ixai/error.hpp"
#include "ixai/local.hpp"
#include "ixai/rng.hpp"
#include "ixai/table.hpp"

namespace ixai {

using nlohmann::json;

namespace {

HttpResponse reply(int status, const json& j) { return {status, j.dump() + "\n"}; }

HttpResponse error(int status, const std::string& msg) {
  return reply(status, json{{"error", msg}});
}

HttpResponse not_loaded() { return error(503, "no model bundle loaded"); }

std::vector<double> parse_values(const json& v, const DatasetMeta& meta) {
  const std::size_t d = meta.features.size();
  std::vector<double> x(d);
  if (v.is_array()) {
    if (v.size() != d)
      throw UserError("values must have " + std::to_string(d) + " entries");
    for (std::size_t r = 0; r < d; ++r) {
      if (!v[r].is_number()) throw UserError("values must be numbers");
      x[r] = v[r].get<double>();
    }
  } else if (v.is_object()) {
    for (std::size_t r = 0; r < d; ++r) {
      const auto it = v.find(meta.features[r].name);
      if (it == v.end() || !it->is_number())
        throw UserError("values is missing a number for '" + meta.features[r].name + "'");
      x[r] = it->get<double>();
    }
    if (v.size() != d) throw UserError("values names an unknown attribute");
  } else {
    throw UserError("values must be an array or an object");
  }
  for (std::size_t r = 0; r < d; ++r) {
    if (!std::isfinite(x[r])) throw UserError("values must be finite");
    if (!within_allowed_range(x[r], meta.features[r]))
      throw UserError("value for '" + meta.features[r].name + "' is outside the allowed range");
  }
  return x;
}

std::optional<std::size_t> parse_count(const std::string& s) {
  std::size_t v = 0;
  const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size() || s.empty()) return std::nullopt;
  return v;
}

}  // namespace

bool within_allowed_range(double v, const FeatureMeta& f) {
  double width = f.max - f.min;
  if (!(width > 0.0)) width = std::max(1.0, std::abs(f.min));
  return v >= f.min - 10.0 * width && v <= f.max + 10.0 * width;
}

ExplanationService::ExplanationService(std::shared_ptr<const ModelBundle> bundle)
    : bundle_(std::move(bundle)) {}

HttpResponse ExplanationService::health() const {
  if (!bundle_) return reply(503, json{{"status", "loading"}});
  return reply(200, json{{"status", "ok"}, {"dataset", bundle_->meta.name},
                         {"version", bundle_->version}});
}

HttpResponse ExplanationService::model() const {
  if (!bundle_) return not_loaded();
  const ModelBundle& b = *bundle_;
  json types = json::array();
  for (XaiType t : b.available()) types.push_back(to_string(t));
  json out = {{"version", b.version},
              {"seed", b.seed},
              {"config_hash", b.config_hash},
              {"dataset", to_json(b.meta)},
              {"xai_types", types},
              {"explainers", to_json(b)["explainers"]},
              {"instance_count", b.instances.size()}};
  if (const auto rule = b.rule()) {
    json r = to_json(*rule);
    r["feature"] = b.meta.features[rule->feature_index].name;
    r["text"] = rule_text(*rule, b.meta);
    out["rule"] = std::move(r);
  } else {
    out["rule"] = nullptr;
  }
  return reply(200, out);
}

HttpResponse ExplanationService::explain(const std::string& body) const {
  if (!bundle_) return not_loaded();
  const ModelBundle& b = *bundle_;
  json req;
  try {
    req = json::parse(body);
  } catch (const json::exception&) {
    return error(400, "request body is not valid JSON");
  }
  try {
    if (!req.is_object()) throw UserError("request body must be a JSON object");
    if (!req.contains("xai_type") || !req["xai_type"].is_string())
      throw UserError("xai_type is required");
    const XaiType type = xai_type_from_string(req["xai_type"].get<std::string>());
    if (!b.has(type)) throw UserError("bundle has no " + to_string(type) + " explainer");
    if (!req.contains("values")) throw UserError("values is required");
    const std::vector<double> x = parse_values(req["values"], b.meta);

    FactorOverrides overrides;
    if (req.contains("factor_overrides") && !req["factor_overrides"].is_null()) {
      const json& o = req["factor_overrides"];
      if (!o.is_object()) throw UserError("factor_overrides must be an object");
      for (const auto& [name, v] : o.items()) {
        if (!v.is_number()) throw UserError("override for '" + name + "' must be a number");
        overrides[name] = v.get<double>();
      }
    }

    FittedExplainer model;
    switch (type) {
      case XaiType::kGlobal: model = b.global->model; break;
      case XaiType::kSubglobal: model = *b.subglobal; break;
      case XaiType::kIncremental: model = *b.incremental; break;
      case XaiType::kLocal: {
        LocalConfig cfg = b.local->config;
        cfg.seed = local_seed(b.local->config.seed, x);
        model = fit_local(x, b.forest, b.local->feature_std, cfg).model;
        break;
      }
    }
    const ExplanationTable t =
        build_table(b.meta, type, model, x, b.forest.predict(x), overrides);
    return reply(200, to_json(t));
  } catch (const UserError& e) {
    return error(400, e.what());
  }
}

HttpResponse ExplanationService::instances(
    const std::map<std::string, std::string>& params) const {
  if (!bundle_) return not_loaded();
  const ModelBundle& b = *bundle_;
  std::string filter = "all";
  std::size_t count = 10;
  for (const auto& [k, v] : params) {
    if (k == "subspace") {
      filter = v;
    } else if (k == "count") {
      const auto c = parse_count(v);
      if (!c || *c > 100000) return error(400, "count must be an integer in [0, 100000]");
      count = *c;
    } else {
      return error(400, "unknown parameter '" + k + "'");
    }
  }
  if (filter != "all" && filter != "typical" && filter != "outlier" && filter != "balanced")
    return error(400, "subspace must be one of all, typical, outlier, balanced");
  const auto rule = b.rule();
  if (filter != "all" && !rule) return error(400, "bundle has no partition rule");

  std::vector<std::size_t> typical, outlier, all(b.instances.size());
  for (std::size_t i = 0; i < b.instances.size(); ++i) {
    all[i] = i;
    if (rule) (subspace_of(*rule, b.instances[i]) == Subspace::kTypical ? typical : outlier).push_back(i);
  }
  // Each pool gets its own seeded shuffle; the first k of it are returned.
  auto take = [&](std::vector<std::size_t> pool, std::size_t k, std::uint64_t stream) {
    Rng rng(mix_seed(b.seed, stream));
    shuffle(pool, rng);
    pool.resize(std::min(k, pool.size()));
    return pool;
  };
  std::vector<std::size_t> picked;
  if (filter == "all") picked = take(all, count, 1);
  if (filter == "typical") picked = take(typical, count, 2);
  if (filter == "outlier") picked = take(outlier, count, 3);
  if (filter == "balanced") {
    picked = take(typical, count - count / 2, 2);
    const auto o = take(outlier, count / 2, 3);
    picked.insert(picked.end(), o.begin(), o.end());
  }

  json list = json::array();
  for (std::size_t i : picked) {
    const std::vector<double>& x = b.instances[i];
    const double pred = b.forest.predict(x) * b.meta.display_scale;
    json item = {{"index", i},
                 {"values", x},
                 {"prediction", {{"full", pred},
                                 {"display", round_display(pred, DisplayRole::kEstimate)}}}};
    if (rule) item["subspace"] = to_string(subspace_of(*rule, x));
    list.push_back(std::move(item));
  }
  return reply(200, json{{"subspace", filter}, {"count", list.size()}, {"instances", list}});
}

struct HttpServer::Impl {
  ExplanationService service;
  ServerOptions options;
  httplib::Server server;
  int port = -1;
};

HttpServer::HttpServer(std::shared_ptr<const ModelBundle> bundle, ServerOptions options)
    : impl_(std::make_unique<Impl>()) {
  impl_->service = ExplanationService(std::move(bundle));
  impl_->options = std::move(options);
  auto& srv = impl_->server;
  // httplib's default adds SO_REUSEPORT, which lets a second server share a busy port.
  srv.set_socket_options([](socket_t sock) {
    int yes = 1;
    setsockopt(sock, SOL_SOCKET, SO_REUSEADDR, reinterpret_cast<const void*>(&yes), sizeof(yes));
  });
  const ExplanationService* svc = &impl_->service;
  auto send = [](httplib::Response& res, const HttpResponse& r) {
    res.status = r.status;
    res.set_content(r.body, "application/json");
  };
  srv.Get("/api/health",
          [=](const httplib::Request&, httplib::Response& res) { send(res, svc->health()); });
  srv.Get("/api/model",
          [=](const httplib::Request&, httplib::Response& res) { send(res, svc->model()); });
  srv.Post("/api/explain", [=](const httplib::Request& req, httplib::Response& res) {
    send(res, svc->explain(req.body));
  });
  srv.Get("/api/instances", [=](const httplib::Request& req, httplib::Response& res) {
    std::map<std::string, std::string> params;
    for (const auto& [k, v] : req.params) params[k] = v;
    send(res, svc->instances(params));
  });
  if (!impl_->options.static_dir.empty() &&
      !srv.set_mount_point("/", impl_->options.static_dir.string()))
    throw UserError("static directory " + impl_->options.static_dir.string() + " not found");
}

HttpServer::~HttpServer() = default;

int HttpServer::bind() {
  auto& o = impl_->options;
  if (o.port == 0) {
    impl_->port = impl_->server.bind_to_any_port(o.host);
  } else {
    impl_->port = impl_->server.bind_to_port(o.host, o.port) ? o.port : -1;
  }
  if (impl_->port < 0)
    throw EnvironmentError("cannot bind " + o.host + ":" + std::to_string(o.port) +
                           " (port in use?)");
  return impl_->port;
}

void HttpServer::listen() {
  if (impl_->port < 0) bind();
  impl_->server.listen_after_bind();
}

void HttpServer::stop() { impl_->server.stop(); }

}  // namespace ixai
