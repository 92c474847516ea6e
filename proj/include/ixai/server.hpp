#pragma once

// HTTP JSON API over an immutable model bundle:
//
//   GET  /api/health                       {"status": "ok", ...}
//   GET  /api/model                        dataset meta, xai types, rule, explainers
//   POST /api/explain                      {"xai_type", "values", "factor_overrides"?}
//                                          -> ExplanationTable JSON
//   GET  /api/instances?subspace=&count=   seeded sample of heldout rows with predictions
//
// Errors are {"error": message} with status 400; every endpoint but health
// answers 503 while no bundle is loaded.

#include <cstddef>
#include <filesystem>
#include <map>
#include <memory>
#include <string>

#include "ixai/bundle.hpp"

namespace ixai {

struct HttpResponse {
  int status = 200;
  std::string body;
};

// Request handling without sockets. Safe to call from many threads at once.
class ExplanationService {
 public:
  ExplanationService() = default;
  explicit ExplanationService(std::shared_ptr<const ModelBundle> bundle);

  HttpResponse health() const;
  HttpResponse model() const;
  HttpResponse explain(const std::string& body) const;
  HttpResponse instances(const std::map<std::string, std::string>& params) const;

 private:
  std::shared_ptr<const ModelBundle> bundle_;
};

// Accepted instance values: within ten range widths of the observed
// [min, max] on either side (a constant feature uses max(1, |min|) as width).
bool within_allowed_range(double v, const FeatureMeta& f);

struct ServerOptions {
  std::string host = "127.0.0.1";
  int port = 8080;
  std::filesystem::path static_dir;  // served at / when set
};

class HttpServer {
 public:
  HttpServer(std::shared_ptr<const ModelBundle> bundle, ServerOptions options);
  ~HttpServer();

  // Binds the socket; throws EnvironmentError when the port is taken.
  // Returns the bound port (useful with port 0).
  int bind();
  // Serves until stop() is called from another thread.
  void listen();
  void stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace ixai
