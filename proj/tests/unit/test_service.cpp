#include <gtest/gtest.h>

#include <filesystem>
#include <random>
#include <thread>

#include "httplib.h"
#include "ixai/bundle.hpp"
#include "ixai/error.hpp"
#include "ixai/server.hpp"
#include "ixai/study.hpp"
#include "json.hpp"
#include "oracles.hpp"

using namespace ixai;
using nlohmann::json;

namespace {

struct Fixture {
  Dataset data;
  std::shared_ptr<const ModelBundle> bundle;
};

// One small study shared by every test in this file.
const Fixture& fixture() {
  static const Fixture f = [] {
    std::mt19937_64 gen(21);
    FeatureMatrix X = oracle::random_matrix(300, 4, gen, 0.0, 10.0);
    std::vector<double> y(300);
    for (std::size_t i = 0; i < 300; ++i)
      y[i] = 1.0 + X(i, 0) + (X(i, 1) >= 6.0 ? 5.0 : 0.5) * X(i, 1) - 0.5 * X(i, 3);
    Fixture out;
    out.data = make_dataset("toy", std::move(X), std::move(y));
    StudyConfig c;
    c.seed = 3;
    c.forest.n_trees = 15;
    c.local.n_samples = 150;
    c.local_eval_cap = 10;
    c.folds = 2;
    out.bundle = std::make_shared<const ModelBundle>(
        make_bundle(run_modeling_study(out.data, c), out.data));
    return out;
  }();
  return f;
}

json body(const HttpResponse& r) { return json::parse(r.body); }

std::string explain_request(const std::string& type, const std::vector<double>& x,
                            const json& overrides = nullptr) {
  json j = {{"xai_type", type}, {"values", x}};
  if (!overrides.is_null()) j["factor_overrides"] = overrides;
  return j.dump();
}

}  // namespace

TEST(Bundle, JsonRoundTrip) {
  const ModelBundle& b = *fixture().bundle;
  const json j = to_json(b);
  const ModelBundle back = bundle_from_json(j);
  EXPECT_EQ(to_json(back), j);
  EXPECT_EQ(back.available().size(), 4u);
  for (const auto& x : b.instances) EXPECT_DOUBLE_EQ(back.forest.predict(x), b.forest.predict(x));
}

TEST(Bundle, SaveRefusesOverwriteAndLoadRejectsGarbage) {
  const auto dir = std::filesystem::temp_directory_path() / "ixai_bundle_test";
  std::filesystem::create_directories(dir);
  const auto path = dir / "bundle.json";
  std::filesystem::remove(path);
  save_bundle(*fixture().bundle, path, false);
  EXPECT_THROW(save_bundle(*fixture().bundle, path, false), UserError);
  EXPECT_NO_THROW(load_bundle(path));

  json j = to_json(*fixture().bundle);
  j["forest"]["trees"][0][0] = json::array({0, 1.0, 99, 100, 0.0});
  EXPECT_THROW(bundle_from_json(j), UserError);
  j = to_json(*fixture().bundle);
  j["explainers"][0]["model"]["factors"].push_back(1.0);
  EXPECT_THROW(bundle_from_json(j), UserError);
  EXPECT_THROW(bundle_from_json(json::object()), UserError);
  EXPECT_THROW(load_bundle(dir / "missing.json"), UserError);
  std::filesystem::remove_all(dir);
}

TEST(Service, NoBundleIsUnavailable) {
  const ExplanationService s;
  EXPECT_EQ(s.health().status, 503);
  EXPECT_EQ(body(s.health())["status"], "loading");
  EXPECT_EQ(s.model().status, 503);
  EXPECT_EQ(s.explain("{}").status, 503);
  EXPECT_EQ(s.instances({}).status, 503);
}

TEST(Service, HealthAndModel) {
  const ExplanationService s(fixture().bundle);
  EXPECT_EQ(s.health().status, 200);
  const json m = body(s.model());
  EXPECT_EQ(m["dataset"]["features"].size(), 4u);
  EXPECT_EQ(m["xai_types"].size(), 4u);
  EXPECT_TRUE(m["rule"].contains("text"));
}

TEST(Service, ExplainMatchesTheBundle) {
  const ExplanationService s(fixture().bundle);
  const ModelBundle& b = *fixture().bundle;
  const std::vector<double> x = b.instances[0];
  const HttpResponse r = s.explain(explain_request("incremental", x));
  ASSERT_EQ(r.status, 200) << r.body;
  const json t = body(r);
  EXPECT_DOUBLE_EQ(t["explainer_estimate"]["full"].get<double>(), b.incremental->estimate(x));
  EXPECT_DOUBLE_EQ(t["predictor_prediction"]["full"].get<double>(), b.forest.predict(x));

  json named = json::object();
  for (std::size_t r2 = 0; r2 < 4; ++r2) named[b.meta.features[r2].name] = x[r2];
  const HttpResponse r3 = s.explain(json{{"xai_type", "incremental"}, {"values", named}}.dump());
  EXPECT_EQ(r3.body, r.body);

  // Local is refit per request but seeded by the instance.
  EXPECT_EQ(s.explain(explain_request("local", x)).body, s.explain(explain_request("local", x)).body);
}

TEST(Service, WhatIfOnlyMovesTheEstimate) {
  const ExplanationService s(fixture().bundle);
  const std::vector<double> x = fixture().bundle->instances[1];
  const json a = body(s.explain(explain_request("global", x)));
  const std::string name = fixture().bundle->meta.features[2].name;
  const double f = a["rows"][2]["factor_full"].get<double>();
  const json w = body(s.explain(explain_request("global", x, {{name, f + 1.0}})));
  EXPECT_TRUE(w["what_if"].get<bool>());
  EXPECT_NEAR(w["explainer_estimate"]["full"].get<double>() -
                  a["explainer_estimate"]["full"].get<double>(),
              x[2], 1e-9);
  EXPECT_EQ(w["predictor_prediction"], a["predictor_prediction"]);
}

TEST(Service, BadRequestsAre400) {
  const ExplanationService s(fixture().bundle);
  const std::vector<double> ok = fixture().bundle->instances[0];
  EXPECT_EQ(s.explain("not json").status, 400);
  EXPECT_EQ(s.explain("[]").status, 400);
  EXPECT_EQ(s.explain(explain_request("nope", ok)).status, 400);
  EXPECT_EQ(s.explain(explain_request("global", {1.0, 2.0})).status, 400);
  EXPECT_EQ(s.explain(explain_request("global", {1.0, 2.0, 3.0, 1e9})).status, 400);
  EXPECT_EQ(s.explain(explain_request("global", ok, {{"nope", 1.0}})).status, 400);
  EXPECT_EQ(s.explain(explain_request("global", ok, {{"x1", "a"}})).status, 400);
  const HttpResponse r = s.explain(json{{"values", ok}}.dump());
  EXPECT_EQ(r.status, 400);
  EXPECT_TRUE(body(r).contains("error"));
  EXPECT_EQ(s.instances({{"count", "-1"}}).status, 400);
  EXPECT_EQ(s.instances({{"count", "100001"}}).status, 400);
  EXPECT_EQ(s.instances({{"subspace", "odd"}}).status, 400);
  EXPECT_EQ(s.instances({{"colour", "red"}}).status, 400);
}

TEST(Service, AllowedRange) {
  const FeatureMeta f{"a", "", 0.0, 10.0};
  EXPECT_TRUE(within_allowed_range(-100.0, f));
  EXPECT_TRUE(within_allowed_range(110.0, f));
  EXPECT_FALSE(within_allowed_range(110.5, f));
  const FeatureMeta c{"c", "", 5.0, 5.0};
  EXPECT_TRUE(within_allowed_range(55.0, c));
  EXPECT_FALSE(within_allowed_range(56.0, c));
}

TEST(Service, InstancesFilterAndBalance) {
  const ExplanationService s(fixture().bundle);
  const PartitionRule rule = *fixture().bundle->rule();
  for (const char* sub : {"typical", "outlier"}) {
    const json j = body(s.instances({{"subspace", sub}, {"count", "8"}}));
    for (const json& item : j["instances"]) {
      EXPECT_EQ(item["subspace"], sub);
      EXPECT_EQ(to_string(subspace_of(rule, item["values"].get<std::vector<double>>())), sub);
    }
  }
  const json bal = body(s.instances({{"subspace", "balanced"}, {"count", "10"}}));
  std::size_t t = 0, o = 0;
  for (const json& item : bal["instances"]) (item["subspace"] == "typical" ? t : o)++;
  EXPECT_EQ(t, 5u);
  EXPECT_EQ(o, 5u);
  EXPECT_EQ(s.instances({{"count", "7"}}).body, s.instances({{"count", "7"}}).body);
  EXPECT_EQ(body(s.instances({{"count", "100000"}}))["count"],
            fixture().bundle->instances.size());
}

TEST(Server, ServesOverHttpAndRefusesABusyPort) {
  HttpServer server(fixture().bundle, ServerOptions{"127.0.0.1", 0, {}});
  const int port = server.bind();
  ASSERT_GT(port, 0);
  std::thread t([&] { server.listen(); });
  httplib::Client cli("127.0.0.1", port);
  auto res = cli.Get("/api/health");
  ASSERT_TRUE(res);
  EXPECT_EQ(res->status, 200);
  res = cli.Post("/api/explain",
                 explain_request("global", fixture().bundle->instances[0]), "application/json");
  ASSERT_TRUE(res);
  EXPECT_EQ(res->status, 200);

  HttpServer second(fixture().bundle, ServerOptions{"127.0.0.1", port, {}});
  EXPECT_THROW(second.bind(), EnvironmentError);
  server.stop();
  t.join();
}
