#include <gtest/gtest.h>
#include <httplib.h>

#include <chrono>
#include <cstdlib>
#include <nlohmann/json.hpp>
#include <thread>

#include "covergen/errors.hpp"
#include "covergen/pipeline.hpp"
#include "covergen/service.hpp"
#include "json_schema.hpp"
#include "test_util.hpp"

using namespace covergen;
using nlohmann::json;

namespace {

void expect_valid(const json& body, const std::string& schema) {
  const auto errors = testing_schema::validate(body, schema);
  EXPECT_TRUE(errors.empty()) << schema << ": " << (errors.empty() ? "" : errors.front());
}

ServiceConfig stub_config(const std::filesystem::path& runs) {
  ServiceConfig c;
  c.listen_port = 0;
  c.run_root = runs;
  c.lexicon_dir = testutil::kFixtureDir;
  c.vocabulary = testutil::kFixtureTitles;
  c.stub = true;
  c.cors_origin = "http://localhost:5173";
  return c;
}

class ServiceTest : public ::testing::Test {
 protected:
  void SetUp() override {
    service_ = std::make_unique<Service>(stub_config(dir_.path() / "runs"));
    port_ = service_->start();
    client_ = std::make_unique<httplib::Client>("127.0.0.1", port_);
    client_->set_read_timeout(30, 0);
  }
  void TearDown() override { service_->stop(); }

  httplib::Result post(const std::string& path, const json& body) {
    return client_->Post(path, body.dump(), "application/json");
  }

  testutil::TempDir dir_;
  std::unique_ptr<Service> service_;
  std::unique_ptr<httplib::Client> client_;
  int port_ = 0;
};

}  // namespace

TEST(ServiceConfigTest, JsonRoundTripAndRelativePaths) {
  const auto c = ServiceConfig::from_json(R"({"listen":"0.0.0.0:9000","run_root":"r","lexicon_dir":"lex",
      "vocabulary":"v.txt","generator":"http://g:1","discriminator":"http://d:2","default_top_k":3})",
                                          "/base");
  EXPECT_EQ(c.listen_host, "0.0.0.0");
  EXPECT_EQ(c.listen_port, 9000);
  EXPECT_EQ(c.run_root, std::filesystem::path("/base/r"));
  EXPECT_EQ(c.generator->port, 1);
  EXPECT_EQ(c.default_top_k, 3);
  EXPECT_FALSE(c.stub);
  const auto again = ServiceConfig::from_json(c.to_json());
  EXPECT_EQ(again.to_json(), c.to_json());
  EXPECT_THROW(ServiceConfig::from_json("[]"), InputError);
  EXPECT_THROW(ServiceConfig::from_json(R"({"listen":"nope"})"), InputError);
}

TEST(ServiceConfigTest, ValidationRules) {
  testutil::TempDir dir;
  auto c = stub_config(dir.path());
  EXPECT_NO_THROW(validate(c));
  c.stub = false;
  EXPECT_THROW(validate(c), InputError);
  c.generator = HttpEndpoint::parse("http://127.0.0.1:1");
  c.discriminator = c.generator;
  EXPECT_NO_THROW(validate(c));
  c.lexicon_dir = dir.path() / "missing";
  EXPECT_THROW(validate(c), InputError);
}

TEST(ServiceConfigTest, EnvironmentOverridesConfigPath) {
  ::setenv("COVERGEN_CONFIG", "/from/env.json", 1);
  EXPECT_EQ(resolve_config_path("local.json"), std::filesystem::path("/from/env.json"));
  ::unsetenv("COVERGEN_CONFIG");
  EXPECT_EQ(resolve_config_path("local.json"), std::filesystem::path("local.json"));
}

TEST_F(ServiceTest, CreateRunLostAtSea) {
  const auto started = std::chrono::steady_clock::now();
  auto res = post("/api/runs", {{"title", "Lost at sea"}, {"num_variants", 9}, {"top_k", 6}});
  const auto elapsed = std::chrono::steady_clock::now() - started;
  ASSERT_TRUE(res);
  ASSERT_EQ(res->status, 201) << res->body;
  EXPECT_LT(elapsed, std::chrono::seconds(5));
  const auto body = json::parse(res->body);
  expect_valid(body, "run_response.schema.json");
  ASSERT_EQ(body["covers"].size(), 10u);
  int kept = 0;
  for (const auto& c : body["covers"]) kept += c["kept"].get<bool>();
  EXPECT_EQ(kept, 6);
  EXPECT_EQ(res->get_header_value("Access-Control-Allow-Origin"), "http://localhost:5173");
  for (const auto& url : body["image_urls"]) {
    auto img = client_->Get(url.get<std::string>());
    ASSERT_TRUE(img);
    EXPECT_EQ(img->status, 200) << url;
    EXPECT_EQ(img->get_header_value("Content-Type"), "image/png");
  }
}

TEST_F(ServiceTest, CreateRunValidation) {
  auto res = post("/api/runs", {{"title", ""}});
  ASSERT_TRUE(res);
  EXPECT_EQ(res->status, 400);
  expect_valid(json::parse(res->body), "error.schema.json");
  EXPECT_EQ(post("/api/runs", {{"title", "x"}, {"top_k", 0}})->status, 400);
  EXPECT_EQ(post("/api/runs", {{"title", "x"}, {"num_variants", -2}})->status, 400);
  EXPECT_EQ(post("/api/runs", {{"title", 5}})->status, 400);
  EXPECT_EQ(client_->Post("/api/runs", "not json", "application/json")->status, 400);
}

TEST_F(ServiceTest, ZeroVariantsGivesOneCover) {
  auto res = post("/api/runs", {{"title", "Dragon Fire"}, {"num_variants", 0}});
  ASSERT_EQ(res->status, 201);
  EXPECT_EQ(json::parse(res->body)["covers"].size(), 1u);
}

TEST_F(ServiceTest, GetRunMatchesPersistedFile) {
  const auto created = json::parse(post("/api/runs", {{"title", "Dark night"}, {"seed", 3}})->body);
  const auto id = created["run_id"].get<std::string>();
  auto res = client_->Get("/api/runs/" + id);
  ASSERT_EQ(res->status, 200);
  auto body = json::parse(res->body);
  expect_valid(body, "run_response.schema.json");
  body.erase("image_urls");
  const auto on_disk = json::parse(testutil::read_file(dir_.path() / "runs" / id / "manifest.json"));
  EXPECT_EQ(body, on_disk);

  const auto covers = on_disk["covers"].size();
  EXPECT_EQ(client_->Get("/api/runs/" + id + "/images/" + std::to_string(covers))->status, 404);
  EXPECT_EQ(client_->Get("/api/runs/" + id + "/images/0")->status, 200);
  EXPECT_EQ(client_->Get("/api/runs/" + new_run_id())->status, 404);
  EXPECT_EQ(client_->Get("/api/runs/garbage")->status, 404);
}

TEST_F(ServiceTest, ListRuns) {
  post("/api/runs", {{"title", "Dark night"}, {"num_variants", 1}});
  post("/api/runs", {{"title", "Dragon Fire"}, {"num_variants", 1}});
  auto res = client_->Get("/api/runs");
  ASSERT_EQ(res->status, 200);
  const auto body = json::parse(res->body);
  expect_valid(body, "run_list.schema.json");
  EXPECT_EQ(body["runs"].size(), 2u);
}

TEST_F(ServiceTest, AugmentTitles) {
  auto res = post("/api/titles/augment", {{"title", "Adventure in a forest"}, {"count", 2}, {"seed", 7}});
  ASSERT_EQ(res->status, 200) << res->body;
  const auto body = json::parse(res->body);
  expect_valid(body, "augment_response.schema.json");
  ASSERT_EQ(body["candidates"].size(), 2u);
  for (const auto& c : body["candidates"]) {
    EXPECT_EQ(c["tokens"][1], "in");
    EXPECT_EQ(c["tokens"][2], "a");
    EXPECT_EQ(c["provenance"][1], "original");
  }

  res = post("/api/titles/augment", {{"title", "In and Out"}});
  ASSERT_EQ(res->status, 200);
  EXPECT_TRUE(json::parse(res->body)["candidates"].empty());

  EXPECT_EQ(post("/api/titles/augment", {{"title", "Dark night"}, {"count", 0}})->status, 400);
  EXPECT_EQ(post("/api/titles/augment", {{"title", ""}})->status, 400);
}

TEST_F(ServiceTest, HealthAndCorsPreflight) {
  auto res = client_->Get("/api/health");
  ASSERT_EQ(res->status, 200);
  expect_valid(json::parse(res->body), "service_health.schema.json");
  auto pre = client_->Options("/api/runs");
  ASSERT_TRUE(pre);
  EXPECT_EQ(pre->status, 204);
  EXPECT_EQ(pre->get_header_value("Access-Control-Allow-Origin"), "http://localhost:5173");
}

TEST_F(ServiceTest, ConcurrentRunsAreIndependent) {
  std::vector<std::thread> threads;
  std::vector<int> statuses(4);
  for (int i = 0; i < 4; ++i) {
    threads.emplace_back([&, i] {
      httplib::Client cli("127.0.0.1", port_);
      cli.set_read_timeout(30, 0);
      auto r = cli.Post("/api/runs", json{{"title", "Lost at sea"}, {"seed", i}}.dump(), "application/json");
      statuses[static_cast<std::size_t>(i)] = r ? r->status : -1;
    });
  }
  for (auto& t : threads) t.join();
  for (int s : statuses) EXPECT_EQ(s, 201);
  EXPECT_EQ(list_runs(dir_.path() / "runs").size(), 4u);
}

TEST(ServiceBackendFailure, UnreachableModelGives502WithPartialManifest) {
  testutil::TempDir dir;
  auto c = stub_config(dir.path() / "runs");
  c.stub = false;
  HttpEndpoint dead;
  dead.host = "127.0.0.1";
  dead.port = 1;
  dead.timeout_seconds = 1;
  c.generator = dead;
  c.discriminator = dead;
  Service service(c);
  const int port = service.start();
  httplib::Client cli("127.0.0.1", port);
  cli.set_read_timeout(30, 0);
  auto res = cli.Post("/api/runs", R"({"title":"Dark night","num_variants":1})", "application/json");
  ASSERT_TRUE(res);
  EXPECT_EQ(res->status, 502);
  const auto body = json::parse(res->body);
  expect_valid(body, "run_failed.schema.json");
  auto manifest = cli.Get(body["manifest_url"].get<std::string>());
  ASSERT_EQ(manifest->status, 200);
  const auto m = json::parse(manifest->body);
  EXPECT_EQ(m["status"], "failed");
  expect_valid(m, "run_response.schema.json");
  service.stop();
}
