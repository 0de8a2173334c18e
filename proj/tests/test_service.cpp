#include <gtest/gtest.h>
#include <httplib.h>

#include <array>
#include <cstdio>
#include <filesystem>
#include <future>
#include <sstream>
#include <fstream>
#include <set>
#include <thread>

#include "expleval/events.hpp"
#include "expleval/service.hpp"
#include "expleval/synthetic.hpp"

using namespace expleval;
namespace fs = std::filesystem;

namespace {

const char* kDemographics =
    R"({"age_band":"25-34","gender":"female","education":"master","occupation":"engineer","watch_frequency":"weekly"})";

std::unique_ptr<SessionStore> make_store(const fs::path& log) {
  return std::make_unique<SessionStore>(synthetic_dataset(), RecommenderConfig{}, PhraseTable::defaults(), log, 11,
                                        true, 1700000000000);
}

class ServiceTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("expleval-service-" + std::to_string(::getpid()) + "-" +
            ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::remove_all(dir_);
    fs::create_directories(dir_);
    start();
  }

  void TearDown() override {
    stop();
    fs::remove_all(dir_);
  }

  void start() {
    store_ = make_store(dir_ / "events.ndjson");
    service_ = std::make_unique<StudyService>(*store_, WeightVector::equal(6));
    server_ = std::make_unique<HttpServer>(*service_);
    std::promise<int> port;
    auto bound = port.get_future();
    thread_ = std::thread([&] { server_->run("127.0.0.1", 0, [&](int p) { port.set_value(p); }); });
    client_ = std::make_unique<httplib::Client>("127.0.0.1", bound.get());
  }

  void stop() {
    server_->stop();
    thread_.join();
    client_.reset();
    server_.reset();
    service_.reset();
    store_.reset();
  }

  httplib::Result post(const std::string& path, const std::string& body, const std::string& key = "") {
    httplib::Headers h;
    if (!key.empty()) h.emplace("Idempotency-Key", key);
    return client_->Post(path, h, body, "application/json");
  }

  Json get_json(const std::string& path) {
    auto res = client_->Get(path);
    EXPECT_TRUE(res);
    EXPECT_EQ(res->status, 200) << res->body;
    return Json::parse(res->body);
  }

  std::string create() {
    auto res = post("/sessions", kDemographics);
    EXPECT_EQ(res->status, 201);
    return Json::parse(res->body).at("session_id").get<std::string>();
  }

  /// Answers every task GET /next hands out; returns the explanation views seen.
  std::vector<Json> complete(const std::string& id) {
    std::vector<Json> explanation_views;
    const auto base = "/sessions/" + id;
    for (int guard = 0; guard < 100; ++guard) {
      const auto task = get_json(base + "/next");
      const auto phase = task.at("phase").get<std::string>();
      httplib::Result res;
      if (phase == "SeedRating") {
        res = post(base + "/seed-ratings", Json{{"task_index", task["task_index"]}, {"score", 3}}.dump());
      } else if (phase == "Trials" && task["view"] == "explanation") {
        explanation_views.push_back(task);
        res = post(base + "/trials/" + task["trial_index"].dump() + "/explanation-rating",
                   R"({"r":4,"t_ms":5000})");
      } else if (phase == "Trials") {
        res = post(base + "/trials/" + task["trial_index"].dump() + "/detail-rating", R"({"r_prime":4})");
      } else if (phase == "Questionnaire") {
        res = post(base + "/likert", Json{{"style", task["style"]}, {"metric", task["metric"]}, {"score", 4}}.dump());
      } else {
        return explanation_views;
      }
      EXPECT_EQ(res->status, 200) << res->body;
    }
    ADD_FAILURE() << "session did not complete";
    return explanation_views;
  }

  fs::path dir_;
  std::unique_ptr<SessionStore> store_;
  std::unique_ptr<StudyService> service_;
  std::unique_ptr<HttpServer> server_;
  std::thread thread_;
  std::unique_ptr<httplib::Client> client_;
};

std::pair<int, std::string> run(const std::string& cmd) {
  std::string out;
  FILE* p = ::popen(cmd.c_str(), "r");
  std::array<char, 4096> buf{};
  while (auto n = std::fread(buf.data(), 1, buf.size(), p)) out.append(buf.data(), n);
  const int status = ::pclose(p);
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, out};
}

}  // namespace

TEST_F(ServiceTest, CreateReturnsFirstSeedTask) {
  auto res = post("/sessions", kDemographics);
  ASSERT_EQ(res->status, 201);
  const auto j = Json::parse(res->body);
  EXPECT_FALSE(j.at("session_id").get<std::string>().empty());
  EXPECT_EQ(j["task"]["phase"], "SeedRating");
  EXPECT_EQ(j["task"]["task_index"], 0);
  EXPECT_EQ(j["task"]["of"], 12);
  EXPECT_TRUE(j["task"]["movie"].contains("title"));
}

TEST_F(ServiceTest, MalformedRequests) {
  EXPECT_EQ(post("/sessions", "")->status, 422);
  EXPECT_EQ(post("/sessions", "{not json")->status, 422);
  EXPECT_EQ(post("/sessions", R"({"age_band":"25-34"})")->status, 422);
  const auto id = create();
  EXPECT_EQ(post("/sessions/" + id + "/seed-ratings", R"({"task_index":0,"score":9})")->status, 422);
  EXPECT_EQ(post("/sessions/" + id + "/seed-ratings", R"({"task_index":0})")->status, 422);
  EXPECT_EQ(client_->Get("/sessions/nope/next")->status, 404);
  EXPECT_EQ(post("/sessions/nope/likert", R"({"style":"Avg","metric":"Trust","score":3})")->status, 404);
}

TEST_F(ServiceTest, OrderViolationsConflict) {
  const auto id = create();
  EXPECT_EQ(post("/sessions/" + id + "/trials/0/detail-rating", R"({"r_prime":4})")->status, 409);
  for (int i = 0; i < 12; ++i)
    post("/sessions/" + id + "/seed-ratings", Json{{"task_index", i}, {"score", 3}}.dump());
  EXPECT_EQ(post("/sessions/" + id + "/trials/0/detail-rating", R"({"r_prime":4})")->status, 409);
  EXPECT_EQ(post("/sessions/" + id + "/seed-ratings", R"({"task_index":1,"score":3})")->status, 409);
}

TEST_F(ServiceTest, FullSessionIsBlindedAndExportsSixtyOneEvents) {
  const auto id = create();
  const auto views = complete(id);
  ASSERT_EQ(views.size(), 6u);
  const std::set<std::string> allowed{"phase", "view", "trial_index", "of", "trial_handle", "explanation"};
  for (const auto& v : views) {
    for (const auto& [k, _] : v.items()) EXPECT_TRUE(allowed.contains(k)) << k;
    for (const auto& [k, _] : v["explanation"].items()) EXPECT_TRUE(k == "style" || k == "text") << k;
    const auto movie = store_->context().dataset.movie(store_->snapshot(id).trials[v["trial_index"]].movie_id);
    EXPECT_EQ(v.dump().find(movie.title), std::string::npos);
    EXPECT_EQ(v.dump().find(movie.movie_id + "\""), std::string::npos);
  }
  EXPECT_EQ(get_json("/sessions/" + id + "/next")["phase"], "Complete");
  const auto exported = client_->Get("/export?format=ndjson")->body;
  std::istringstream in(exported);
  const auto events = read_event_log(in);
  EXPECT_EQ(events.size(), 61u);
  EXPECT_TRUE(replay(events).at(id).is_complete());
}

TEST_F(ServiceTest, DetailViewFollowsExplanationRating) {
  const auto id = create();
  for (int i = 0; i < 12; ++i) post("/sessions/" + id + "/seed-ratings", Json{{"task_index", i}, {"score", 3}}.dump());
  EXPECT_EQ(get_json("/sessions/" + id + "/next")["view"], "explanation");
  post("/sessions/" + id + "/trials/0/explanation-rating", R"({"r":4,"t_ms":1200})");
  const auto detail = get_json("/sessions/" + id + "/next");
  EXPECT_EQ(detail["view"], "detail");
  EXPECT_EQ(detail["movie"]["movie_id"], store_->snapshot(id).trials[0].movie_id);
}

TEST_F(ServiceTest, IdempotentWrites) {
  auto a = post("/sessions", kDemographics, "create-1");
  auto b = post("/sessions", kDemographics, "create-1");
  EXPECT_EQ(a->body, b->body);
  const auto id = Json::parse(a->body)["session_id"].get<std::string>();
  auto r1 = post("/sessions/" + id + "/seed-ratings", R"({"task_index":0,"score":5})", "seed-0");
  auto r2 = post("/sessions/" + id + "/seed-ratings", R"({"task_index":0,"score":5})", "seed-0");
  EXPECT_EQ(r1->status, 200);
  EXPECT_EQ(r2->status, 200);
  EXPECT_EQ(r1->body, r2->body);
  std::istringstream in(client_->Get("/export")->body);
  EXPECT_EQ(read_event_log(in).size(), 2u);
}

TEST_F(ServiceTest, ConcurrentCreations) {
  std::vector<std::thread> threads;
  std::vector<std::string> ids(100);
  for (int i = 0; i < 100; ++i) {
    threads.emplace_back([&, i] {
      httplib::Client c(client_->host(), client_->port());
      auto res = c.Post("/sessions", kDemographics, "application/json");
      if (res && res->status == 201) ids[i] = Json::parse(res->body)["session_id"];
    });
  }
  for (auto& t : threads) t.join();
  const std::set<std::string> distinct(ids.begin(), ids.end());
  EXPECT_EQ(distinct.size(), 100u);
  EXPECT_FALSE(distinct.contains(""));
  std::istringstream in(client_->Get("/export")->body);
  EXPECT_EQ(replay(read_event_log(in)).size(), 100u);
}

TEST_F(ServiceTest, RestartPreservesExport) {
  const auto id = create();
  for (int i = 0; i < 5; ++i) post("/sessions/" + id + "/seed-ratings", Json{{"task_index", i}, {"score", 2}}.dump());
  const auto before = client_->Get("/export")->body;
  stop();
  start();
  EXPECT_EQ(client_->Get("/export")->body, before);
  EXPECT_EQ(get_json("/sessions/" + id + "/next")["task_index"], 5);
  complete(id);
  EXPECT_EQ(get_json("/sessions/" + id + "/next")["phase"], "Complete");
}

TEST_F(ServiceTest, AnalysisNeedsCompleteSessions) {
  EXPECT_EQ(client_->Get("/analysis/fuzzy")->status, 409);
  EXPECT_EQ(client_->Get("/analysis/bogus")->status, 404);
  create();
  EXPECT_EQ(client_->Get("/analysis/subjective")->status, 409);
  EXPECT_EQ(client_->Get("/healthz")->status, 200);
}

TEST_F(ServiceTest, AnalysisMatchesCli) {
  complete(create());
  complete(create());
  const auto log = dir_ / "export.ndjson";
  std::ofstream(log) << client_->Get("/export?format=ndjson")->body;
  for (const auto& [table, name] : std::vector<std::pair<std::string, std::string>>{
           {"3", "objective"}, {"4", "subjective"}, {"6", "fuzzy"}}) {
    for (const std::string format : {"text", "json"}) {
      const auto served = client_->Get("/analysis/" + name + "?format=" + format);
      ASSERT_EQ(served->status, 200);
      const auto [code, out] =
          run(std::string(EXPLEVAL_CLI) + " analyze --log " + log.string() + " --table " + table + " --format " + format);
      EXPECT_EQ(code, 0);
      EXPECT_EQ(out, served->body) << name << " " << format;
    }
  }
  const auto subjective = Json::parse(client_->Get("/analysis/subjective")->body);
  EXPECT_FALSE(subjective.empty());
}
