#include <gtest/gtest.h>
#include <httplib.h>

#include <filesystem>
#include <sstream>
#include <thread>

#include "spf/cli.hpp"
#include "spf/frontier.hpp"
#include "spf/serialize.hpp"
#include "spf/service.hpp"
#include "spf/synth.hpp"

using namespace spf;

namespace {

std::string pool_csv(std::size_t n = 60) {
  SynthConfig config;
  config.n = n;
  std::ostringstream out;
  write_pool(out, synthesize_pool(config));
  return out.str();
}

std::string spec_json() { return diversity_spec_to_json(default_synthetic_spec()).dump(); }

Json parse(const Response& r) { return Json::parse(r.body); }

std::string open_session(Service& service, std::optional<std::size_t> k = 8) {
  const auto r = service.create_session(pool_csv(), spec_json(), k);
  EXPECT_EQ(r.status, 201) << r.body;
  return parse(r)["session_id"].get<std::string>();
}

}  // namespace

TEST(Service, CreateSessionSummarizesPool) {
  Service service;
  const auto r = service.create_session(pool_csv(), spec_json(), 8);
  ASSERT_EQ(r.status, 201);
  const auto body = parse(r);
  EXPECT_EQ(body["size"], 60);
  EXPECT_EQ(body["schema"].size(), 3u);
  EXPECT_FALSE(body["session_id"].get<std::string>().empty());
}

TEST(Service, CreateSessionErrors) {
  Service service;
  auto r = service.create_session("id,score\na,0.1\na,0.2\n", spec_json());
  EXPECT_EQ(r.status, 400);
  EXPECT_EQ(parse(r)["category"], "duplicate_id");
  r = service.create_session(pool_csv(), R"({"coverage":[{"attribute":"planet","min_distinct":2}]})");
  EXPECT_EQ(r.status, 400);
  EXPECT_EQ(parse(r)["category"], "unknown_attribute");
  r = service.create_session(pool_csv(), "{not json");
  EXPECT_EQ(parse(r)["category"], "invalid_spec");
}

TEST(Service, ScoreColumnFromSpec) {
  Service service;
  const std::string spec = R"({"coverage":[{"attribute":"g","min_distinct":2}],"performance":{"score_field":"rating"}})";
  const auto r = service.create_session("id,rating,g\na,0.5,x\nb,0.25,y\n", spec, 1);
  ASSERT_EQ(r.status, 201) << r.body;
  const auto id = parse(r)["session_id"].get<std::string>();
  const auto f = parse(service.compute_frontier(id, R"({"steps":1})"));
  EXPECT_EQ(f["points"].back()["performance"].get<double>(), 0.5);
}

TEST(Service, FrontierMatchesCoreAndIsCached) {
  Service service;
  const auto id = open_session(service);
  const auto first = service.compute_frontier(id, R"({"steps":10})");
  ASSERT_EQ(first.status, 200) << first.body;
  const auto again = service.compute_frontier(id, R"({"steps":10,"pinned":[],"excluded":[]})");
  EXPECT_EQ(again.body, first.body);

  std::istringstream in(pool_csv());
  const auto pool = load_pool(in);
  const auto direct = build_frontier(pool, default_synthetic_spec(), {}, {8, {}, {}}, {10});
  EXPECT_EQ(first.body, frontier_document(direct));
}

TEST(Service, PinnedApplicantInEveryCohort) {
  Service service;
  const auto id = open_session(service);
  const auto r = service.compute_frontier(id, R"({"k":6,"steps":10,"pinned":["A0013"],"excluded":["A0001"]})");
  ASSERT_EQ(r.status, 200) << r.body;
  const auto f = frontier_from_json(parse(r));
  for (const auto& p : f.points) {
    EXPECT_EQ(p.cohort.size(), 6u);
    EXPECT_TRUE(std::count(p.cohort.begin(), p.cohort.end(), "A0013"));
    EXPECT_FALSE(std::count(p.cohort.begin(), p.cohort.end(), "A0001"));
  }
}

TEST(Service, FrontierErrors) {
  Service service;
  const auto id = open_session(service);
  EXPECT_EQ(service.compute_frontier("nope", "{}").status, 404);
  auto r = service.compute_frontier(id, R"({"pinned":["A0002"],"excluded":["A0002"]})");
  EXPECT_EQ(r.status, 409);
  EXPECT_EQ(parse(r)["category"], "pin_exclude_conflict");
  std::string excluded;
  for (int i = 1; i <= 55; ++i) {
    char buf[8];
    std::snprintf(buf, sizeof buf, "A%04d", i);
    excluded += std::string(i > 1 ? "," : "") + "\"" + buf + "\"";
  }
  r = service.compute_frontier(id, R"({"excluded":[)" + excluded + "]}");
  EXPECT_EQ(r.status, 422);
  EXPECT_EQ(parse(r)["category"], "pool_too_small");
  EXPECT_EQ(service.compute_frontier(id, R"({"steps":0})").status, 422);
  EXPECT_EQ(service.compute_frontier(id, R"({"colour":"red"})").status, 422);
  EXPECT_EQ(service.compute_frontier(id, "not json").status, 400);

  const auto no_k = open_session(service, std::nullopt);
  EXPECT_EQ(service.compute_frontier(no_k, "{}").status, 422);
  EXPECT_EQ(service.compute_frontier(no_k, R"({"k":5,"steps":4})").status, 200);
}

TEST(Service, CohortDetailBreakdownResums) {
  Service service;
  const auto id = open_session(service);
  EXPECT_EQ(service.cohort_detail(id, "0").status, 404);
  const auto f = parse(service.compute_frontier(id, R"({"steps":10})"));
  for (std::size_t i = 0; i < f["points"].size(); ++i) {
    const auto r = service.cohort_detail(id, std::to_string(i));
    ASSERT_EQ(r.status, 200);
    const auto d = parse(r);
    EXPECT_EQ(d["members"].size(), 8u);
    EXPECT_EQ(d["diversity_from_targets"].get<double>(), d["diversity"].get<double>());
    EXPECT_EQ(d["diversity"].get<double>(), f["points"][i]["diversity"].get<double>());
    EXPECT_EQ(d["targets"].size(), 3u);
  }
  EXPECT_EQ(service.cohort_detail(id, std::to_string(f["points"].size())).status, 404);
  EXPECT_EQ(service.cohort_detail(id, "x").status, 404);
}

TEST(Service, GapEndpoint) {
  Service service;
  const auto id = open_session(service);
  auto r = service.gap(id, R"({"cohort":["A0001"]})");
  EXPECT_EQ(r.status, 409);
  const auto f = parse(service.compute_frontier(id, R"({"steps":10})"));
  Json body{{"cohort", f["points"][0]["cohort"]}};
  r = service.gap(id, body.dump());
  ASSERT_EQ(r.status, 200);
  EXPECT_EQ(parse(r)["diversity_gain_abs"].get<double>(), 0.0);
  EXPECT_EQ(parse(r)["performance_gain_abs"].get<double>(), 0.0);

  body["cohort"] = {"A0001", "A0002", "A0003", "A0004", "A0005", "A0006", "A0007", "A0008"};
  r = service.gap(id, body.dump());
  ASSERT_EQ(r.status, 200);
  EXPECT_GE(parse(r)["diversity_gain_abs"].get<double>(), 0.0);
  EXPECT_GE(parse(r)["performance_gain_abs"].get<double>(), 0.0);

  r = service.gap(id, R"({"cohort":["A0001","A0002"]})");
  EXPECT_EQ(r.status, 422);
  EXPECT_EQ(parse(r)["category"], "size_mismatch");
  EXPECT_EQ(parse(service.gap(id, R"({"cohort":["A0001","A0002","A0003","A0004","A0005","A0006","A0007","Z"]})"))["category"],
            "unknown_id");
}

TEST(Service, LargeRequestsBecomeJobs) {
  ServiceOptions options;
  options.job_threshold = 100;
  Service service(options);
  const auto id = open_session(service);
  const auto r = service.compute_frontier(id, R"({"steps":10})");
  ASSERT_EQ(r.status, 202);
  const auto job = parse(r)["job_id"].get<std::string>();
  service.drain();
  const auto status = parse(service.job_status(job));
  ASSERT_EQ(status["status"], "done");
  Service sync;
  const auto sync_id = open_session(sync);
  EXPECT_EQ(status["frontier"], parse(sync.compute_frontier(sync_id, R"({"steps":10})")));
  EXPECT_EQ(service.job_status("missing").status, 404);
  // The finished job filled the cache; the same request is now immediate.
  EXPECT_EQ(service.compute_frontier(id, R"({"steps":10})").status, 200);
}

TEST(Service, SnapshotsRestoreSessions) {
  const auto dir = std::filesystem::temp_directory_path() / ("spf_snap_" + std::to_string(::getpid()));
  std::filesystem::remove_all(dir);
  ServiceOptions options;
  options.snapshot_dir = dir.string();
  std::string id, document;
  {
    Service service(options);
    id = open_session(service);
    document = service.compute_frontier(id, R"({"steps":5,"pinned":["A0004"]})").body;
  }
  Service restored(options);
  EXPECT_EQ(restored.compute_frontier(id, R"({"steps":5,"pinned":["A0004"]})").body, document);
  std::filesystem::remove_all(dir);
}

TEST(Service, ComputationDoesNotMutatePool) {
  Service service;
  const auto id = open_session(service);
  const auto before = service.compute_frontier(id, R"({"steps":4})").body;
  service.compute_frontier(id, R"({"steps":4,"excluded":["A0002","A0003"]})");
  EXPECT_EQ(service.compute_frontier(id, R"({"steps":4})").body, before);
  EXPECT_EQ(parse(service.cohort_detail(id, "0"))["members"].size(), 8u);
}

TEST(Service, CliAndServiceProduceIdenticalBytes) {
  const auto dir = std::filesystem::temp_directory_path() / ("spf_golden_" + std::to_string(::getpid()));
  std::filesystem::create_directories(dir);
  const auto pool_path = (dir / "pool.csv").string(), spec_path = (dir / "spec.json").string(),
             out_path = (dir / "f.json").string();
  write_text_file(pool_path, pool_csv());
  write_text_file(spec_path, spec_json());
  std::ostringstream out, err;
  ASSERT_EQ(run_cli({"frontier", "--pool", pool_path, "--spec", spec_path, "--k", "8", "--steps", "10", "--out", out_path},
                    out, err),
            0);
  Service service;
  const auto id = open_session(service);
  EXPECT_EQ(service.compute_frontier(id, R"({"steps":10})").body, read_text_file(out_path));
  std::filesystem::remove_all(dir);
}

class HttpTest : public ::testing::Test {
 protected:
  void SetUp() override {
    service_.mount(server_);
    port_ = server_.bind_to_any_port("127.0.0.1");
    ASSERT_GT(port_, 0);
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }
  void TearDown() override {
    server_.stop();
    thread_.join();
  }
  httplib::Client client() const { return httplib::Client("127.0.0.1", port_); }

  Service service_;
  httplib::Server server_;
  int port_ = 0;
  std::thread thread_;
};

TEST_F(HttpTest, EndToEnd) {
  auto cli = client();
  httplib::MultipartFormDataItems items = {
      {"pool", pool_csv(), "pool.csv", "text/csv"},
      {"spec", spec_json(), "spec.json", "application/json"},
      {"k", "8", "", ""},
  };
  auto res = cli.Post("/pools", items);
  ASSERT_TRUE(res);
  ASSERT_EQ(res->status, 201) << res->body;
  EXPECT_EQ(res->get_header_value("Content-Type"), "application/json");
  const auto id = Json::parse(res->body)["session_id"].get<std::string>();

  res = cli.Post("/sessions/" + id + "/frontier", R"({"steps":10})", "application/json");
  ASSERT_TRUE(res);
  ASSERT_EQ(res->status, 200);
  const auto f = Json::parse(res->body);
  EXPECT_GE(f["points"].size(), 1u);

  res = cli.Get("/sessions/" + id + "/frontier/0/cohort");
  ASSERT_TRUE(res);
  EXPECT_EQ(res->status, 200);

  Json gap{{"cohort", f["points"][0]["cohort"]}};
  res = cli.Post("/sessions/" + id + "/gap", gap.dump(), "application/json");
  ASSERT_TRUE(res);
  EXPECT_EQ(res->status, 200);

  res = cli.Post("/sessions/unknown/frontier", "{}", "application/json");
  ASSERT_TRUE(res);
  EXPECT_EQ(res->status, 404);
  EXPECT_EQ(Json::parse(res->body)["category"], "unknown_session");
}

TEST_F(HttpTest, JsonUploadAndContentNegotiation) {
  auto cli = client();
  Json body{{"pool", pool_csv()}, {"spec", Json::parse(spec_json())}, {"k", 8}};
  auto res = cli.Post("/pools", body.dump(), "application/json");
  ASSERT_TRUE(res);
  EXPECT_EQ(res->status, 201);

  res = cli.Post("/pools", R"({"pool":"id,score\n"})", "application/json");
  ASSERT_TRUE(res);
  EXPECT_EQ(res->status, 422);

  httplib::Headers xml{{"Accept", "application/xml"}};
  res = cli.Get("/jobs/x", xml);
  ASSERT_TRUE(res);
  EXPECT_EQ(res->status, 406);
}
