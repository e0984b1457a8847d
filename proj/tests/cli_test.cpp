#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "cli.hpp"
#include "ontoq/pipeline.hpp"
#include "test_support.hpp"

using namespace ontoq;
using ontoq::testing::data_path;
using json = nlohmann::json;

namespace {

struct CliRun {
  int code = -1;
  std::string out;
  std::string err;
};

CliRun run(std::vector<std::string> args, const std::string& input = "") {
  std::istringstream in(input);
  std::ostringstream out, err;
  CliRun r;
  r.code = run_cli(args, {in, out, err, false});
  r.out = out.str();
  r.err = err.str();
  return r;
}

std::string golden() { return data_path("fixtures/golden_corpus.jsonl"); }

std::string temp_path(const std::string& name) {
  return (std::filesystem::temp_directory_path() / ("ontoq_cli_" + name)).string();
}

std::string slurp(const std::string& path) {
  std::ifstream f(path);
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

const std::string kWorkedQuery =
    "List all compute instances in the production environment that have security vulnerabilities.";
const std::string kGoldenSummary =
    "There are 2 compute instances in the production environment with security vulnerabilities: "
    "ins-cloud-host-1427 with Open SSH Port and Ins-cloud-host-2109 with Unpatched software";

}  // namespace

TEST(CliIngest, FixtureCounts) {
  const CliRun r = run({"ingest", "--corpus", golden()});
  EXPECT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.out, "14 nodes, 16 edges, 0 skipped\n");
}

TEST(CliIngest, EventsChangeCounts) {
  const std::string events = temp_path("events.jsonl");
  std::ofstream(events) << "{\"seq\":1,\"op\":\"remove_node\",\"id\":\"ins-cloud-host-1427\"}\n";
  const CliRun r = run({"ingest", "--corpus", golden(), "--events", events});
  EXPECT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.out.substr(0, r.out.find('\n')), "13 nodes, 13 edges, 0 skipped");
}

TEST(CliIngest, SnapshotRoundTrips) {
  const std::string snap = temp_path("snapshot.jsonl");
  ASSERT_EQ(run({"ingest", "--corpus", golden(), "--snapshot", snap}).code, 0);
  const CliRun again = run({"ingest", "--corpus", snap});
  EXPECT_EQ(again.out, "14 nodes, 16 edges, 0 skipped\n");
}

TEST(CliIngest, MissingFileIsIoExit) {
  const CliRun r = run({"ingest", "--corpus", "/nonexistent/corpus.jsonl"});
  EXPECT_EQ(r.code, kExitIo);
  EXPECT_NE(r.err.find("/nonexistent/corpus.jsonl"), std::string::npos);
}

TEST(CliUsage, ValidationExits) {
  EXPECT_EQ(run({"bogus"}).code, kExitValidation);
  EXPECT_EQ(run({"query", "--corpus", golden(), "--format", "xml", "hosts"}).code, kExitValidation);
  EXPECT_EQ(run({"query", "--corpus", golden()}).code, kExitValidation);
  EXPECT_EQ(run({"query", "hosts"}).code, kExitValidation);
  const std::string cfg = temp_path("bad_config.json");
  std::ofstream(cfg) << "{\"threshold\": 2}";
  EXPECT_EQ(run({"query", "--config", cfg, "--corpus", golden(), "hosts"}).code, kExitValidation);
  EXPECT_EQ(run({"--help"}).code, 0);
}

TEST(CliQuery, GoldenOutput) {
  const CliRun r = run({"query", "--corpus", golden(), "--now", "1766880000", kWorkedQuery});
  EXPECT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.out,
            "Compute Instance     Vulnerability\n"
            "-------------------  ------------------\n"
            "ins-cloud-host-1427  Open SSH Port\n"
            "Ins-cloud-host-2109  Unpatched software\n"
            "\n" +
                kGoldenSummary + "\n");
}

TEST(CliQuery, ExplainShowsIntentAndIr) {
  const CliRun r = run({"query", "--explain", "--corpus", golden(), kWorkedQuery});
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find("entities: ComputeInstance"), std::string::npos);
  EXPECT_NE(r.out.find("MATCH"), std::string::npos);
  EXPECT_NE(r.out.find("HAS_VULNERABILITY"), std::string::npos);
}

TEST(CliQuery, IrBypassesLanguage) {
  const CliRun r = run({"query", "--corpus", golden(), "--ir", "MATCH (n:NLB) RETURN n.name"});
  EXPECT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("nlb-crm-public"), std::string::npos);
  EXPECT_EQ(run({"query", "--corpus", golden(), "--ir", "MATCH (n:NLB RETURN"}).code, kExitValidation);
}

TEST(CliQuery, UncompilableExit) {
  const CliRun r = run({"query", "--corpus", golden(), "frobnicate the wibbles"});
  EXPECT_EQ(r.code, kExitUncompilable);
  EXPECT_NE(r.err.find("frobnicate"), std::string::npos);
  EXPECT_NE(r.err.find("wibbles"), std::string::npos);
}

TEST(CliQuery, EmptyResultIsSuccess) {
  const CliRun r = run({"query", "--corpus", golden(), "databases in staging"});
  EXPECT_EQ(r.code, 0) << r.err;
}

TEST(CliQuery, Formats) {
  const CliRun j = run({"query", "--corpus", golden(), "--format", "json", kWorkedQuery});
  const json parsed = json::parse(j.out);
  EXPECT_EQ(parsed.at("rows").size(), 2u);
  EXPECT_EQ(parsed.at("summary"), kGoldenSummary);
  const CliRun c = run({"query", "--corpus", golden(), "--format", "csv", kWorkedQuery});
  EXPECT_EQ(c.out.substr(0, c.out.find('\n') + 1), "Compute Instance,Vulnerability\r\n");
}

TEST(CliRepl, SessionSurvivesErrors) {
  const CliRun r = run({"repl", "--corpus", golden()},
                    kWorkedQuery + "\n:ir MATCH (n:NLB RETURN\nfrobnicate\n:format json\nhosts\n:quit\nhosts\n");
  EXPECT_EQ(r.code, 0);
  EXPECT_NE(r.out.find(kGoldenSummary), std::string::npos);
  EXPECT_NE(r.err.find("parse error"), std::string::npos);
  EXPECT_NE(r.err.find("frobnicate"), std::string::npos);
  EXPECT_NE(r.out.find("\"columns\""), std::string::npos);
  EXPECT_EQ(r.out.find("\"columns\""), r.out.rfind("\"columns\""));
}

TEST(CliRepl, IngestAndIndexCommands) {
  const CliRun r = run({"repl"}, ":ingest " + golden() + "\n:index\n:explain on\n" + kWorkedQuery + "\n");
  EXPECT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("14 nodes, 16 edges, 0 skipped"), std::string::npos);
  EXPECT_NE(r.out.find("14 documents indexed"), std::string::npos);
  EXPECT_NE(r.out.find("-- ir"), std::string::npos);
}

TEST(CliClassify, FixtureServices) {
  const CliRun r = run({"classify", "--corpus", data_path("fixtures/services.jsonl"), "--format", "json"});
  ASSERT_EQ(r.code, 0) << r.err;
  std::map<std::string, std::string> got;
  for (const auto& row : json::parse(r.out)) got[row.at("id")] = row.at("category");
  EXPECT_EQ(got.at("svc-storefront"), "ecommerce");
  EXPECT_EQ(got.at("svc-crm"), "sales");
  EXPECT_EQ(got.at("svc-empty"), "unknown");
}

TEST(CliEval, ReportAndDeterminism) {
  const std::string report = temp_path("report.json");
  const CliRun a = run({"eval", "--no-timing", "--report", report});
  ASSERT_EQ(a.code, 0) << a.err;
  EXPECT_EQ(run({"eval", "--no-timing", "--report", report}).out, a.out);
  const json j = json::parse(slurp(report));
  const double onto = j.at("systems")[0].at("metrics").at("f1");
  const double kw = j.at("systems")[1].at("metrics").at("f1");
  EXPECT_GT(onto, kw);
  const std::string gold = temp_path("gold_missing.jsonl");
  EXPECT_EQ(run({"eval", "--gold", gold}).code, kExitIo);
}

TEST(CliGenerate, WritesDeterministicFiles) {
  const std::string c1 = temp_path("g1.jsonl"), g1 = temp_path("g1_gold.jsonl");
  const std::string c2 = temp_path("g2.jsonl"), g2 = temp_path("g2_gold.jsonl");
  ASSERT_EQ(run({"generate", "--seed", "9", "--nodes", "500", "--out", c1, "--gold-out", g1}).code, 0);
  ASSERT_EQ(run({"generate", "--seed", "9", "--nodes", "500", "--out", c2, "--gold-out", g2}).code, 0);
  EXPECT_EQ(slurp(c1), slurp(c2));
  EXPECT_EQ(slurp(g1), slurp(g2));
  const CliRun r = run({"eval", "--corpus", c1, "--gold", g1, "--no-timing", "--now", "1767225600"});
  EXPECT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(run({"ingest", "--corpus", c1}).out.substr(0, 10), "500 nodes,");
}

class ServeTest : public ::testing::Test {
 protected:
  void SetUp() override {
    AppConfig c;
    c.corpus_paths = {golden()};
    c.now = 1766880000;
    pipeline_ = std::make_unique<Pipeline>(c);
    pipeline_->load();
    install_routes(server_, *pipeline_);
    port_ = server_.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }
  void TearDown() override {
    server_.stop();
    thread_.join();
  }
  httplib::Client client() { return httplib::Client("127.0.0.1", port_); }

  std::unique_ptr<Pipeline> pipeline_;
  httplib::Server server_;
  int port_ = 0;
  std::thread thread_;
};

TEST_F(ServeTest, QueryMatchesCli) {
  auto cli = client();
  const auto res = cli.Post("/query", json{{"text", kWorkedQuery}}.dump(), "application/json");
  ASSERT_TRUE(res);
  EXPECT_EQ(res->status, 200);
  EXPECT_EQ(res->get_header_value("Content-Type"), "application/json");
  const CliRun r = run({"query", "--corpus", golden(), "--now", "1766880000", "--format", "json", kWorkedQuery});
  EXPECT_EQ(res->body, r.out);
}

TEST_F(ServeTest, ErrorsAndHealth) {
  auto cli = client();
  const auto bad = cli.Post("/query", R"({"text": "frobnicate the wibbles"})", "application/json");
  ASSERT_TRUE(bad);
  EXPECT_EQ(bad->status, 400);
  EXPECT_EQ(json::parse(bad->body).at("residual"), json::array({"frobnicate", "wibbles"}));
  EXPECT_EQ(cli.Post("/query", "not json", "application/json")->status, 400);
  const auto health = cli.Get("/healthz");
  ASSERT_TRUE(health);
  EXPECT_EQ(json::parse(health->body).at("nodes"), 14);
}

TEST_F(ServeTest, ConcurrentQueriesDuringIngest) {
  std::vector<std::thread> readers;
  std::atomic<int> failures{0};
  for (int t = 0; t < 4; ++t)
    readers.emplace_back([&] {
      auto cli = client();
      for (int i = 0; i < 10; ++i) {
        const auto res = cli.Post("/query", json{{"text", "hosts"}}.dump(), "application/json");
        if (!res || res->status != 200) ++failures;
      }
    });
  auto cli = client();
  const std::string corpus = slurp(golden());
  for (int i = 0; i < 5; ++i) {
    const auto res = cli.Post("/ingest", corpus, "application/x-ndjson");
    ASSERT_TRUE(res);
    EXPECT_EQ(json::parse(res->body).at("nodes"), 14);
  }
  for (auto& r : readers) r.join();
  EXPECT_EQ(failures.load(), 0);
}
