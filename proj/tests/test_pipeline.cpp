#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <thread>

#include <httplib.h>

#include "topiceval/pipeline.hpp"
#include "topiceval/text.hpp"

using namespace topiceval;
namespace fs = std::filesystem;

namespace {

// A private copy of the toy data so runs never touch the source tree.
fs::path toy_workspace(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("topiceval_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  fs::copy(TOPICEVAL_TOY_DATA, dir / "data");
  return dir;
}

RunConfig toy_config(const fs::path& ws, int threads, const std::string& out = "out",
                     const std::string& cache = "cache") {
  auto j = nlohmann::json::parse(read_file((ws / "data" / "run.json").string()));
  j["out_dir"] = (ws / out).string();
  j["cache_dir"] = (ws / cache).string();
  j["threads"] = threads;
  return run_config_from_json(j, (ws / "data").string());
}

std::map<std::string, std::string> snapshot(const fs::path& dir) {
  std::map<std::string, std::string> out;
  for (const auto& e : fs::recursive_directory_iterator(dir)) {
    if (e.is_regular_file()) out[fs::relative(e.path(), dir).string()] = read_file(e.path().string());
  }
  return out;
}

// A backend that must never be reached.
class ForbiddenBackend : public ChatBackend {
 public:
  ChatResponse complete(const ChatRequest&) override {
    ++calls;
    return {500, "", "network disabled"};
  }
  int calls = 0;
};

#ifdef TOPICEVAL_CLI
struct CliResult {
  int code = -1;
  std::string err;
};

CliResult cli(const std::string& args, const fs::path& ws) {
  const auto err = ws / "stderr.txt";
  const std::string cmd = std::string(TOPICEVAL_CLI) + " " + args + " >/dev/null 2>" + err.string();
  const int status = std::system(cmd.c_str());
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, read_file(err.string())};
}
#endif

}  // namespace

TEST(Pipeline, EndToEndDeterministicAcrossRunsAndThreads) {
  const auto ws = toy_workspace("pipeline_det");
  {
    Pipeline p(toy_config(ws, 1, "out1", "cache1"));
    p.run_all();
  }
  {
    Pipeline p(toy_config(ws, 1, "out2", "cache2"));
    p.run_all();
  }
  {
    Pipeline p(toy_config(ws, 4, "out4", "cache4"));
    p.run_all();
  }
  const auto a = snapshot(ws / "out1");
  const auto b = snapshot(ws / "out2");
  const auto c = snapshot(ws / "out4");
  ASSERT_FALSE(a.empty());
  for (const char* f : {"baseline.csv", "judgments.jsonl", "adversarial.csv", "analysis/analysis.json",
                        "report/report.json", "manifest.json", "prep/vocab.txt"}) {
    EXPECT_TRUE(a.contains(f)) << f;
  }
  // The manifest records the config (paths, thread count); every other file
  // must match byte for byte.
  for (const auto* other : {&b, &c}) {
    ASSERT_EQ(a.size(), other->size());
    for (const auto& [path, content] : a) {
      if (path == "manifest.json") continue;
      EXPECT_EQ(content, other->at(path)) << path;
    }
  }
  fs::remove_all(ws);
}

TEST(Pipeline, SkipsCompletedStagesAndResumes) {
  const auto ws = toy_workspace("pipeline_resume");
  {
    Pipeline p(toy_config(ws, 2));
    EXPECT_TRUE(p.run_stage(Stage::kPrep));
    EXPECT_TRUE(p.run_stage(Stage::kBaseline));
  }
  {
    // "Interrupted" after baseline: a new process picks up from judge.
    Pipeline p(toy_config(ws, 2));
    EXPECT_FALSE(p.run_stage(Stage::kPrep));
    EXPECT_FALSE(p.run_stage(Stage::kBaseline));
    EXPECT_TRUE(p.run_stage(Stage::kJudge));
    EXPECT_TRUE(p.manifest().stages.at("judge").complete);
  }
  {
    // Changing a stage input invalidates that stage.
    auto cfg = toy_config(ws, 2);
    cfg.baseline.window_uci = 5;
    Pipeline p(cfg);
    EXPECT_FALSE(p.run_stage(Stage::kPrep));
    EXPECT_TRUE(p.run_stage(Stage::kBaseline));
  }
  {
    Pipeline p(toy_config(ws, 2), /*force=*/true);
    EXPECT_TRUE(p.run_stage(Stage::kPrep));
  }
  fs::remove_all(ws);
}

TEST(Pipeline, WarmCacheRerunMakesNoNetworkCalls) {
  const auto ws = toy_workspace("pipeline_cache");
  {
    Pipeline p(toy_config(ws, 2));
    p.run_all();
  }
  const auto first = snapshot(ws / "out");
  auto forbidden = std::make_shared<ForbiddenBackend>();
  Pipeline p(toy_config(ws, 2), /*force=*/true);
  p.set_backend_factory([&](const LlmConfig&) { return forbidden; });
  p.run_all();
  EXPECT_EQ(forbidden->calls, 0);
  for (const auto& [llm, s] : p.gateway_stats()) {
    EXPECT_EQ(s.network_calls, 0u) << llm;
    EXPECT_GT(s.cache_hits, 0u) << llm;
  }
  EXPECT_EQ(snapshot(ws / "out"), first);
  fs::remove_all(ws);
}

TEST(Pipeline, ConfigErrors) {
  const auto ws = toy_workspace("pipeline_cfg");
  auto j = nlohmann::json::parse(read_file((ws / "data" / "run.json").string()));
  const auto base = (ws / "data").string();
  auto bad = j;
  bad["surprise"] = 1;
  EXPECT_THROW(run_config_from_json(bad, base), std::exception);
  bad = j;
  bad["threads"] = 0;
  EXPECT_THROW(run_config_from_json(bad, base), std::exception);
  bad = j;
  bad["llms"] = {"mock_judge.json", "mock_judge.json"};
  EXPECT_THROW(run_config_from_json(bad, base), std::exception);
  bad = j;
  bad["metrics"] = "C_rate,not_a_metric";
  EXPECT_THROW(run_config_from_json(bad, base), std::exception);
  EXPECT_NO_THROW(run_config_from_json(j, base));
  fs::remove_all(ws);
}

TEST(Pipeline, AdversarialNeedsPrep) {
  const auto ws = toy_workspace("pipeline_adv");
  Pipeline p(toy_config(ws, 1));
  EXPECT_THROW(p.run_stage(Stage::kAdversarial), ConfigError);
  fs::remove_all(ws);
}

TEST(Pipeline, PathComponent) {
  EXPECT_EQ(path_component("a b/c"), "a_b_c");
  EXPECT_EQ(path_component("lda"), "lda");
}

#ifdef TOPICEVAL_CLI
TEST(Cli, CorruptedTopicsExitTwoNamingField) {
  const auto ws = toy_workspace("cli_corrupt");
  auto topics = nlohmann::json::parse(read_file((ws / "data" / "topics_lda.json").string()));
  topics["topics"][2]["words"] = "not a list";
  std::ofstream(ws / "data" / "topics_lda.json") << topics.dump();
  const auto run = cli("baseline --topics " + (ws / "data" / "topics_lda.json").string() + " --corpus " +
                           (ws / "data" / "corpus.jsonl").string() + " --out " + (ws / "b.csv").string(),
                       ws);
  EXPECT_EQ(run.code, 2) << run.err;
  EXPECT_NE(run.err.find("topics[2].words"), std::string::npos) << run.err;
  fs::remove_all(ws);
}

TEST(Cli, MissingExportFileExitTwo) {
  const auto ws = toy_workspace("cli_export");
  const auto r = cli("validate-export " + (ws / "data").string(), ws);
  EXPECT_EQ(r.code, 2) << r.err;
  EXPECT_NE(r.err.find("export.json"), std::string::npos) << r.err;
  fs::remove_all(ws);
}

TEST(Cli, ConfigErrorsExitOne) {
  const auto ws = toy_workspace("cli_config");
  auto j = nlohmann::json::parse(read_file((ws / "data" / "run.json").string()));
  j["pairs_strategy"] = "sometimes";
  std::ofstream(ws / "data" / "bad.json") << j.dump();
  const auto r = cli("run " + (ws / "data" / "bad.json").string(), ws);
  EXPECT_EQ(r.code, 1) << r.err;
  const auto p = cli("judge --topics " + (ws / "data" / "topics_lda.json").string() + " --llm " +
                         (ws / "data" / "mock_judge.json").string() + " --pairs-strategy sometimes --out " +
                         (ws / "j").string(),
                     ws);
  EXPECT_EQ(p.code, 1) << p.err;
  fs::remove_all(ws);
}

TEST(Cli, EndpointErrorExitThree) {
  const auto ws = toy_workspace("cli_endpoint");
  httplib::Server server;
  server.Post("/v1/chat/completions", [](const httplib::Request&, httplib::Response& res) {
    res.status = 401;
    res.set_content("invalid api key", "text/plain");
  });
  const int port = server.bind_to_any_port("127.0.0.1");
  std::thread t([&] { server.listen_after_bind(); });
  server.wait_until_ready();
  const nlohmann::json llm = {{"llm_id", "locked"},
                              {"endpoint_url", "http://127.0.0.1:" + std::to_string(port) + "/v1/chat/completions"},
                              {"model_identifier", "m"}};
  std::ofstream(ws / "data" / "locked.json") << llm.dump();
  const auto r = cli("judge --topics " + (ws / "data" / "topics_lda.json").string() + " --llm " +
                         (ws / "data" / "locked.json").string() + " --metrics C_rate --out " + (ws / "j").string(),
                     ws);
  server.stop();
  t.join();
  EXPECT_EQ(r.code, 3) << r.err;
  EXPECT_NE(r.err.find("401"), std::string::npos) << r.err;
  fs::remove_all(ws);
}

TEST(Cli, FullToyRunSucceeds) {
  const auto ws = toy_workspace("cli_run");
  auto j = nlohmann::json::parse(read_file((ws / "data" / "run.json").string()));
  j["out_dir"] = (ws / "out").string();
  j["cache_dir"] = (ws / "cache").string();
  std::ofstream(ws / "data" / "local.json") << j.dump();
  const auto r = cli("run " + (ws / "data" / "local.json").string(), ws);
  EXPECT_EQ(r.code, 0) << r.err;
  EXPECT_TRUE(fs::exists(ws / "out" / "report" / "report.json"));
  EXPECT_TRUE(fs::exists(ws / "out" / "warnings.txt"));
  fs::remove_all(ws);
}
#endif
