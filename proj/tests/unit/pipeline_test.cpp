// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 vdpost Contributors

#include <gtest/gtest.h>

#include <set>
#include <sstream>

#include "demo_env.hpp"
#include "vdpost/error.hpp"
#include "vdpost/jsonl.hpp"
#include "vdpost/pipeline.hpp"

namespace vdpost {
namespace {

using testing::DemoEnv;

demo::DemoOptions only(std::vector<std::string> pairs) {
  demo::DemoOptions o;
  o.pair_ids = std::move(pairs);
  o.policy_delay_ms = 0;
  return o;
}

TEST(PipelineConfig, RejectsSecretsAndUnknownKeys) {
  const nlohmann::json base = {{"corpus", "c.jsonl"},
                               {"endpoints", {{"policy", {{"base_url", "http://h"}, {"model", "m"}}}}}};
  EXPECT_NO_THROW(pipeline_config_from_json(base, "/tmp"));
  auto j = base;
  j["endpoints"]["policy"]["api_key"] = "sk-live";
  EXPECT_THROW(pipeline_config_from_json(j), ConfigError);
  j = base;
  j["colour"] = 1;
  EXPECT_THROW(pipeline_config_from_json(j), ConfigError);
  j = base;
  j["endpoints"]["critic"] = base["endpoints"]["policy"];
  EXPECT_THROW(pipeline_config_from_json(j), ConfigError);
  j = base;
  j["schedule"] = {{"mode", "paired"}, {"batch_size", 3}};
  EXPECT_THROW(pipeline_config_from_json(j), ConfigError);
  j = base;
  j["corpus_filter"] = {{"ratios", {0.5, 0.5, 0.5}}};
  EXPECT_THROW(pipeline_config_from_json(j), ConfigError);
}

TEST(PipelineConfig, PathsResolveAgainstConfigDir) {
  const auto cfg = pipeline_config_from_json({{"corpus", "data/c.jsonl"}, {"output_dir", "out"}}, "/srv/run");
  EXPECT_EQ(cfg.corpus, std::filesystem::path("/srv/run/data/c.jsonl"));
  EXPECT_EQ(cfg.output_dir, std::filesystem::path("/srv/run/out"));
}

TEST(PipelineConfig, DigestIgnoresOutputDirAndTransport) {
  nlohmann::json j = {{"corpus", "c.jsonl"},
                      {"endpoints", {{"policy", {{"base_url", "http://a:1"}, {"model", "m"}}}}},
                      {"output_dir", "x"}};
  const auto a = config_digest(pipeline_config_from_json(j, "/one"));
  j["output_dir"] = "y";
  j["endpoints"]["policy"]["base_url"] = "http://b:2";
  j["workers"] = 3;
  EXPECT_EQ(config_digest(pipeline_config_from_json(j, "/two")), a);
  j["endpoints"]["policy"]["model"] = "m2";
  EXPECT_NE(config_digest(pipeline_config_from_json(j, "/two")), a);
  j["endpoints"]["policy"]["model"] = "m";
  j["seed"] = 99;
  EXPECT_NE(config_digest(pipeline_config_from_json(j, "/two")), a);
}

TEST(PipelineConfig, GeneratorDefaults) {
  auto cfg = pipeline_config_from_json({{"corpus", "c"},
                                        {"endpoints",
                                         {{"policy", {{"base_url", "http://h"}, {"model", "p"}}},
                                          {"teacher", {{"base_url", "http://h"}, {"model", "t"}}}}}});
  EXPECT_EQ(cfg.curation_generator(), "teacher");
  cfg.curate_mode = CurateMode::Preference;
  EXPECT_EQ(cfg.curation_generator(), "policy");
  cfg.endpoints.erase("teacher");
  cfg.curate_mode = CurateMode::Sft;
  EXPECT_EQ(cfg.curation_generator(), "policy");
}

TEST(Pipeline, CurateRejectsQueriesWithoutAcceptedCandidate) {
  DemoEnv env(only({"p-uaf", "p-leak"}));
  const auto cfg = load_pipeline_config(env.config);
  std::ostringstream log;
  const auto s = cmd_curate(cfg, log);
  EXPECT_EQ(s.queries, 4u);
  EXPECT_EQ(s.retained, 3u);
  EXPECT_EQ(s.records, 3u);
  EXPECT_EQ(s.rejected, std::vector<std::string>{"p-leak-v"});
  const auto records = read_jsonl(cfg.output_dir / artifacts::kSftDataset);
  ASSERT_EQ(records.size(), 3u);
  std::set<std::string> ids;
  for (const auto& r : records) ids.insert(r.at("sample_id").get<std::string>());
  EXPECT_EQ(ids, (std::set<std::string>{"p-uaf-v", "p-uaf-p", "p-leak-p"}));
  const auto manifest = read_manifest(cfg.output_dir / artifacts::kSftDataset);
  ASSERT_TRUE(manifest);
  EXPECT_EQ(manifest->at("config_digest"), config_digest(cfg));
  EXPECT_EQ(manifest->at("retention").at("rejected_ids"), nlohmann::json::array({"p-leak-v"}));
}

TEST(Pipeline, EmptyPreferenceFileWarns) {
  DemoEnv env(only({"p-uaf"}));
  auto cfg = load_pipeline_config(env.config);
  cfg.curate_mode = CurateMode::Preference;
  std::ostringstream log;
  const auto s = cmd_curate(cfg, log);
  EXPECT_EQ(s.records, 0u);
  EXPECT_NE(log.str().find("warning:"), std::string::npos);
  EXPECT_TRUE(read_jsonl(cfg.output_dir / artifacts::kPreferencePairs).empty());
  EXPECT_TRUE(read_manifest(cfg.output_dir / artifacts::kPreferencePairs));
}

TEST(Pipeline, FailedSamplesAreCachedAndResumed) {
  const auto opts = only({"p-uaf", "p-null"});
  const auto full = demo::build_demo(opts);
  // Drop the teacher fixture of one sample so its first run fails.
  const Sample& victim = *full.corpus.find("p-null-v");
  const auto messages = to_messages(render_query(victim, PromptTemplate::Detector));
  const Fixture missing = make_fixture("demo-teacher", messages, {"x"});

  testing::TempDir shared;
  std::filesystem::path out;
  {
    DemoEnv broken(opts, {missing});
    auto cfg = load_pipeline_config(broken.config);
    cfg.output_dir = shared / "out";
    std::ostringstream log;
    EXPECT_THROW(cmd_curate(cfg, log), EndpointError);
    EXPECT_NE(log.str().find("error: sample p-null-v"), std::string::npos);
    EXPECT_FALSE(std::filesystem::exists(cfg.output_dir / artifacts::kSftDataset));
  }
  DemoEnv fixed(opts);
  auto cfg = load_pipeline_config(fixed.config);
  cfg.output_dir = shared / "out";
  std::ostringstream log;
  const auto s = cmd_curate(cfg, log);
  EXPECT_EQ(s.queries, 4u);
  EXPECT_NE(log.str().find("sampling/judging 1 of 4"), std::string::npos) << log.str();
}

TEST(Pipeline, ScheduleDropsExtremePairs) {
  DemoEnv env;
  const auto cfg = load_pipeline_config(env.config);
  std::ostringstream log;
  EXPECT_EQ(cmd_difficulty(cfg, log).pairs, 6u);
  const auto s = cmd_schedule(cfg, log);
  EXPECT_EQ(s.pairs_in, 6u);
  EXPECT_EQ(s.pairs_scheduled, 4u);
  const auto sched = schedule_from_json(read_json(cfg.output_dir / artifacts::kSchedule).at("schedule"));
  std::set<std::string> ids;
  for (const auto& b : sched.batches) ids.insert(b.begin(), b.end());
  EXPECT_FALSE(ids.contains("p-uaf-v"));
  EXPECT_FALSE(ids.contains("p-oob-write-p"));
  EXPECT_TRUE(ids.contains("p-null-v"));

  auto keep_all = cfg;
  keep_all.filter_extremes = false;
  EXPECT_EQ(cmd_schedule(keep_all, log).pairs_scheduled, 6u);
}

TEST(Pipeline, ReasoningWithoutJudgeIsConfigError) {
  DemoEnv env(only({"p-uaf"}));
  auto cfg = load_pipeline_config(env.config);
  cfg.endpoints.erase("judge");
  std::ostringstream log;
  EXPECT_THROW(cmd_difficulty(cfg, log), ConfigError);
  cfg.granularity = Granularity::Detection;
  EXPECT_NO_THROW(cmd_reward(cfg, log));
}

TEST(Pipeline, RewardGroupsCarryAdvantages) {
  DemoEnv env(only({"p-null"}));
  const auto cfg = load_pipeline_config(env.config);
  std::ostringstream log;
  const auto s = cmd_reward(cfg, log);
  EXPECT_EQ(s.groups, 2u);
  EXPECT_EQ(s.rewards, 16u);
  for (const auto& g : read_jsonl(s.groups_output)) {
    const auto adv = g.at("advantages").get<std::vector<double>>();
    ASSERT_EQ(adv.size(), 8u);
    EXPECT_NEAR(testing::mean(adv), 0.0, 1e-9);
  }

  auto spec = cfg;
  spec.granularity = Granularity::Specification;
  const auto ss = cmd_reward(spec, log);
  for (const auto& r : read_jsonl(ss.output)) {
    const double v = r.at("value");
    EXPECT_GE(v, -1.0);
    EXPECT_LE(v, 1.0);
  }
}

TEST(Pipeline, GradcheckWritesReport) {
  DemoEnv env(only({"p-uaf"}));
  const auto cfg = load_pipeline_config(env.config);
  std::ostringstream log;
  const std::vector<Objective> objectives{Objective::Dpo};
  const auto s = cmd_gradcheck(&cfg, objectives, 5, 1e-6, 3, log);
  ASSERT_EQ(s.reports.size(), 1u);
  ASSERT_TRUE(s.output);
  EXPECT_TRUE(std::filesystem::exists(*s.output));
  EXPECT_EQ(log.str().rfind("dpo", 0), 0u);
  EXPECT_NE(log.str().find(" trials=5 max_relative_error="), std::string::npos);
}

}  // namespace
}  // namespace vdpost
