// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 vdpost Contributors

#include <gtest/gtest.h>

#include <cstdlib>

#include "demo_env.hpp"
#include "vdpost/jsonl.hpp"
#include "vdpost/pipeline.hpp"

namespace vdpost {
namespace {

using testing::DemoEnv;

demo::DemoOptions small() {
  demo::DemoOptions o;
  o.pair_ids = {"p-null", "p-int"};
  o.policy_delay_ms = 0;
  return o;
}

TEST(Cli, UsageErrorsExitOne) {
  EXPECT_EQ(DemoEnv::run_raw({}).code, cli::kUsage);
  EXPECT_EQ(DemoEnv::run_raw({"frobnicate"}).code, cli::kUsage);
  EXPECT_EQ(DemoEnv::run_raw({"curate"}).code, cli::kUsage);
  EXPECT_EQ(DemoEnv::run_raw({"curate", "-c", "/nonexistent/config.json"}).code, cli::kUsage);
  EXPECT_EQ(DemoEnv::run_raw({"--help"}).code, cli::kOk);
}

TEST(Cli, BadOverridesExitOne) {
  DemoEnv env(small());
  EXPECT_EQ(env.run({"curate", "--mode", "rlhf"}).code, cli::kUsage);
  EXPECT_EQ(env.run({"schedule", "--mode", "paired", "--batch-size", "3"}).code, cli::kUsage);
  EXPECT_EQ(env.run({"evaluate", "--slice", "holdout"}).code, cli::kUsage);
}

TEST(Cli, MissingCorpusExitsTwo) {
  DemoEnv env(small());
  const auto r = env.run({"difficulty", "--corpus", (env.dir / "missing.jsonl").string()});
  EXPECT_EQ(r.code, cli::kData);
  EXPECT_FALSE(r.err.empty());
}

TEST(Cli, MissingApiKeyExitsThree) {
  DemoEnv env(small());
  auto j = read_json(env.config);
  for (auto& [role, e] : j["endpoints"].items()) e["api_key_env"] = "VDPOST_CLI_TEST_MISSING_KEY";
  write_json(env.config, j);
  ::unsetenv("VDPOST_CLI_TEST_MISSING_KEY");
  const auto r = env.run({"curate"});
  EXPECT_EQ(r.code, cli::kEndpoint);
  EXPECT_NE(r.err.find("VDPOST_CLI_TEST_MISSING_KEY"), std::string::npos);
}

TEST(Cli, UnreachableEndpointExitsThree) {
  DemoEnv env(small());
  const auto r = env.run({"difficulty", "--base-url", "http://127.0.0.1:1"});
  EXPECT_EQ(r.code, cli::kEndpoint);
}

TEST(Cli, PipelineRunsEndToEnd) {
  DemoEnv env(small());
  for (const char* cmd : {"curate", "difficulty", "schedule", "reward", "evaluate"}) {
    const auto r = env.run({cmd});
    EXPECT_EQ(r.code, cli::kOk) << cmd << ": " << r.err;
  }
  EXPECT_TRUE(std::filesystem::exists(env.out() / artifacts::kReport));
  const auto table = testing::read_file(env.out() / artifacts::kReportTable);
  EXPECT_EQ(table.rfind("# vdpost ", 0), 0u);
  EXPECT_NE(table.find("reasoning"), std::string::npos);
  const auto report = env.run({"report"});
  EXPECT_EQ(report.code, cli::kOk) << report.err;
  EXPECT_NE(report.out.find("pairs"), std::string::npos);
}

TEST(Cli, OutputDirOverride) {
  DemoEnv env(small());
  const auto other = env.dir / "elsewhere";
  EXPECT_EQ(env.run({"difficulty", "-o", other.string()}).code, cli::kOk);
  EXPECT_TRUE(std::filesystem::exists(other / artifacts::kDifficulty));
  EXPECT_FALSE(std::filesystem::exists(env.out() / artifacts::kDifficulty));
}

TEST(Cli, GradcheckWithoutConfig) {
  const auto r = DemoEnv::run_raw({"gradcheck", "--objective", "sft", "--objective", "grpo", "--trials", "5"});
  EXPECT_EQ(r.code, cli::kOk) << r.err;
  EXPECT_EQ(r.out.rfind("sft ", 0), 0u);
  EXPECT_NE(r.out.find("\ngrpo "), std::string::npos);
  EXPECT_NE(r.out.find("trials=5"), std::string::npos);
  EXPECT_EQ(DemoEnv::run_raw({"gradcheck", "--objective", "ppo"}).code, cli::kUsage);
  EXPECT_EQ(DemoEnv::run_raw({"gradcheck", "--step", "0.5"}).code, cli::kUsage);
}

}  // namespace
}  // namespace vdpost
