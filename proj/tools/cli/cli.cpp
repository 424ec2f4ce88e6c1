// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 vdpost Contributors

#include "cli.hpp"

#include <algorithm>
#include <csignal>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <optional>
#include <ostream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "vdpost/error.hpp"
#include "vdpost/jsonl.hpp"
#include "vdpost/mock_server.hpp"
#include "vdpost/pipeline.hpp"

namespace vdpost::cli {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

/// Flags shared by every pipeline command. Unset values leave the config alone.
struct Overrides {
  std::string config;
  std::string corpus;
  std::string output_dir;
  std::string base_url;
  std::optional<std::uint64_t> seed;
  std::optional<int> candidates;
  std::optional<int> workers;
  std::string slice;

  void attach(CLI::App* cmd, bool config_required = true) {
    auto* c = cmd->add_option("-c,--config", config, "Pipeline config (JSON)");
    if (config_required) c->required();
    cmd->add_option("--corpus", corpus, "Override the corpus path");
    cmd->add_option("-o,--output-dir", output_dir, "Override the output directory");
    cmd->add_option("--base-url", base_url, "Send every endpoint's traffic to this base URL");
    cmd->add_option("--seed", seed, "Override the seed");
    cmd->add_option("-n,--candidates", candidates, "Override the candidate count")->check(CLI::PositiveNumber);
    cmd->add_option("--workers", workers, "Worker threads")->check(CLI::Range(1, 1024));
    cmd->add_option("--slice", slice, "Corpus slice: all, train, validation or test");
  }
};

json read_config_document(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  json j = json::parse(in, nullptr, false);
  if (j.is_discarded() || !j.is_object()) throw ConfigError("config file '" + path + "' is not a JSON object");
  return j;
}

/// Applies flag overrides to the raw document so they pass the same
/// validation as config values.
PipelineConfig load_config(const Overrides& o, const std::function<void(json&)>& extra = {}) {
  json j = read_config_document(o.config);
  if (!o.corpus.empty()) j["corpus"] = fs::absolute(o.corpus).string();
  if (!o.output_dir.empty()) j["output_dir"] = fs::absolute(o.output_dir).string();
  if (o.seed) j["seed"] = *o.seed;
  if (o.candidates) j["candidates"] = *o.candidates;
  if (o.workers) j["workers"] = *o.workers;
  if (!o.slice.empty()) j["corpus_filter"]["slice"] = o.slice;
  if (!o.base_url.empty() && j.contains("endpoints") && j["endpoints"].is_object())
    for (auto& [role, e] : j["endpoints"].items())
      if (e.is_object()) e["base_url"] = o.base_url;
  if (extra) extra(j);
  return pipeline_config_from_json(j, fs::path(o.config).parent_path());
}

std::vector<Objective> parse_objectives(const std::vector<std::string>& names) {
  std::vector<Objective> out;
  for (const auto& name : names) {
    if (name == "all") {
      for (auto o : {Objective::Sft, Objective::Dpo, Objective::Orpo, Objective::Grpo})
        if (std::find(out.begin(), out.end(), o) == out.end()) out.push_back(o);
      continue;
    }
    auto o = parse_objective(name);
    if (!o) throw ConfigError("unknown objective \"" + name + "\" (sft, dpo, orpo, grpo or all)");
    if (std::find(out.begin(), out.end(), *o) == out.end()) out.push_back(*o);
  }
  return out;
}

void print_stats(const Corpus& corpus, std::ostream& out) {
  const CorpusStats s = corpus_stats(corpus);
  out << "corpus: " << s.samples << " samples, " << s.pairs << " pairs, " << s.projects << " projects, " << s.cwes
      << " CWEs\n";
  auto row = [&](const char* name, const TokenSummary& t) {
    out << "  " << std::left << std::setw(16) << name << std::right << " min " << std::setw(6) << t.min << "  mean "
        << std::fixed << std::setprecision(1) << std::setw(8) << t.mean << "  max " << std::setw(6) << t.max << '\n';
  };
  row("function tokens", s.function_tokens);
  row("context tokens", s.context_tokens);
  row("input tokens", s.input_tokens);
}

void print_report(const PipelineConfig& cfg, std::ostream& out) {
  print_stats(load_corpus(cfg.corpus), out);
  out << "artifacts in " << cfg.output_dir.string() << ":\n";
  for (auto name : {artifacts::kSftDataset, artifacts::kPreferencePairs, artifacts::kDifficulty, artifacts::kSchedule,
                    artifacts::kRewards, artifacts::kRolloutGroups, artifacts::kReport, artifacts::kGradcheck}) {
    const fs::path p = cfg.output_dir / name;
    if (!fs::exists(p)) continue;
    json manifest;
    if (p.extension() == ".jsonl") {
      if (auto m = read_manifest(p)) manifest = *m;
    } else {
      manifest = read_json(p);
    }
    const json& m = manifest.contains("manifest") ? manifest["manifest"] : manifest;
    out << "  " << std::left << std::setw(24) << name << " command=" << m.value("command", "?")
        << " digest=" << m.value("config_digest", "?").substr(0, 12) << '\n';
  }
  const fs::path table = cfg.output_dir / artifacts::kReportTable;
  if (fs::exists(table)) {
    std::ifstream in(table);
    std::string line;
    std::getline(in, line);  // header line
    out << in.rdbuf();
  }
}

void serve_until_signal(const std::string& fixtures, const std::string& host, int port, bool echo, int threads,
                        std::ostream& out) {
  sigset_t set;
  sigemptyset(&set);
  sigaddset(&set, SIGINT);
  sigaddset(&set, SIGTERM);
  // Block before the server threads exist so they inherit the mask.
  pthread_sigmask(SIG_BLOCK, &set, nullptr);
  MockServerOptions options;
  options.unknown = echo ? UnknownDigest::Echo : UnknownDigest::NotFound;
  options.threads = threads;
  MockLlmServer server(load_fixtures(fixtures), options);
  server.start(host, port);
  out << "listening on " << server.base_url() << std::endl;
  int sig = 0;
  sigwait(&set, &sig);
  server.stop();
  out << "peak in-flight: " << server.probe().peak_in_flight << std::endl;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Post-training data curation, rewards and evaluation for LLM vulnerability detection", "vdpost"};
  app.set_version_flag("--version", std::string(tool_version()));
  app.require_subcommand(1);

  Overrides curate_o, difficulty_o, schedule_o, reward_o, evaluate_o, report_o, gradcheck_o;

  auto* curate = app.add_subcommand("curate", "Sample, judge and filter candidates into a training dataset");
  curate_o.attach(curate);
  std::string curate_mode, curate_template, curate_generator;
  curate->add_option("--mode", curate_mode, "sft or preference");
  curate->add_option("--template", curate_template, "detector or rationalization");
  curate->add_option("--generator", curate_generator, "policy or teacher");

  auto* difficulty = app.add_subcommand("difficulty", "Score pairwise pass@1 for every pair");
  difficulty_o.attach(difficulty);

  auto* sched = app.add_subcommand("schedule", "Order difficulty-scored pairs into training batches");
  schedule_o.attach(sched);
  std::string schedule_mode;
  std::optional<std::size_t> batch_size;
  bool filter_on = false, filter_off = false;
  sched->add_option("--mode", schedule_mode, "random, curriculum or paired");
  sched->add_option("--batch-size", batch_size, "Samples per batch")->check(CLI::PositiveNumber);
  auto* fe = sched->add_flag("--filter-extremes", filter_on, "Drop pairs with pass@1 of 0 or 1");
  sched->add_flag("--no-filter-extremes", filter_off, "Keep every pair")->excludes(fe);

  auto* reward = app.add_subcommand("reward", "Score policy rollouts and compute group advantages");
  reward_o.attach(reward);
  std::string granularity;
  reward->add_option("--granularity", granularity, "detection, prediction, reasoning or specification");

  auto* evaluate = app.add_subcommand("evaluate", "Detection, prediction and reasoning-level metrics");
  evaluate_o.attach(evaluate);
  std::optional<std::size_t> pass_k;
  evaluate->add_option("--pass-k", pass_k, "k for pass@k (default: candidate count)")->check(CLI::PositiveNumber);

  auto* gradcheck = app.add_subcommand("gradcheck", "Finite-difference check of the objective gradients");
  gradcheck_o.attach(gradcheck, false);
  std::vector<std::string> objectives{"all"};
  std::optional<std::size_t> trials;
  std::optional<double> step;
  gradcheck->add_option("--objective", objectives, "sft, dpo, orpo, grpo or all (repeatable)");
  gradcheck->add_option("--trials", trials, "Random instances per objective")->check(CLI::PositiveNumber);
  gradcheck->add_option("--step", step, "Central-difference step");

  auto* report = app.add_subcommand("report", "Summarize the corpus and the artifacts of an output directory");
  report_o.attach(report);

  auto* mock = app.add_subcommand("mock-server", "Serve canned replies from a fixture file");
  std::string fixtures, host = "127.0.0.1";
  int port = 8089, threads = 32;
  bool echo = false;
  mock->add_option("--fixtures", fixtures, "Fixture file (JSONL)")->required();
  mock->add_option("--host", host, "Bind address");
  mock->add_option("--port", port, "Port (0 picks a free one)")->check(CLI::Range(0, 65535));
  mock->add_option("--threads", threads, "Worker threads")->check(CLI::Range(1, 1024));
  mock->add_flag("--echo", echo, "Echo the last message for unknown requests instead of 404");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? kOk : kUsage;
  }

  try {
    if (curate->parsed()) {
      cmd_curate(load_config(curate_o,
                             [&](json& j) {
                               if (!curate_mode.empty()) j["curate"]["mode"] = curate_mode;
                               if (!curate_template.empty()) j["curate"]["template"] = curate_template;
                               if (!curate_generator.empty()) j["curate"]["generator"] = curate_generator;
                             }),
                 out);
    } else if (difficulty->parsed()) {
      cmd_difficulty(load_config(difficulty_o), out);
    } else if (sched->parsed()) {
      cmd_schedule(load_config(schedule_o,
                               [&](json& j) {
                                 if (!schedule_mode.empty()) j["schedule"]["mode"] = schedule_mode;
                                 if (batch_size) j["schedule"]["batch_size"] = *batch_size;
                                 if (filter_on) j["schedule"]["filter_extremes"] = true;
                                 if (filter_off) j["schedule"]["filter_extremes"] = false;
                               }),
                   out);
    } else if (reward->parsed()) {
      cmd_reward(load_config(reward_o,
                             [&](json& j) {
                               if (!granularity.empty()) j["granularity"] = granularity;
                             }),
                 out);
    } else if (evaluate->parsed()) {
      cmd_evaluate(load_config(evaluate_o,
                               [&](json& j) {
                                 if (pass_k) j["pass_k"] = *pass_k;
                               }),
                   out);
    } else if (gradcheck->parsed()) {
      const auto objs = parse_objectives(objectives);
      std::optional<PipelineConfig> cfg;
      if (!gradcheck_o.config.empty()) cfg = load_config(gradcheck_o);
      const std::size_t t = trials.value_or(cfg ? cfg->gradcheck_trials : 100);
      const double h = step.value_or(cfg ? cfg->gradcheck_step : 1e-6);
      const std::uint64_t seed = gradcheck_o.seed.value_or(cfg ? cfg->seed : 0x5eed);
      cmd_gradcheck(cfg ? &*cfg : nullptr, objs, t, h, seed, out);
    } else if (report->parsed()) {
      print_report(load_config(report_o), out);
    } else if (mock->parsed()) {
      serve_until_signal(fixtures, host, port, echo, threads, out);
    }
  } catch (const ConfigError& e) {
    err << "vdpost: configuration error: " << e.what() << '\n';
    return kUsage;
  } catch (const DataError& e) {
    err << "vdpost: data error: " << e.what() << '\n';
    return kData;
  } catch (const EndpointError& e) {
    err << "vdpost: endpoint error: " << e.what() << '\n';
    return kEndpoint;
  } catch (const std::exception& e) {
    err << "vdpost: error: " << e.what() << '\n';
    return kData;
  }
  return kOk;
}

}  // namespace vdpost::cli
