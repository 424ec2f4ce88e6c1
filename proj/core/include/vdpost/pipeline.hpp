// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 vdpost Contributors

// Batch pipeline stages behind the command-line tool. Every stage reads the
// corpus named by a PipelineConfig, caches LLM traffic under the output
// directory and writes manifest-tagged artifacts.

#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "vdpost/corpus.hpp"
#include "vdpost/curation.hpp"
#include "vdpost/cwe_taxonomy.hpp"
#include "vdpost/gateway.hpp"
#include "vdpost/objectives.hpp"
#include "vdpost/rewards.hpp"

namespace vdpost {

enum class CurateMode { Sft, Preference };

std::string_view to_string(CurateMode mode) noexcept;
std::optional<CurateMode> parse_curate_mode(std::string_view text) noexcept;

enum class CorpusSlice { All, Train, Validation, Test };

std::string_view to_string(CorpusSlice slice) noexcept;
std::optional<CorpusSlice> parse_corpus_slice(std::string_view text) noexcept;

/// Endpoint roles a config may define.
inline constexpr std::string_view kEndpointRoles[] = {"policy", "teacher", "judge", "spec_generator"};

struct PipelineConfig {
  std::filesystem::path corpus;
  std::optional<std::filesystem::path> taxonomy;
  TaxonomyFormat taxonomy_format = TaxonomyFormat::EdgeListJson;
  std::map<std::string, EndpointConfig> endpoints;

  int candidates = kDefaultCandidates;
  Granularity granularity = Granularity::Reasoning;

  CurateMode curate_mode = CurateMode::Sft;
  PromptTemplate curate_template = PromptTemplate::Detector;
  KeepPolicy keep = KeepPolicy::FirstCorrect;
  PairingPolicy pairing = PairingPolicy::FirstPair;
  /// Endpoint role sampling curation candidates. Unset: teacher for SFT
  /// (policy when no teacher is configured), policy for preference data.
  std::optional<std::string> curate_generator;

  ScheduleMode schedule_mode = ScheduleMode::Curriculum;
  std::size_t batch_size = 8;
  bool filter_extremes = true;

  bool deduplicate = false;
  CorpusSlice slice = CorpusSlice::All;
  SplitRatios split;

  std::size_t pass_k = 0;  // 0: use the candidate count
  GrpoConfig grpo;

  std::size_t gradcheck_trials = 100;
  double gradcheck_step = 1e-6;

  std::filesystem::path output_dir = "vdpost-out";
  std::uint64_t seed = 0;
  int workers = 16;

  /// Throws ConfigError on out-of-range values or unknown endpoint roles.
  void validate() const;
  const EndpointConfig* endpoint(std::string_view role) const;
  std::string curation_generator() const;
};

/// Relative paths are resolved against `base_dir`. Unknown keys, secrets and
/// malformed values throw ConfigError.
PipelineConfig pipeline_config_from_json(const nlohmann::json& j, const std::filesystem::path& base_dir = {});
PipelineConfig load_pipeline_config(const std::filesystem::path& path);
nlohmann::json to_json(const PipelineConfig& config);

/// sha256 of the canonical config JSON without output_dir, so two runs that
/// differ only in where they write carry the same digest.
std::string config_digest(const PipelineConfig& config);

/// Summary of a cache-filling pass over the corpus.
struct StageFailure {
  std::string sample_id;
  std::string message;
};

struct CurateSummary {
  CurateMode mode = CurateMode::Sft;
  std::size_t queries = 0;
  std::size_t retained = 0;  // queries contributing at least one record
  std::size_t records = 0;
  std::vector<std::string> rejected;
  std::filesystem::path output;
};

struct DifficultySummary {
  std::size_t pairs = 0;
  std::filesystem::path output;
};

struct ScheduleSummary {
  std::size_t pairs_in = 0;
  std::size_t pairs_scheduled = 0;
  std::size_t batches = 0;
  std::filesystem::path output;
};

struct RewardSummary {
  Granularity granularity = Granularity::Detection;
  std::size_t groups = 0;
  std::size_t rewards = 0;
  std::filesystem::path output;
  std::filesystem::path groups_output;
};

struct EvaluateSummary {
  std::filesystem::path output;
  std::filesystem::path table_output;
};

struct GradcheckSummary {
  std::vector<GradCheckReport> reports;
  std::optional<std::filesystem::path> output;
};

/// Samples with the teacher (SFT) or the policy (preference), judges every
/// candidate, and writes sft_dataset.jsonl or preference_pairs.jsonl. Samples
/// whose endpoint calls fail are reported and the command throws
/// EndpointError after caching everything that succeeded.
CurateSummary cmd_curate(const PipelineConfig& config, std::ostream& log);
/// Pairwise pass@1 of the policy over every pair: difficulty.jsonl.
DifficultySummary cmd_difficulty(const PipelineConfig& config, std::ostream& log);
/// Reads difficulty.jsonl and writes schedule.json.
ScheduleSummary cmd_schedule(const PipelineConfig& config, std::ostream& log);
/// rewards.jsonl plus rollout_groups.jsonl with group advantages.
RewardSummary cmd_reward(const PipelineConfig& config, std::ostream& log);
/// report.json, report.txt and outcomes.jsonl.
EvaluateSummary cmd_evaluate(const PipelineConfig& config, std::ostream& log);
/// Runs finite_diff_check for each objective; writes gradcheck.json when a
/// config is given.
GradcheckSummary cmd_gradcheck(const PipelineConfig* config, std::span<const Objective> objectives,
                               std::size_t trials, double step, std::uint64_t seed, std::ostream& log);

/// Artifact names inside the output directory.
namespace artifacts {
inline constexpr std::string_view kSftDataset = "sft_dataset.jsonl";
inline constexpr std::string_view kPreferencePairs = "preference_pairs.jsonl";
inline constexpr std::string_view kDifficulty = "difficulty.jsonl";
inline constexpr std::string_view kSchedule = "schedule.json";
inline constexpr std::string_view kRewards = "rewards.jsonl";
inline constexpr std::string_view kRolloutGroups = "rollout_groups.jsonl";
inline constexpr std::string_view kReport = "report.json";
inline constexpr std::string_view kReportTable = "report.txt";
inline constexpr std::string_view kOutcomes = "outcomes.jsonl";
inline constexpr std::string_view kGradcheck = "gradcheck.json";
inline constexpr std::string_view kCacheDir = "cache";
}  // namespace artifacts

}  // namespace vdpost
