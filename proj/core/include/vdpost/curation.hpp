// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 vdpost Contributors

// Rejection sampling, preference pairs, pairwise pass@1 difficulty, extreme
// filtering and batch scheduling.

#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "vdpost/completion.hpp"
#include "vdpost/corpus.hpp"
#include "vdpost/judge.hpp"

namespace vdpost {

inline constexpr int kDefaultCandidates = 8;

/// N completions for one sample with their reasoning-level judgments.
struct CandidateSet {
  std::string sample_id;
  std::string pair_id;
  Role role = Role::Vulnerable;
  std::string query;
  std::vector<Completion> completions;
  std::vector<JudgeVerdict> judgments;  // parallel to completions

  std::size_t size() const noexcept { return completions.size(); }
  std::size_t accepted_count() const;
  /// Throws DataError unless completions and judgments are parallel.
  void validate() const;
};

nlohmann::json to_json(const CandidateSet& set);
CandidateSet candidate_set_from_json(const nlohmann::json& j);

enum class KeepPolicy { FirstCorrect, AllCorrect };
enum class PairingPolicy { FirstPair, Cartesian };

struct SftRecord {
  std::string sample_id;
  std::string query;
  std::string response;

  bool operator==(const SftRecord&) const = default;
};

nlohmann::json to_json(const SftRecord& record);

/// Keeps samples with at least one accepted judgment.
std::vector<SftRecord> rejection_sample(std::span<const CandidateSet> candidates,
                                        KeepPolicy policy = KeepPolicy::FirstCorrect);

struct PreferencePair {
  std::string sample_id;
  std::string query;
  Completion chosen;
  Completion rejected;
};

nlohmann::json to_json(const PreferencePair& pair);

/// Samples with both an accepted and a rejected completion yield pairs:
/// FirstPair takes first-accepted x first-rejected in generation order.
std::vector<PreferencePair> build_preference_pairs(std::span<const CandidateSet> candidates,
                                                   PairingPolicy policy = PairingPolicy::FirstPair);

struct DifficultyRecord {
  std::string pair_id;
  double pairwise_pass_at_1 = 0.0;
  std::vector<bool> draws;

  bool operator==(const DifficultyRecord&) const = default;
};

nlohmann::json to_json(const DifficultyRecord& record);
DifficultyRecord difficulty_from_json(const nlohmann::json& j);

/// Draw i is correct iff completion i is accepted on both sides.
DifficultyRecord score_difficulty(const CandidateSet& vulnerable, const CandidateSet& patched);

/// Keeps records with 0 < pass@1 < 1.
std::vector<DifficultyRecord> filter_extremes(std::span<const DifficultyRecord> records);

enum class ScheduleMode { Random, Curriculum, Paired };

std::string_view to_string(ScheduleMode mode) noexcept;
std::optional<ScheduleMode> parse_schedule_mode(std::string_view text) noexcept;

/// A pair to schedule, with both member sample ids resolved.
struct ScheduledPair {
  std::string pair_id;
  std::string vulnerable_id;
  std::string patched_id;
  double pass_at_1 = 0.0;
};

/// Joins difficulty records with the corpus. Throws DataError when a pair is
/// missing or incomplete.
std::vector<ScheduledPair> resolve_pairs(std::span<const DifficultyRecord> records, const Corpus& corpus);

struct Schedule {
  ScheduleMode mode = ScheduleMode::Random;
  std::size_t batch_size = 1;
  std::vector<std::vector<std::string>> batches;

  bool operator==(const Schedule&) const = default;
};

nlohmann::json to_json(const Schedule& schedule);
Schedule schedule_from_json(const nlohmann::json& j);

/// Random: seeded shuffle of all samples. Curriculum: pairs by descending
/// pass@1 (ties by pair_id), vulnerable member first. Paired: curriculum
/// order with every pair inside one batch; batch_size must be even.
Schedule schedule(std::span<const ScheduledPair> pairs, ScheduleMode mode, std::size_t batch_size,
                  std::uint64_t seed);

}  // namespace vdpost
