// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 vdpost Contributors

// LLM-as-a-judge protocols: reasoning-level correctness judging, per-sample
// rubric (checklist) generation, and rubric-based judging. Parsers are pure
// functions so they can be exercised without an endpoint.

#pragma once

#include <array>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "vdpost/completion.hpp"
#include "vdpost/corpus.hpp"
#include "vdpost/gateway.hpp"

namespace vdpost {

/// Reasoning-level judge options. Vulnerable samples use {Correct,
/// PartiallyIncorrect, Incorrect}; patched samples {Correct, Unknown, Incorrect}.
enum class JudgeOption { Correct, PartiallyIncorrect, Unknown, Incorrect };

std::string_view to_string(JudgeOption option) noexcept;
/// Wire spelling, e.g. "PARTIALLY INCORRECT". Case and '_' vs ' ' are
/// tolerated; nullopt for anything else.
std::optional<JudgeOption> parse_judge_option(std::string_view text) noexcept;
bool option_allowed(JudgeOption option, Role role) noexcept;

struct JudgeVerdict {
  Role role = Role::Vulnerable;
  JudgeOption option = JudgeOption::Incorrect;
  std::string justification;

  /// Vulnerable: Correct. Patched: Correct or Unknown.
  bool accepted() const noexcept;
  bool operator==(const JudgeVerdict&) const = default;
};

nlohmann::json to_json(const JudgeVerdict& verdict);
JudgeVerdict judge_verdict_from_json(const nlohmann::json& j);

enum class SpecPhase { PrePatch, PostPatch };

std::string_view to_string(SpecPhase phase) noexcept;  // "pre_patch" / "post_patch"
std::optional<SpecPhase> parse_spec_phase(std::string_view text) noexcept;
SpecPhase phase_for(Role role) noexcept;

/// Dimension names in canonical order: verdict, evidence, reasoning.
const std::array<std::string_view, 3>& spec_dimensions(SpecPhase phase) noexcept;

struct ChecklistItem {
  std::string dimension;
  std::string description;

  bool operator==(const ChecklistItem&) const = default;
};

struct SpecChecklist {
  SpecPhase phase = SpecPhase::PrePatch;
  std::vector<ChecklistItem> items;  // exactly 3, canonical order

  bool operator==(const SpecChecklist&) const = default;
};

nlohmann::json to_json(const SpecChecklist& checklist);
/// Validates like parse_spec_checklist (without a role constraint).
SpecChecklist spec_checklist_from_json(const nlohmann::json& j);

enum class DimensionOption { Correct, PartiallyCorrect, Incorrect };

std::string_view to_string(DimensionOption option) noexcept;
std::optional<DimensionOption> parse_dimension_option(std::string_view text) noexcept;

struct DimensionJudgment {
  std::string dimension;
  DimensionOption option = DimensionOption::Incorrect;
  std::string justification;

  bool operator==(const DimensionJudgment&) const = default;
};

nlohmann::json to_json(const DimensionJudgment& judgment);
DimensionJudgment dimension_judgment_from_json(const nlohmann::json& j);

// --- reply parsing ---------------------------------------------------------

/// Isolates the single JSON object in a judge reply. Accepts a bare object or
/// one fenced code block wrapping it (after removing any <think> block).
/// Anything else throws JudgeProtocolError::NotJson.
nlohmann::json extract_json_object(std::string_view reply);

JudgeVerdict parse_judge_verdict(std::string_view reply, Role role);
SpecChecklist parse_spec_checklist(std::string_view reply, Role role);
/// Returns the three judgments in canonical dimension order. The verdict
/// dimension only admits Correct / Incorrect.
std::vector<DimensionJudgment> parse_dimension_judgments(std::string_view reply, SpecPhase phase);

// --- prompt rendering --------------------------------------------------------

Prompt render_reasoning_judge_prompt(std::string_view analysis, const GroundTruth& truth, Role role);
Prompt render_spec_generation_prompt(const Sample& sample);
Prompt render_spec_judge_prompt(std::string_view analysis, const SpecChecklist& checklist);

std::vector<ChatMessage> to_messages(const Prompt& prompt);

/// Appended as a follow-up turn before the single protocol retry.
inline constexpr std::string_view kJsonOnlyReminder =
    "Output JSON only: reply with the single JSON object in the required format and nothing else.";

// --- endpoint protocols --------------------------------------------------------

JudgeVerdict judge_reasoning(const Gateway& judge, std::string_view analysis, const GroundTruth& truth, Role role);
SpecChecklist generate_specification(const Gateway& generator, const Sample& sample);
std::vector<DimensionJudgment> judge_specification(const Gateway& judge, std::string_view analysis,
                                                   const SpecChecklist& checklist);
/// chat(n) followed by parse_completion on each transcript.
std::vector<Completion> sample_completions(const Gateway& policy, const Prompt& query, int n);

}  // namespace vdpost
