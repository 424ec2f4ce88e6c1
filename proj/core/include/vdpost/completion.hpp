// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 vdpost Contributors

// Parsing of raw model transcripts into verdicts and CWE predictions.

#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "vdpost/cwe_taxonomy.hpp"
#include "vdpost/logprob.hpp"

namespace vdpost {

enum class Verdict { HasVul, NoVul, Unparseable };

std::string_view to_string(Verdict verdict) noexcept;
std::optional<Verdict> parse_verdict_name(std::string_view text) noexcept;

struct Completion {
  std::string raw_text;
  std::optional<std::string> think_block;
  std::string answer_text;
  Verdict verdict = Verdict::Unparseable;
  std::vector<CweId> predicted_cwes;
  std::optional<LogProbSequence> logprobs;

  bool operator==(const Completion&) const = default;
};

struct ReasoningSplit {
  std::optional<std::string> think_block;
  std::string answer_text;
};

/// Separates a <think>...</think> block from the answer. The first span's
/// content becomes `think_block`; every well-formed span is removed from the
/// answer, and an unclosed <think> truncates the answer at the tag.
ReasoningSplit strip_reasoning(std::string_view text);

/// Last line whose trimmed content is exactly HAS_VUL or NO_VUL wins.
Verdict parse_verdict(std::string_view text);

/// Order-preserving, de-duplicated CWE-<digits> matches (case-insensitive).
std::vector<CweId> extract_cwes(std::string_view text);

/// Applies strip_reasoning, then parse_verdict and extract_cwes to the answer.
Completion parse_completion(std::string raw_text);

/// Persisted form keeps only raw_text (+ logprobs); derived fields are
/// recomputed on load so they can never drift from the parser.
nlohmann::json to_json(const Completion& completion);
Completion completion_from_json(const nlohmann::json& j);

}  // namespace vdpost
