// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 vdpost Contributors

#pragma once

#include <array>
#include <optional>
#include <span>
#include <string>
#include <string_view>

#include <nlohmann/json.hpp>

#include "vdpost/completion.hpp"
#include "vdpost/corpus.hpp"
#include "vdpost/cwe_taxonomy.hpp"
#include "vdpost/judge.hpp"

namespace vdpost {

enum class Granularity { Detection, Prediction, Reasoning, Specification };

std::string_view to_string(Granularity granularity) noexcept;
std::optional<Granularity> parse_granularity(std::string_view text) noexcept;

struct RewardSignal {
  Granularity granularity = Granularity::Detection;
  double value = 0.0;     // outcome levels: exactly +-1; specification: [-1, 1]
  nlohmann::json evidence;
};

/// +1 iff the verdict matches the role; Unparseable is always -1.
RewardSignal detection_reward(const Completion& completion, Role role);

/// Vulnerable: +1 iff the verdict is HAS_VUL and some predicted CWE is
/// related to the truth. Patched: +1 iff the verdict is NO_VUL or no
/// prediction relates to the truth. Unparseable is -1 for both roles.
RewardSignal prediction_reward(const Completion& completion, const GroundTruth& truth, Role role,
                               const CweTaxonomy& tax);

/// +1 iff the judge accepted the analysis; throws ArgumentError when the
/// option is outside the role's enum.
RewardSignal reasoning_reward(const JudgeVerdict& verdict, Role role);

/// Weights for the verdict / evidence / reasoning dimensions.
struct SpecWeights {
  std::array<double, 3> weights{1.0, 1.0, 1.0};
};

/// Weighted mean of Correct=+1, PartiallyCorrect=0, Incorrect=-1. Throws
/// ArgumentError unless the judgments carry exactly one phase's dimensions.
RewardSignal specification_reward(std::span<const DimensionJudgment> judgments, const SpecWeights& weights = {});

nlohmann::json to_json(const RewardSignal& signal);

}  // namespace vdpost
