// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 vdpost Contributors

#include "vdpost/rewards.hpp"

#include <algorithm>
#include <vector>

#include "vdpost/error.hpp"

namespace vdpost {

using nlohmann::json;

std::string_view to_string(Granularity g) noexcept {
  switch (g) {
    case Granularity::Detection: return "detection";
    case Granularity::Prediction: return "prediction";
    case Granularity::Reasoning: return "reasoning";
    case Granularity::Specification: return "specification";
  }
  return "detection";
}

std::optional<Granularity> parse_granularity(std::string_view text) noexcept {
  for (auto g : {Granularity::Detection, Granularity::Prediction, Granularity::Reasoning, Granularity::Specification})
    if (text == to_string(g)) return g;
  return std::nullopt;
}

namespace {

json cwe_list(std::span<const CweId> ids) {
  json out = json::array();
  for (CweId id : ids) out.push_back(id.to_string());
  return out;
}

}  // namespace

RewardSignal detection_reward(const Completion& completion, Role role) {
  const bool correct = (completion.verdict == Verdict::HasVul && role == Role::Vulnerable) ||
                       (completion.verdict == Verdict::NoVul && role == Role::Patched);
  return {Granularity::Detection, correct ? 1.0 : -1.0,
          {{"verdict", to_string(completion.verdict)}, {"role", to_string(role)}}};
}

RewardSignal prediction_reward(const Completion& completion, const GroundTruth& truth, Role role,
                               const CweTaxonomy& tax) {
  const std::vector<CweId> gold = parse_cwe_list(truth.cwe_ids);
  std::vector<CweId> matched;
  for (CweId p : completion.predicted_cwes)
    if (match_any(std::span<const CweId>(&p, 1), gold, tax)) matched.push_back(p);

  bool correct = false;
  if (completion.verdict != Verdict::Unparseable) {
    if (role == Role::Vulnerable) correct = completion.verdict == Verdict::HasVul && !matched.empty();
    else correct = completion.verdict == Verdict::NoVul || matched.empty();
  }
  return {Granularity::Prediction,
          correct ? 1.0 : -1.0,
          {{"verdict", to_string(completion.verdict)},
           {"role", to_string(role)},
           {"predicted", cwe_list(completion.predicted_cwes)},
           {"matched", cwe_list(matched)}}};
}

RewardSignal reasoning_reward(const JudgeVerdict& verdict, Role role) {
  if (!option_allowed(verdict.option, role))
    throw ArgumentError("judge option " + std::string(to_string(verdict.option)) + " is not valid for a " +
                        std::string(to_string(role)) + " sample");
  const JudgeVerdict as_role{role, verdict.option, verdict.justification};
  return {Granularity::Reasoning, as_role.accepted() ? 1.0 : -1.0,
          {{"option", to_string(verdict.option)}, {"role", to_string(role)}}};
}

RewardSignal specification_reward(std::span<const DimensionJudgment> judgments, const SpecWeights& weights) {
  if (judgments.size() != 3) throw ArgumentError("specification_reward needs exactly 3 dimension judgments");
  std::optional<SpecPhase> phase;
  for (SpecPhase p : {SpecPhase::PrePatch, SpecPhase::PostPatch}) {
    const auto& names = spec_dimensions(p);
    std::vector<std::string_view> given;
    for (const auto& d : judgments) given.push_back(d.dimension);
    if (std::is_permutation(names.begin(), names.end(), given.begin(), given.end())) phase = p;
  }
  if (!phase) throw ArgumentError("dimension judgments do not form one phase's dimension set");
  double total_weight = 0.0;
  for (double w : weights.weights) {
    if (!(w >= 0)) throw ArgumentError("specification weights must be non-negative");
    total_weight += w;
  }
  if (!(total_weight > 0)) throw ArgumentError("specification weights sum to zero");

  const auto& names = spec_dimensions(*phase);
  double sum = 0.0;
  json evidence = {{"phase", to_string(*phase)}, {"dimensions", json::object()}};
  for (const auto& d : judgments) {
    const auto slot = static_cast<std::size_t>(std::find(names.begin(), names.end(), d.dimension) - names.begin());
    const double score = d.option == DimensionOption::Correct ? 1.0 : d.option == DimensionOption::Incorrect ? -1.0 : 0.0;
    sum += weights.weights[slot] * score;
    evidence["dimensions"][d.dimension] = to_string(d.option);
  }
  const double value = std::clamp(sum / total_weight, -1.0, 1.0);
  return {Granularity::Specification, value, std::move(evidence)};
}

json to_json(const RewardSignal& s) {
  return {{"granularity", to_string(s.granularity)}, {"value", s.value}, {"evidence", s.evidence}};
}

}  // namespace vdpost
