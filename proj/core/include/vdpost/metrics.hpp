// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 vdpost Contributors

#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "vdpost/completion.hpp"
#include "vdpost/corpus.hpp"
#include "vdpost/cwe_taxonomy.hpp"
#include "vdpost/judge.hpp"
#include "vdpost/rewards.hpp"

namespace vdpost {

/// p[i][j]: correctness of response j for sample i. Rectangular, G >= 1.
class OutcomeMatrix {
 public:
  OutcomeMatrix() = default;
  /// Throws ArgumentError on ragged rows or zero-width rows.
  explicit OutcomeMatrix(std::vector<std::vector<bool>> rows);

  std::size_t samples() const noexcept { return rows_.size(); }
  std::size_t responses() const noexcept { return rows_.empty() ? 0 : rows_.front().size(); }
  bool empty() const noexcept { return rows_.empty(); }
  const std::vector<bool>& row(std::size_t i) const { return rows_.at(i); }

 private:
  std::vector<std::vector<bool>> rows_;
};

double pass_at_1(const OutcomeMatrix& p);
/// Mean over samples of 1 - prod_{j<k}(1 - p[i][j]); requires 1 <= k <= G.
double pass_at_k(const OutcomeMatrix& p, std::size_t k);

enum class Outcome { TP, FP, TN, FN };

std::string_view to_string(Outcome outcome) noexcept;
std::optional<Outcome> parse_outcome(std::string_view text) noexcept;
inline bool is_correct(Outcome o) noexcept { return o == Outcome::TP || o == Outcome::TN; }

/// Classifies one response. Detection compares the verdict with the role.
/// Prediction and Reasoning additionally need a parseable verdict; on the
/// vulnerable side a TP needs HAS_VUL plus a related CWE (Prediction) or an
/// accepted judgment (Reasoning). Patched samples are TN when the answer is
/// NO_VUL, or names only unrelated CWEs (Prediction) / is judged Correct or
/// Unknown (Reasoning). Reasoning without a judgment throws ArgumentError.
Outcome classify(const Completion& completion, const JudgeVerdict* judgment, const GroundTruth& truth, Role role,
                 Granularity granularity, const CweTaxonomy& tax);

struct Confusion {
  std::size_t tp = 0, fp = 0, tn = 0, fn = 0;

  void add(Outcome o) noexcept;
  std::size_t total() const noexcept { return tp + fp + tn + fn; }
  bool operator==(const Confusion&) const = default;
};

struct Prf {
  double recall = 0.0;
  double precision = 0.0;
  double f1 = 0.0;
};

/// Standard formulas; every 0/0 is reported as 0.
Prf prf(const Confusion& c) noexcept;

struct PairOutcome {
  std::string pair_id;
  bool vuln_correct = false;
  bool patch_correct = false;
};

struct PairMetrics {
  double p_c = 0.0;  // both correct
  double p_b = 0.0;  // both called benign
  double p_v = 0.0;  // both called vulnerable
  double p_r = 0.0;  // both wrong
};

/// Fractions of pairs; throws ArgumentError on empty input.
PairMetrics pair_metrics(std::span<const PairOutcome> outcomes);

struct ShiftRecord {
  std::string completion_ref;
  std::optional<Outcome> detection;
  std::optional<Outcome> prediction;
  std::optional<Outcome> reasoning;
};

/// Counts of every (detection, prediction, reasoning) outcome triple.
class ShiftMatrix {
 public:
  std::size_t count(Outcome detection, Outcome prediction, Outcome reasoning) const noexcept;
  void add(Outcome detection, Outcome prediction, Outcome reasoning) noexcept;
  std::size_t total() const noexcept;

  /// Count of records with the given detection outcome.
  std::size_t detection_count(Outcome detection) const noexcept;
  /// Among records with `detection`, fraction whose prediction is `prediction`.
  /// 0 when there are none.
  double prediction_ratio(Outcome detection, Outcome prediction) const noexcept;

  nlohmann::json to_json() const;
  bool operator==(const ShiftMatrix&) const = default;

 private:
  static std::size_t index(Outcome d, Outcome p, Outcome r) noexcept;
  std::array<std::size_t, 64> cells_{};
};

/// Throws ArgumentError when a record lacks one of the three outcomes.
ShiftMatrix granularity_shift(std::span<const ShiftRecord> records);

struct AgreementCounts {
  std::size_t correct_judgments = 0;
  std::size_t incorrect_judgments = 0;
};

/// Positions where judge and human agree / disagree.
AgreementCounts judge_agreement(std::span<const bool> judge, std::span<const bool> human);

struct GranularityReport {
  Granularity granularity = Granularity::Reasoning;
  double pass_at_1 = 0.0;
  double pass_at_k = 0.0;
  std::size_t k = 1;
  Confusion confusion;
  Prf prf;
  PairMetrics pairs;
};

struct MetricsReport {
  std::vector<GranularityReport> levels;  // detection, prediction, reasoning
  Granularity headline = Granularity::Reasoning;
  ShiftMatrix shift;

  const GranularityReport& at(Granularity g) const;
  nlohmann::json to_json() const;
  /// Aligned-column text table.
  std::string to_table() const;
};

nlohmann::json to_json(const GranularityReport& report);

}  // namespace vdpost
