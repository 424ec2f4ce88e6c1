// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 vdpost Contributors

#include <gtest/gtest.h>

#include <random>

#include "metrics_fixture.hpp"
#include "vdpost/error.hpp"
#include "vdpost/metrics.hpp"

namespace vdpost {
namespace {

constexpr Granularity kLevels[3] = {Granularity::Detection, Granularity::Prediction, Granularity::Reasoning};

TEST(PassAtK, MatchesBruteForceOracle) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 1 + rng() % 12, g = 1 + rng() % 8;
    std::vector<std::vector<bool>> rows(n, std::vector<bool>(g));
    for (auto& r : rows)
      for (std::size_t j = 0; j < g; ++j) r[j] = rng() % 3 == 0;
    const OutcomeMatrix m(rows);
    EXPECT_NEAR(pass_at_1(m), testing::oracle_pass_at_1(rows), 1e-12);
    for (std::size_t k = 1; k <= g; ++k) EXPECT_NEAR(pass_at_k(m, k), testing::oracle_pass_at_k(rows, k), 1e-12);
  }
}

TEST(PassAtK, RejectsBadShapes) {
  EXPECT_THROW(OutcomeMatrix({{true, false}, {true}}), ArgumentError);
  EXPECT_THROW(OutcomeMatrix(std::vector<std::vector<bool>>{std::vector<bool>{}}), ArgumentError);
  const OutcomeMatrix m({{true, false}});
  EXPECT_THROW(pass_at_k(m, 0), ArgumentError);
  EXPECT_THROW(pass_at_k(m, 3), ArgumentError);
  EXPECT_THROW(pass_at_1(OutcomeMatrix{}), ArgumentError);
}

TEST(Classify, HandLabeledFixture) {
  const auto f = testing::load_metrics_fixture();
  Confusion got[3];
  for (const auto& item : f.items)
    for (int l = 0; l < 3; ++l) {
      const Outcome o = classify(item.completion, &item.judgment, item.truth, item.role, kLevels[l], f.taxonomy);
      EXPECT_EQ(o, item.expected[l]) << item.id << " at " << to_string(kLevels[l]);
      got[l].add(o);
    }
  for (int l = 0; l < 3; ++l) EXPECT_EQ(got[l], f.expected[l]) << to_string(kLevels[l]);
  EXPECT_GE(got[0].tp, got[1].tp);
  EXPECT_GE(got[1].tp, got[2].tp);
}

TEST(Classify, ReasoningNeedsJudgment) {
  const auto f = testing::load_metrics_fixture();
  const auto& item = f.items.front();
  EXPECT_THROW(classify(item.completion, nullptr, item.truth, item.role, Granularity::Reasoning, f.taxonomy),
               ArgumentError);
  EXPECT_NO_THROW(classify(item.completion, nullptr, item.truth, item.role, Granularity::Prediction, f.taxonomy));
}

TEST(Prf, StandardFormulasWithZeroGuards) {
  const auto r = prf({6, 5, 3, 2});
  EXPECT_DOUBLE_EQ(r.recall, 6.0 / 8.0);
  EXPECT_DOUBLE_EQ(r.precision, 6.0 / 11.0);
  EXPECT_DOUBLE_EQ(r.f1, 2.0 * 6.0 / (2.0 * 6.0 + 5.0 + 2.0));
  const auto z = prf({0, 0, 4, 0});
  EXPECT_EQ(z.recall, 0.0);
  EXPECT_EQ(z.precision, 0.0);
  EXPECT_EQ(z.f1, 0.0);
}

TEST(PairMetrics, FractionsSumToOne) {
  const std::vector<PairOutcome> outcomes{{"a", true, true}, {"b", true, false}, {"c", false, true},
                                          {"d", false, false}, {"e", true, true}};
  const auto m = pair_metrics(outcomes);
  EXPECT_DOUBLE_EQ(m.p_c, 0.4);
  EXPECT_DOUBLE_EQ(m.p_v, 0.2);
  EXPECT_DOUBLE_EQ(m.p_b, 0.2);
  EXPECT_DOUBLE_EQ(m.p_r, 0.2);
  EXPECT_DOUBLE_EQ(m.p_c + m.p_b + m.p_v + m.p_r, 1.0);
  EXPECT_THROW(pair_metrics(std::span<const PairOutcome>{}), ArgumentError);
}

TEST(Agreement, AuditVector) {
  const auto doc = nlohmann::json::parse(testing::read_file(testing::fixture("judge_agreement_audit.json")));
  const auto human = testing::bits(doc.at("human"));
  const auto judge = testing::bits(doc.at("judge"));
  bool hv[400], jv[400];
  ASSERT_EQ(human.size(), 400u);
  for (std::size_t i = 0; i < 400; ++i) hv[i] = human[i], jv[i] = judge[i];
  const auto counts = judge_agreement(std::span<const bool>(jv, 400), std::span<const bool>(hv, 400));
  EXPECT_EQ(counts.correct_judgments, 341u);
  EXPECT_EQ(counts.incorrect_judgments, 59u);
  EXPECT_THROW(judge_agreement(std::span<const bool>(jv, 3), std::span<const bool>(hv, 4)), ArgumentError);
}

TEST(Shift, CountsTriples) {
  const auto f = testing::load_metrics_fixture();
  std::vector<ShiftRecord> records;
  for (const auto& item : f.items) records.push_back({item.id, item.expected[0], item.expected[1], item.expected[2]});
  const auto shift = granularity_shift(records);
  EXPECT_EQ(shift.total(), 16u);
  EXPECT_EQ(shift.count(Outcome::TP, Outcome::TP, Outcome::TP), 2u);
  EXPECT_EQ(shift.detection_count(Outcome::TP), 6u);
  EXPECT_DOUBLE_EQ(shift.prediction_ratio(Outcome::TP, Outcome::TP), 4.0 / 6.0);
  EXPECT_EQ(shift.prediction_ratio(Outcome::TN, Outcome::FN), 0.0);
  records.push_back({"x", Outcome::TP, std::nullopt, Outcome::TP});
  EXPECT_THROW(granularity_shift(records), ArgumentError);
}

}  // namespace
}  // namespace vdpost
