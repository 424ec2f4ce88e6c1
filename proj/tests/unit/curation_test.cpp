// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 vdpost Contributors

#include <gtest/gtest.h>

#include <algorithm>
#include <set>

#include "curation_fixture.hpp"
#include "vdpost/curation.hpp"
#include "vdpost/error.hpp"

namespace vdpost {
namespace {

using testing::load_curation_fixture;

std::vector<DifficultyRecord> fixture_difficulty(const testing::CurationFixture& f) {
  std::vector<DifficultyRecord> out;
  for (const auto& pair : f.corpus.pairs()) {
    const CandidateSet *v = nullptr, *p = nullptr;
    for (const auto& c : f.candidates) {
      if (c.sample_id == f.corpus.vulnerable(pair).sample_id) v = &c;
      if (c.sample_id == f.corpus.patched(pair).sample_id) p = &c;
    }
    out.push_back(score_difficulty(*v, *p));
  }
  return out;
}

TEST(RejectionSampling, RetainsExactlyJudgedCorrectQueries) {
  const auto f = load_curation_fixture();
  const auto records = rejection_sample(f.candidates);
  std::set<std::string> kept;
  for (const auto& r : records) EXPECT_TRUE(kept.insert(r.sample_id).second) << "first-correct keeps one per query";
  EXPECT_EQ(kept, testing::oracle_retained(f.raw));
  EXPECT_EQ(records.size(), 13u);
}

TEST(RejectionSampling, FirstCorrectPicksEarliestAcceptedDraw) {
  const auto f = load_curation_fixture();
  const auto records = rejection_sample(f.candidates);
  const auto it = std::find_if(records.begin(), records.end(), [](const auto& r) { return r.sample_id == "pair-f-v"; });
  ASSERT_NE(it, records.end());
  EXPECT_NE(it->response.find("Analysis 1 of pair-f-v"), std::string::npos);

  const auto all = rejection_sample(f.candidates, KeepPolicy::AllCorrect);
  EXPECT_EQ(std::count_if(all.begin(), all.end(), [](const auto& r) { return r.sample_id == "pair-d-p"; }), 6);
}

TEST(PreferencePairs, NeedBothOutcomes) {
  const auto f = load_curation_fixture();
  const auto pairs = build_preference_pairs(f.candidates);
  std::set<std::string> ids;
  for (const auto& p : pairs) ids.insert(p.sample_id);
  EXPECT_EQ(ids, (std::set<std::string>{"pair-c-p", "pair-d-v", "pair-d-p", "pair-f-v", "pair-g-v", "pair-h-v"}));
  for (const auto& p : pairs)
    if (p.sample_id == "pair-d-v") {
      EXPECT_NE(p.chosen.raw_text.find("Analysis 0"), std::string::npos);
      EXPECT_NE(p.rejected.raw_text.find("Analysis 1"), std::string::npos);
    }
  // pair-d-v: 4 accepted x 4 rejected.
  const auto cart = build_preference_pairs(f.candidates, PairingPolicy::Cartesian);
  EXPECT_EQ(std::count_if(cart.begin(), cart.end(), [](const auto& p) { return p.sample_id == "pair-d-v"; }), 16);
}

TEST(CandidateSet, ValidatesParallelArrays) {
  auto f = load_curation_fixture();
  auto set = f.candidates.front();
  set.judgments.pop_back();
  EXPECT_THROW(set.validate(), DataError);
  auto raw = f.raw.front();
  raw["judgments"][0]["option"] = "UNKNOWN";  // not a vulnerable-side option
  EXPECT_THROW(candidate_set_from_json(raw), DataError);
  EXPECT_EQ(candidate_set_from_json(to_json(f.candidates[3])).accepted_count(), f.candidates[3].accepted_count());
}

TEST(Difficulty, MatchesOracle) {
  const auto f = load_curation_fixture();
  const auto oracle = testing::oracle_pass_at_1(f.raw);
  for (const auto& r : fixture_difficulty(f)) EXPECT_DOUBLE_EQ(r.pairwise_pass_at_1, oracle.at(r.pair_id)) << r.pair_id;
  EXPECT_THROW(score_difficulty(f.candidates[0], f.candidates[0]), ArgumentError);
}

TEST(Difficulty, FilterDropsOnlyExtremes) {
  const auto f = load_curation_fixture();
  const auto all = fixture_difficulty(f);
  const auto kept = filter_extremes(all);
  std::set<std::string> ids;
  for (const auto& r : kept) ids.insert(r.pair_id);
  EXPECT_EQ(ids, (std::set<std::string>{"pair-c", "pair-d", "pair-f", "pair-g", "pair-h"}));
  const auto j = to_json(all[3]);
  EXPECT_EQ(difficulty_from_json(j), all[3]);
  auto bad = j;
  bad["pass_at_1"] = 0.5;
  EXPECT_THROW(difficulty_from_json(bad), DataError);
}

std::vector<std::string> flatten(const Schedule& s) {
  std::vector<std::string> out;
  for (const auto& b : s.batches) out.insert(out.end(), b.begin(), b.end());
  return out;
}

TEST(Schedule, CurriculumIsNonIncreasing) {
  const auto f = load_curation_fixture();
  const auto pairs = resolve_pairs(fixture_difficulty(f), f.corpus);
  const auto s = schedule(pairs, ScheduleMode::Curriculum, 3, 1);
  const auto order = flatten(s);
  ASSERT_EQ(order.size(), 16u);
  const auto oracle = testing::oracle_pass_at_1(f.raw);
  for (std::size_t i = 1; i < order.size(); ++i) {
    const auto pi = oracle.at(f.corpus.find(order[i - 1])->pair_id);
    const auto pj = oracle.at(f.corpus.find(order[i])->pair_id);
    EXPECT_GE(pi, pj);
  }
  EXPECT_EQ(order.front(), "pair-a-v");
  EXPECT_EQ(order[1], "pair-a-p");
  EXPECT_EQ(s.batches.size(), 6u);
  EXPECT_EQ(s.batches.back().size(), 1u);
}

TEST(Schedule, PairedNeverSplitsAPair) {
  const auto f = load_curation_fixture();
  const auto pairs = resolve_pairs(fixture_difficulty(f), f.corpus);
  const auto s = schedule(pairs, ScheduleMode::Paired, 4, 1);
  for (const auto& b : s.batches) {
    std::map<std::string, int> count;
    for (const auto& id : b) ++count[f.corpus.find(id)->pair_id];
    for (const auto& [pair, n] : count) EXPECT_EQ(n, 2) << pair;
  }
  EXPECT_THROW(schedule(pairs, ScheduleMode::Paired, 3, 1), ArgumentError);
}

TEST(Schedule, RandomIsASeededPermutation) {
  const auto f = load_curation_fixture();
  const auto pairs = resolve_pairs(fixture_difficulty(f), f.corpus);
  const auto a = schedule(pairs, ScheduleMode::Random, 5, 42);
  const auto b = schedule(pairs, ScheduleMode::Random, 5, 42);
  EXPECT_EQ(a, b);
  auto order = flatten(a);
  std::vector<std::string> all;
  for (const auto& s : f.corpus.samples()) all.push_back(s.sample_id);
  std::sort(order.begin(), order.end());
  std::sort(all.begin(), all.end());
  EXPECT_EQ(order, all);
  EXPECT_NE(flatten(schedule(pairs, ScheduleMode::Random, 5, 43)), flatten(a));
  EXPECT_EQ(schedule_from_json(to_json(a)), a);
  EXPECT_THROW(schedule(pairs, ScheduleMode::Random, 0, 1), ArgumentError);
}

TEST(Schedule, ResolveRejectsUnknownPairs) {
  const auto f = load_curation_fixture();
  DifficultyRecord r{"pair-zz", 0.5, {true, false}};
  EXPECT_THROW(resolve_pairs(std::vector<DifficultyRecord>{r}, f.corpus), DataError);
}

}  // namespace
}  // namespace vdpost
