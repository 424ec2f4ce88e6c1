// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 vdpost Contributors

#include "vdpost/curation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <unordered_set>

#include "vdpost/error.hpp"

namespace vdpost {

using nlohmann::json;

std::size_t CandidateSet::accepted_count() const {
  return static_cast<std::size_t>(
      std::count_if(judgments.begin(), judgments.end(), [](const JudgeVerdict& v) { return v.accepted(); }));
}

void CandidateSet::validate() const {
  if (!judgments.empty() && judgments.size() != completions.size())
    throw DataError("candidate set '" + sample_id + "': " + std::to_string(completions.size()) + " completions but " +
                    std::to_string(judgments.size()) + " judgments");
  for (const auto& j : judgments)
    if (j.role != role) throw DataError("candidate set '" + sample_id + "': judgment role differs from sample role");
}

json to_json(const CandidateSet& set) {
  json completions = json::array();
  for (const auto& c : set.completions) completions.push_back(to_json(c));
  json judgments = json::array();
  for (const auto& v : set.judgments) judgments.push_back({{"option", to_string(v.option)}, {"justification", v.justification}});
  return {{"sample_id", set.sample_id}, {"pair_id", set.pair_id},     {"role", to_string(set.role)},
          {"query", set.query},         {"completions", completions}, {"judgments", judgments}};
}

CandidateSet candidate_set_from_json(const json& j) {
  CandidateSet set;
  try {
    set.sample_id = j.at("sample_id").get<std::string>();
    set.pair_id = j.value("pair_id", "");
    auto role = parse_role(j.at("role").get<std::string>());
    if (!role) throw DataError("candidate set '" + set.sample_id + "': invalid role");
    set.role = *role;
    set.query = j.value("query", "");
    for (const auto& c : j.at("completions")) set.completions.push_back(completion_from_json(c));
    if (auto it = j.find("judgments"); it != j.end()) {
      for (const auto& v : *it) {
        auto option = parse_judge_option(v.at("option").get<std::string>());
        if (!option || !option_allowed(*option, set.role))
          throw DataError("candidate set '" + set.sample_id + "': invalid judge option");
        set.judgments.push_back({set.role, *option, v.value("justification", "")});
      }
    }
  } catch (const json::exception& e) {
    throw DataError(std::string("malformed candidate set: ") + e.what());
  }
  set.validate();
  return set;
}

namespace {

void require_judged(const CandidateSet& set) {
  set.validate();
  if (set.judgments.size() != set.completions.size())
    throw DataError("candidate set '" + set.sample_id + "' has not been judged");
}

}  // namespace

json to_json(const SftRecord& r) { return {{"sample_id", r.sample_id}, {"query", r.query}, {"response", r.response}}; }

std::vector<SftRecord> rejection_sample(std::span<const CandidateSet> candidates, KeepPolicy policy) {
  std::vector<SftRecord> out;
  for (const auto& set : candidates) {
    require_judged(set);
    for (std::size_t i = 0; i < set.size(); ++i) {
      if (!set.judgments[i].accepted()) continue;
      out.push_back({set.sample_id, set.query, set.completions[i].raw_text});
      if (policy == KeepPolicy::FirstCorrect) break;
    }
  }
  return out;
}

json to_json(const PreferencePair& p) {
  return {{"sample_id", p.sample_id}, {"query", p.query}, {"chosen", p.chosen.raw_text}, {"rejected", p.rejected.raw_text}};
}

std::vector<PreferencePair> build_preference_pairs(std::span<const CandidateSet> candidates, PairingPolicy policy) {
  std::vector<PreferencePair> out;
  for (const auto& set : candidates) {
    require_judged(set);
    std::vector<std::size_t> good, bad;
    for (std::size_t i = 0; i < set.size(); ++i) (set.judgments[i].accepted() ? good : bad).push_back(i);
    if (good.empty() || bad.empty()) continue;
    if (policy == PairingPolicy::FirstPair) {
      out.push_back({set.sample_id, set.query, set.completions[good.front()], set.completions[bad.front()]});
      continue;
    }
    for (std::size_t g : good)
      for (std::size_t b : bad) out.push_back({set.sample_id, set.query, set.completions[g], set.completions[b]});
  }
  return out;
}

json to_json(const DifficultyRecord& r) {
  return {{"pair_id", r.pair_id}, {"pass_at_1", r.pairwise_pass_at_1}, {"draws", r.draws}};
}

DifficultyRecord difficulty_from_json(const json& j) {
  DifficultyRecord r;
  try {
    r.pair_id = j.at("pair_id").get<std::string>();
    r.draws = j.at("draws").get<std::vector<bool>>();
    r.pairwise_pass_at_1 = j.at("pass_at_1").get<double>();
  } catch (const json::exception& e) {
    throw DataError(std::string("malformed difficulty record: ") + e.what());
  }
  if (r.draws.empty()) throw DataError("difficulty record '" + r.pair_id + "' has no draws");
  const double mean = static_cast<double>(std::count(r.draws.begin(), r.draws.end(), true)) /
                      static_cast<double>(r.draws.size());
  if (std::abs(mean - r.pairwise_pass_at_1) > 1e-12)
    throw DataError("difficulty record '" + r.pair_id + "': pass_at_1 disagrees with its draws");
  r.pairwise_pass_at_1 = mean;
  return r;
}

DifficultyRecord score_difficulty(const CandidateSet& vulnerable, const CandidateSet& patched) {
  require_judged(vulnerable);
  require_judged(patched);
  if (vulnerable.role != Role::Vulnerable || patched.role != Role::Patched)
    throw ArgumentError("score_difficulty expects (vulnerable, patched) candidate sets");
  if (vulnerable.pair_id != patched.pair_id)
    throw ArgumentError("score_difficulty: sets belong to different pairs ('" + vulnerable.pair_id + "', '" +
                        patched.pair_id + "')");
  if (vulnerable.size() != patched.size())
    throw ArgumentError("score_difficulty: mismatched N (" + std::to_string(vulnerable.size()) + " vs " +
                        std::to_string(patched.size()) + ")");
  if (vulnerable.size() == 0) throw ArgumentError("score_difficulty: empty candidate sets");
  DifficultyRecord r;
  r.pair_id = vulnerable.pair_id;
  std::size_t hits = 0;
  for (std::size_t i = 0; i < vulnerable.size(); ++i) {
    const bool ok = vulnerable.judgments[i].accepted() && patched.judgments[i].accepted();
    r.draws.push_back(ok);
    hits += ok;
  }
  r.pairwise_pass_at_1 = static_cast<double>(hits) / static_cast<double>(vulnerable.size());
  return r;
}

std::vector<DifficultyRecord> filter_extremes(std::span<const DifficultyRecord> records) {
  std::vector<DifficultyRecord> out;
  for (const auto& r : records)
    if (r.pairwise_pass_at_1 > 0.0 && r.pairwise_pass_at_1 < 1.0) out.push_back(r);
  return out;
}

std::string_view to_string(ScheduleMode mode) noexcept {
  switch (mode) {
    case ScheduleMode::Random: return "random";
    case ScheduleMode::Curriculum: return "curriculum";
    case ScheduleMode::Paired: return "paired";
  }
  return "random";
}

std::optional<ScheduleMode> parse_schedule_mode(std::string_view text) noexcept {
  for (auto m : {ScheduleMode::Random, ScheduleMode::Curriculum, ScheduleMode::Paired})
    if (text == to_string(m)) return m;
  return std::nullopt;
}

std::vector<ScheduledPair> resolve_pairs(std::span<const DifficultyRecord> records, const Corpus& corpus) {
  std::vector<ScheduledPair> out;
  std::unordered_set<std::string> seen;
  for (const auto& r : records) {
    const PairIndex* pair = corpus.find_pair(r.pair_id);
    if (!pair) throw DataError("difficulty record names pair '" + r.pair_id + "' which is not in the corpus");
    if (!seen.insert(r.pair_id).second) throw DataError("pair '" + r.pair_id + "' is listed twice");
    out.push_back({r.pair_id, corpus.vulnerable(*pair).sample_id, corpus.patched(*pair).sample_id, r.pairwise_pass_at_1});
  }
  return out;
}

json to_json(const Schedule& s) {
  return {{"mode", to_string(s.mode)}, {"batch_size", s.batch_size}, {"batches", s.batches}};
}

Schedule schedule_from_json(const json& j) {
  Schedule s;
  try {
    auto mode = parse_schedule_mode(j.at("mode").get<std::string>());
    if (!mode) throw DataError("schedule: unknown mode");
    s.mode = *mode;
    s.batch_size = j.at("batch_size").get<std::size_t>();
    s.batches = j.at("batches").get<std::vector<std::vector<std::string>>>();
  } catch (const json::exception& e) {
    throw DataError(std::string("malformed schedule: ") + e.what());
  }
  return s;
}

namespace {

// Unbiased draw from [0, bound) without relying on a library distribution,
// whose algorithm is implementation-defined.
std::uint64_t bounded(std::mt19937_64& rng, std::uint64_t bound) {
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - std::numeric_limits<std::uint64_t>::max() % bound;
  std::uint64_t x;
  do x = rng();
  while (x >= limit);
  return x % bound;
}

}  // namespace

Schedule schedule(std::span<const ScheduledPair> pairs, ScheduleMode mode, std::size_t batch_size, std::uint64_t seed) {
  if (batch_size == 0) throw ArgumentError("batch_size must be positive");
  if (mode == ScheduleMode::Paired && batch_size % 2 != 0)
    throw ArgumentError("paired scheduling needs an even batch_size, got " + std::to_string(batch_size));
  for (const auto& p : pairs)
    if (p.vulnerable_id.empty() || p.patched_id.empty())
      throw DataError("pair '" + p.pair_id + "' is incomplete");

  std::vector<const ScheduledPair*> order;
  for (const auto& p : pairs) order.push_back(&p);
  if (mode != ScheduleMode::Random)
    std::stable_sort(order.begin(), order.end(), [](const ScheduledPair* a, const ScheduledPair* b) {
      if (a->pass_at_1 != b->pass_at_1) return a->pass_at_1 > b->pass_at_1;
      return a->pair_id < b->pair_id;
    });

  std::vector<std::string> flat;
  for (const auto* p : order) {
    flat.push_back(p->vulnerable_id);
    flat.push_back(p->patched_id);
  }
  if (mode == ScheduleMode::Random) {
    std::mt19937_64 rng(seed);
    for (std::size_t i = flat.size(); i > 1; --i) std::swap(flat[i - 1], flat[bounded(rng, i)]);
  }

  Schedule s;
  s.mode = mode;
  s.batch_size = batch_size;
  for (std::size_t i = 0; i < flat.size(); i += batch_size)
    s.batches.emplace_back(flat.begin() + static_cast<std::ptrdiff_t>(i),
                           flat.begin() + static_cast<std::ptrdiff_t>(std::min(flat.size(), i + batch_size)));
  return s;
}

}  // namespace vdpost
