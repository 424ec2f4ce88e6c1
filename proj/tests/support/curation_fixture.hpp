// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 vdpost Contributors

#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include "test_support.hpp"
#include "vdpost/curation.hpp"
#include "vdpost/jsonl.hpp"

namespace vdpost::testing {

struct CurationFixture {
  Corpus corpus;
  std::vector<CandidateSet> candidates;
  std::vector<nlohmann::json> raw;  // untouched records for the oracles
};

inline CurationFixture load_curation_fixture() {
  CurationFixture f;
  f.corpus = load_corpus(fixture("curation_corpus.jsonl"));
  f.raw = read_jsonl(fixture("curation_candidates.jsonl"));
  for (const auto& r : f.raw) f.candidates.push_back(candidate_set_from_json(r));
  return f;
}

/// Judge option strings accepted for a role, spelled as on the wire.
inline bool oracle_accepted(const std::string& role, const std::string& option) {
  return option == "CORRECT" || (role == "patched" && option == "UNKNOWN");
}

/// sample ids with at least one accepted judgment.
inline std::set<std::string> oracle_retained(const std::vector<nlohmann::json>& raw) {
  std::set<std::string> out;
  for (const auto& r : raw)
    for (const auto& j : r.at("judgments"))
      if (oracle_accepted(r.at("role"), j.at("option"))) {
        out.insert(r.at("sample_id").get<std::string>());
        break;
      }
  return out;
}

/// pair id -> fraction of draws accepted on both sides.
inline std::map<std::string, double> oracle_pass_at_1(const std::vector<nlohmann::json>& raw) {
  std::map<std::string, std::vector<bool>> vul, pat;
  for (const auto& r : raw) {
    std::vector<bool> ok;
    for (const auto& j : r.at("judgments")) ok.push_back(oracle_accepted(r.at("role"), j.at("option")));
    (r.at("role") == "vulnerable" ? vul : pat)[r.at("pair_id")] = ok;
  }
  std::map<std::string, double> out;
  for (const auto& [pair, v] : vul) {
    const auto& p = pat.at(pair);
    int both = 0;
    for (std::size_t i = 0; i < v.size(); ++i) both += (v[i] && p[i]) ? 1 : 0;
    out[pair] = static_cast<double>(both) / static_cast<double>(v.size());
  }
  return out;
}

}  // namespace vdpost::testing
