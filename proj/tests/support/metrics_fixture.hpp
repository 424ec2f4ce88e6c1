// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 vdpost Contributors

#pragma once

#include <string>
#include <vector>

#include "test_support.hpp"
#include "vdpost/metrics.hpp"

namespace vdpost::testing {

struct LabeledCompletion {
  std::string id;
  std::string pair_id;
  Role role = Role::Vulnerable;
  GroundTruth truth;
  Completion completion;
  JudgeVerdict judgment;
  Outcome expected[3];  // detection, prediction, reasoning
};

struct MetricsFixture {
  CweTaxonomy taxonomy;
  std::vector<LabeledCompletion> items;
  Confusion expected[3];
};

inline MetricsFixture load_metrics_fixture() {
  const auto doc = nlohmann::json::parse(read_file(fixture("metrics_hand_labeled.json")));
  MetricsFixture f;
  f.taxonomy = load_taxonomy(fixture(doc.at("taxonomy")), TaxonomyFormat::OfficialXml);
  const char* levels[3] = {"detection", "prediction", "reasoning"};
  for (const auto& c : doc.at("completions")) {
    LabeledCompletion item;
    item.id = c.at("id");
    item.pair_id = c.at("pair_id");
    item.role = *parse_role(c.at("role").get<std::string>());
    item.truth.cwe_ids = c.at("truth").get<std::vector<std::string>>();
    item.completion = parse_completion(c.at("raw_text"));
    item.judgment = {item.role, *parse_judge_option(c.at("judgment").get<std::string>()), ""};
    for (int l = 0; l < 3; ++l) item.expected[l] = *parse_outcome(c.at("expected").at(levels[l]).get<std::string>());
    f.items.push_back(std::move(item));
  }
  for (int l = 0; l < 3; ++l) {
    const auto& e = doc.at("expected_confusion").at(levels[l]);
    f.expected[l] = {e.at("TP"), e.at("FP"), e.at("TN"), e.at("FN")};
  }
  return f;
}

inline std::vector<bool> bits(const std::string& s) {
  std::vector<bool> out;
  for (char c : s) out.push_back(c == '1');
  return out;
}

}  // namespace vdpost::testing
