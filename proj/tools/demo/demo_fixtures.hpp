// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 vdpost Contributors

// Synthetic corpus plus mock-server fixtures covering every endpoint role, so
// the whole pipeline runs offline.

#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "vdpost/corpus.hpp"
#include "vdpost/mock_server.hpp"

namespace vdpost::demo {

struct DemoOptions {
  int candidates = 8;
  int max_in_flight = 4;
  int policy_delay_ms = 5;
  bool inject_failures = true;  // 500, 500 on one policy request; 429 on one judge request
  std::vector<std::string> pair_ids;  // empty: every pair
};

struct DemoBundle {
  Corpus corpus;
  nlohmann::json taxonomy;  // edge-list document
  std::vector<Fixture> fixtures;
  nlohmann::json config;    // relative paths, base_url placeholder

  /// Draw letters per sample id for the policy and the teacher.
  std::vector<std::pair<std::string, std::string>> policy_plan;
  std::vector<std::pair<std::string, std::string>> teacher_plan;
};

inline constexpr const char* kPlaceholderUrl = "http://127.0.0.1:1";

DemoBundle build_demo(const DemoOptions& options = {});

/// Writes corpus.jsonl, cwe_edges.json, fixtures.jsonl and config.json into
/// `dir` and returns the config path.
std::filesystem::path write_demo(const std::filesystem::path& dir, const DemoBundle& bundle,
                                 const std::string& base_url = kPlaceholderUrl);

}  // namespace vdpost::demo
