// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 vdpost Contributors

#pragma once

#include <ostream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "test_support.hpp"
#include "vdpost/error.hpp"
#include "vdpost/judge.hpp"

namespace vdpost::testing {

struct JudgeCase {
  std::string name;
  nlohmann::json spec;
  bool valid = false;
};

inline void PrintTo(const JudgeCase& c, std::ostream* os) { *os << c.name; }

inline std::vector<JudgeCase> load_judge_cases() {
  const auto doc = nlohmann::json::parse(read_file(fixture("judge_protocol_cases.json")));
  std::vector<JudgeCase> out;
  for (const auto& c : doc.at("valid")) out.push_back({c.at("name"), c, true});
  for (const auto& c : doc.at("adversarial")) out.push_back({c.at("name"), c, false});
  return out;
}

/// Parsed summary (option, phase or comma-joined options) or the error kind.
inline std::string run_judge_case(const nlohmann::json& c) {
  const std::string schema = c.at("schema");
  const std::string reply = c.at("reply");
  try {
    if (schema == "verdict") {
      return std::string(to_string(parse_judge_verdict(reply, *parse_role(c.at("role").get<std::string>())).option));
    }
    if (schema == "checklist") {
      return std::string(to_string(parse_spec_checklist(reply, *parse_role(c.at("role").get<std::string>())).phase));
    }
    const auto dims = parse_dimension_judgments(reply, *parse_spec_phase(c.at("phase").get<std::string>()));
    std::string joined;
    for (const auto& d : dims) joined += (joined.empty() ? "" : ",") + std::string(to_string(d.option));
    return joined;
  } catch (const JudgeProtocolError& e) {
    return to_string(e.kind());
  } catch (const std::exception& e) {
    return std::string("untyped: ") + e.what();
  }
}

}  // namespace vdpost::testing
