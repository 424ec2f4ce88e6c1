// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 vdpost Contributors

#include <algorithm>
#include <cctype>
#include <set>

#include "vdpost/error.hpp"
#include "vdpost/judge.hpp"

namespace vdpost {

using nlohmann::json;
using Kind = JudgeProtocolError::Kind;

const char* to_string(JudgeProtocolError::Kind kind) noexcept {
  switch (kind) {
    case Kind::NotJson: return "not_json";
    case Kind::SchemaViolation: return "schema_violation";
    case Kind::BadOption: return "bad_option";
    case Kind::BadPhase: return "bad_phase";
    case Kind::BadDimensionSet: return "bad_dimension_set";
    case Kind::BadCardinality: return "bad_cardinality";
  }
  return "unknown";
}

namespace {

// Upper-case, '_' read as ' ', runs of blanks collapsed, ends trimmed.
std::string canonical_option(std::string_view text) {
  std::string out;
  for (char c : text) {
    const char u = c == '_' ? ' ' : static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    if (std::isspace(static_cast<unsigned char>(u))) {
      if (!out.empty() && out.back() != ' ') out += ' ';
    } else {
      out += u;
    }
  }
  if (!out.empty() && out.back() == ' ') out.pop_back();
  return out;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

[[noreturn]] void fail(Kind kind, const std::string& what) { throw JudgeProtocolError(kind, what); }

const json& member(const json& obj, const char* key, json::value_t type, const std::string& where) {
  auto it = obj.find(key);
  if (it == obj.end()) fail(Kind::SchemaViolation, where + ": missing key \"" + key + "\"");
  if (it->type() != type) fail(Kind::SchemaViolation, where + ": key \"" + key + "\" has the wrong type");
  return *it;
}

std::string string_member(const json& obj, const char* key, const std::string& where) {
  return member(obj, key, json::value_t::string, where).get<std::string>();
}

}  // namespace

// --- enums -------------------------------------------------------------------

std::string_view to_string(JudgeOption option) noexcept {
  switch (option) {
    case JudgeOption::Correct: return "CORRECT";
    case JudgeOption::PartiallyIncorrect: return "PARTIALLY INCORRECT";
    case JudgeOption::Unknown: return "UNKNOWN";
    case JudgeOption::Incorrect: return "INCORRECT";
  }
  return "INCORRECT";
}

std::optional<JudgeOption> parse_judge_option(std::string_view text) noexcept {
  const std::string c = canonical_option(text);
  if (c == "CORRECT") return JudgeOption::Correct;
  if (c == "PARTIALLY INCORRECT") return JudgeOption::PartiallyIncorrect;
  if (c == "UNKNOWN") return JudgeOption::Unknown;
  if (c == "INCORRECT") return JudgeOption::Incorrect;
  return std::nullopt;
}

bool option_allowed(JudgeOption option, Role role) noexcept {
  if (role == Role::Vulnerable) return option != JudgeOption::Unknown;
  return option != JudgeOption::PartiallyIncorrect;
}

bool JudgeVerdict::accepted() const noexcept {
  if (option == JudgeOption::Correct) return true;
  return role == Role::Patched && option == JudgeOption::Unknown;
}

json to_json(const JudgeVerdict& v) {
  return {{"role", to_string(v.role)}, {"option", to_string(v.option)}, {"justification", v.justification}};
}

JudgeVerdict judge_verdict_from_json(const json& j) {
  if (!j.is_object()) throw DataError("judge verdict must be an object");
  auto role = parse_role(j.value("role", ""));
  auto option = parse_judge_option(j.value("option", ""));
  if (!role || !option) throw DataError("judge verdict needs a valid \"role\" and \"option\"");
  if (!option_allowed(*option, *role))
    throw DataError("judge option " + std::string(to_string(*option)) + " is not valid for a " +
                    std::string(to_string(*role)) + " sample");
  return {*role, *option, j.value("justification", "")};
}

std::string_view to_string(SpecPhase phase) noexcept {
  return phase == SpecPhase::PrePatch ? "pre_patch" : "post_patch";
}

std::optional<SpecPhase> parse_spec_phase(std::string_view text) noexcept {
  if (text == "pre_patch") return SpecPhase::PrePatch;
  if (text == "post_patch") return SpecPhase::PostPatch;
  return std::nullopt;
}

SpecPhase phase_for(Role role) noexcept { return role == Role::Vulnerable ? SpecPhase::PrePatch : SpecPhase::PostPatch; }

const std::array<std::string_view, 3>& spec_dimensions(SpecPhase phase) noexcept {
  static constexpr std::array<std::string_view, 3> kPre{"Verdict_Recall", "Evidence_Insecure_Code",
                                                        "Reasoning_Mechanism"};
  static constexpr std::array<std::string_view, 3> kPost{"Verdict_Absence_of_Specific_Vuln", "Evidence_Safeguard_Code",
                                                         "Reasoning_Resolution"};
  return phase == SpecPhase::PrePatch ? kPre : kPost;
}

std::string_view to_string(DimensionOption option) noexcept {
  switch (option) {
    case DimensionOption::Correct: return "CORRECT";
    case DimensionOption::PartiallyCorrect: return "PARTIALLY CORRECT";
    case DimensionOption::Incorrect: return "INCORRECT";
  }
  return "INCORRECT";
}

std::optional<DimensionOption> parse_dimension_option(std::string_view text) noexcept {
  const std::string c = canonical_option(text);
  if (c == "CORRECT") return DimensionOption::Correct;
  if (c == "PARTIALLY CORRECT") return DimensionOption::PartiallyCorrect;
  if (c == "INCORRECT") return DimensionOption::Incorrect;
  return std::nullopt;
}

json to_json(const DimensionJudgment& d) {
  return {{"dimension", d.dimension}, {"option", to_string(d.option)}, {"justification", d.justification}};
}

DimensionJudgment dimension_judgment_from_json(const json& j) {
  if (!j.is_object()) throw DataError("dimension judgment must be an object");
  auto option = parse_dimension_option(j.value("option", ""));
  if (!option || !j.contains("dimension")) throw DataError("dimension judgment needs \"dimension\" and a valid \"option\"");
  return {j.at("dimension").get<std::string>(), *option, j.value("justification", "")};
}

// --- checklist ---------------------------------------------------------------

namespace {

SpecChecklist checklist_from_object(const json& j, std::optional<SpecPhase> expected) {
  if (!j.is_object()) fail(Kind::SchemaViolation, "checklist reply is not a JSON object");
  const std::string phase_text = string_member(j, "phase", "checklist");
  auto phase = parse_spec_phase(phase_text);
  if (!phase) fail(Kind::BadPhase, "unknown phase \"" + phase_text + "\"");
  if (expected && *phase != *expected)
    fail(Kind::BadPhase, "phase \"" + phase_text + "\" does not match the sample (expected \"" +
                             std::string(to_string(*expected)) + "\")");
  const json& items = member(j, "checklist", json::value_t::array, "checklist");
  if (items.size() != 3)
    fail(Kind::BadCardinality, "checklist holds " + std::to_string(items.size()) + " items, expected exactly 3");

  const auto& names = spec_dimensions(*phase);
  SpecChecklist out;
  out.phase = *phase;
  out.items.resize(3);
  std::array<bool, 3> seen{};
  for (std::size_t i = 0; i < items.size(); ++i) {
    const json& item = items[i];
    const std::string where = "checklist[" + std::to_string(i) + "]";
    if (!item.is_object()) fail(Kind::SchemaViolation, where + " is not an object");
    std::string dimension = string_member(item, "dimension", where);
    std::string description = string_member(item, "description", where);
    auto pos = std::find(names.begin(), names.end(), dimension);
    if (pos == names.end())
      fail(Kind::BadDimensionSet, "dimension \"" + dimension + "\" is not a " + phase_text + " dimension");
    const auto slot = static_cast<std::size_t>(pos - names.begin());
    if (seen[slot]) fail(Kind::BadDimensionSet, "dimension \"" + dimension + "\" appears twice");
    seen[slot] = true;
    out.items[slot] = {std::move(dimension), std::move(description)};
  }
  return out;
}

}  // namespace

json to_json(const SpecChecklist& c) {
  json items = json::array();
  for (const auto& item : c.items) items.push_back({{"dimension", item.dimension}, {"description", item.description}});
  return {{"phase", to_string(c.phase)}, {"checklist", std::move(items)}};
}

SpecChecklist spec_checklist_from_json(const json& j) { return checklist_from_object(j, std::nullopt); }

// --- reply parsing -------------------------------------------------------------

json extract_json_object(std::string_view reply) {
  const ReasoningSplit split = strip_reasoning(reply);
  std::string_view body = trim(split.answer_text);
  if (body.starts_with("```")) {
    if (body.size() < 6 || !body.ends_with("```"))
      fail(Kind::NotJson, "unterminated code fence");
    std::string_view inner = body.substr(3, body.size() - 6);
    const std::size_t newline = inner.find('\n');
    if (newline == std::string_view::npos) fail(Kind::NotJson, "code fence without content");
    const std::string_view info = trim(inner.substr(0, newline));
    if (!std::all_of(info.begin(), info.end(), [](unsigned char c) { return std::isalnum(c) || c == '_' || c == '-'; }))
      fail(Kind::NotJson, "malformed code fence");
    inner = inner.substr(newline + 1);
    if (inner.find("```") != std::string_view::npos) fail(Kind::NotJson, "more than one code block");
    body = trim(inner);
  }
  if (!body.starts_with("{")) fail(Kind::NotJson, "reply is not a single JSON object");
  json j = json::parse(body, nullptr, false);
  if (j.is_discarded() || !j.is_object()) fail(Kind::NotJson, "reply is not a single JSON object");
  return j;
}

JudgeVerdict parse_judge_verdict(std::string_view reply, Role role) {
  try {
    const json j = extract_json_object(reply);
    const json& c = member(j, "correctness", json::value_t::object, "reply");
    std::string justification = string_member(c, "justification", "correctness");
    const std::string option_text = string_member(c, "option", "correctness");
    auto option = parse_judge_option(option_text);
    if (!option) fail(Kind::BadOption, "unknown option \"" + option_text + "\"");
    if (!option_allowed(*option, role))
      fail(Kind::BadOption, "option \"" + option_text + "\" is not allowed for a " + std::string(to_string(role)) +
                                " sample");
    return {role, *option, std::move(justification)};
  } catch (JudgeProtocolError& e) {
    e.set_raw_reply(std::string(reply));
    throw;
  }
}

SpecChecklist parse_spec_checklist(std::string_view reply, Role role) {
  try {
    return checklist_from_object(extract_json_object(reply), phase_for(role));
  } catch (JudgeProtocolError& e) {
    e.set_raw_reply(std::string(reply));
    throw;
  }
}

std::vector<DimensionJudgment> parse_dimension_judgments(std::string_view reply, SpecPhase phase) {
  try {
    const json j = extract_json_object(reply);
    const auto& names = spec_dimensions(phase);
    for (const auto& [key, _] : j.items())
      if (std::find(names.begin(), names.end(), key) == names.end())
        fail(Kind::BadDimensionSet, "unexpected dimension \"" + key + "\"");
    std::vector<DimensionJudgment> out;
    for (std::size_t i = 0; i < names.size(); ++i) {
      const std::string name(names[i]);
      auto it = j.find(name);
      if (it == j.end()) fail(Kind::BadDimensionSet, "missing dimension \"" + name + "\"");
      if (!it->is_object()) fail(Kind::SchemaViolation, "dimension \"" + name + "\" is not an object");
      std::string justification = string_member(*it, "justification", name);
      const std::string option_text = string_member(*it, "option", name);
      auto option = parse_dimension_option(option_text);
      if (!option) fail(Kind::BadOption, name + ": unknown option \"" + option_text + "\"");
      if (i == 0 && *option == DimensionOption::PartiallyCorrect)
        fail(Kind::BadOption, name + ": the verdict dimension only admits CORRECT or INCORRECT");
      out.push_back({name, *option, std::move(justification)});
    }
    return out;
  } catch (JudgeProtocolError& e) {
    e.set_raw_reply(std::string(reply));
    throw;
  }
}

// --- endpoint protocols ------------------------------------------------------------

namespace {

// One request; on a protocol error, one more with the reply and a JSON-only
// reminder appended to the conversation.
template <typename Parse>
auto ask_json(const Gateway& gateway, std::vector<ChatMessage> messages, Parse parse) {
  std::string reply = gateway.chat(messages, 1).at(0);
  try {
    return parse(reply);
  } catch (const JudgeProtocolError&) {
    messages.push_back({"assistant", std::move(reply)});
    messages.push_back({"user", std::string(kJsonOnlyReminder)});
  }
  const std::string second = gateway.chat(messages, 1).at(0);
  return parse(second);
}

}  // namespace

JudgeVerdict judge_reasoning(const Gateway& judge, std::string_view analysis, const GroundTruth& truth, Role role) {
  if (trim(analysis).empty()) throw ArgumentError("judge_reasoning: analysis is empty");
  return ask_json(judge, to_messages(render_reasoning_judge_prompt(analysis, truth, role)),
                  [role](std::string_view reply) { return parse_judge_verdict(reply, role); });
}

SpecChecklist generate_specification(const Gateway& generator, const Sample& sample) {
  return ask_json(generator, to_messages(render_spec_generation_prompt(sample)),
                  [role = sample.role](std::string_view reply) { return parse_spec_checklist(reply, role); });
}

std::vector<DimensionJudgment> judge_specification(const Gateway& judge, std::string_view analysis,
                                                   const SpecChecklist& checklist) {
  if (trim(analysis).empty()) throw ArgumentError("judge_specification: analysis is empty");
  return ask_json(judge, to_messages(render_spec_judge_prompt(analysis, checklist)),
                  [phase = checklist.phase](std::string_view reply) { return parse_dimension_judgments(reply, phase); });
}

std::vector<Completion> sample_completions(const Gateway& policy, const Prompt& query, int n) {
  if (n < 1) throw ArgumentError("sample_completions: n must be at least 1");
  const auto transcripts = policy.chat(to_messages(query), n);
  std::vector<Completion> out;
  out.reserve(transcripts.size());
  for (const auto& t : transcripts) out.push_back(parse_completion(t));
  return out;
}

}  // namespace vdpost
