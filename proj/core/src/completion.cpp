// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 vdpost Contributors

#include "vdpost/completion.hpp"

#include <cctype>
#include <cmath>
#include <regex>
#include <unordered_set>

#include "vdpost/error.hpp"

namespace vdpost {

std::string_view to_string(PolicyTag tag) noexcept {
  switch (tag) {
    case PolicyTag::Theta: return "theta";
    case PolicyTag::Ref: return "ref";
    case PolicyTag::Old: return "old";
  }
  return "theta";
}

std::optional<PolicyTag> parse_policy_tag(std::string_view text) noexcept {
  if (text == "theta") return PolicyTag::Theta;
  if (text == "ref") return PolicyTag::Ref;
  if (text == "old") return PolicyTag::Old;
  return std::nullopt;
}

std::string_view to_string(Verdict verdict) noexcept {
  switch (verdict) {
    case Verdict::HasVul: return "HAS_VUL";
    case Verdict::NoVul: return "NO_VUL";
    case Verdict::Unparseable: return "UNPARSEABLE";
  }
  return "UNPARSEABLE";
}

std::optional<Verdict> parse_verdict_name(std::string_view text) noexcept {
  if (text == "HAS_VUL") return Verdict::HasVul;
  if (text == "NO_VUL") return Verdict::NoVul;
  if (text == "UNPARSEABLE") return Verdict::Unparseable;
  return std::nullopt;
}

namespace {

constexpr std::string_view kOpen = "<think>";
constexpr std::string_view kClose = "</think>";

// One left-to-right pass; returns false when nothing was removed.
bool strip_once(std::string_view text, ReasoningSplit& out, bool record_think) {
  std::string answer;
  std::size_t pos = 0;
  bool removed = false;
  while (true) {
    const std::size_t open = text.find(kOpen, pos);
    if (open == std::string_view::npos) {
      answer.append(text.substr(pos));
      break;
    }
    removed = true;
    answer.append(text.substr(pos, open - pos));
    const std::size_t body = open + kOpen.size();
    const std::size_t close = text.find(kClose, body);
    if (close == std::string_view::npos) {
      if (record_think && !out.think_block) out.think_block = std::string(text.substr(body));
      break;
    }
    if (record_think && !out.think_block) out.think_block = std::string(text.substr(body, close - body));
    pos = close + kClose.size();
  }
  out.answer_text = std::move(answer);
  return removed;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

}  // namespace

ReasoningSplit strip_reasoning(std::string_view text) {
  ReasoningSplit out;
  if (!strip_once(text, out, true)) return out;
  // Removing a span can splice a new tag together; repeat until stable.
  while (true) {
    ReasoningSplit next;
    if (!strip_once(out.answer_text, next, false)) break;
    out.answer_text = std::move(next.answer_text);
  }
  return out;
}

Verdict parse_verdict(std::string_view text) {
  Verdict verdict = Verdict::Unparseable;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    const std::string_view line = trim(text.substr(pos, end - pos));
    if (line == "HAS_VUL") verdict = Verdict::HasVul;
    else if (line == "NO_VUL") verdict = Verdict::NoVul;
    pos = end + 1;
  }
  return verdict;
}

std::vector<CweId> extract_cwes(std::string_view text) {
  static const std::regex pattern("cwe-([0-9]+)", std::regex::icase | std::regex::optimize);
  std::vector<CweId> out;
  std::unordered_set<std::uint32_t> seen;
  for (std::cregex_iterator it(text.data(), text.data() + text.size(), pattern), end; it != end; ++it) {
    auto id = CweId::parse(it->str());
    if (id && seen.insert(id->number()).second) out.push_back(*id);
  }
  return out;
}

Completion parse_completion(std::string raw_text) {
  Completion c;
  ReasoningSplit split = strip_reasoning(raw_text);
  c.raw_text = std::move(raw_text);
  c.think_block = std::move(split.think_block);
  c.answer_text = std::move(split.answer_text);
  c.verdict = parse_verdict(c.answer_text);
  c.predicted_cwes = extract_cwes(c.answer_text);
  return c;
}

nlohmann::json to_json(const Completion& completion) {
  nlohmann::json j = {{"raw_text", completion.raw_text}};
  if (completion.logprobs)
    j["logprobs"] = {{"tag", to_string(completion.logprobs->tag)}, {"values", completion.logprobs->values}};
  return j;
}

Completion completion_from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("raw_text") || !j["raw_text"].is_string())
    throw DataError("completion record needs a string \"raw_text\"");
  Completion c = parse_completion(j["raw_text"].get<std::string>());
  if (auto it = j.find("logprobs"); it != j.end() && !it->is_null()) {
    LogProbSequence seq;
    auto tag = parse_policy_tag(it->value("tag", "theta"));
    if (!tag) throw DataError("completion logprobs: unknown tag");
    seq.tag = *tag;
    try {
      seq.values = it->at("values").get<std::vector<double>>();
    } catch (const nlohmann::json::exception&) {
      throw DataError("completion logprobs: \"values\" must be an array of numbers");
    }
    for (double v : seq.values)
      if (!std::isfinite(v) || v > 0) throw DataError("completion logprobs: values must be finite and non-positive");
    c.logprobs = std::move(seq);
  }
  return c;
}

}  // namespace vdpost
