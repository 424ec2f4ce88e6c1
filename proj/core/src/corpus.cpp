// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 vdpost Contributors

#include "vdpost/corpus.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <set>
#include <unordered_set>

#include "vdpost/cwe_taxonomy.hpp"
#include "vdpost/error.hpp"
#include "vdpost/jsonl.hpp"

namespace vdpost {

using nlohmann::json;

std::string_view to_string(Role role) noexcept {
  return role == Role::Vulnerable ? "vulnerable" : "patched";
}

std::optional<Role> parse_role(std::string_view text) noexcept {
  std::string lower(text);
  std::transform(lower.begin(), lower.end(), lower.begin(), [](unsigned char c) { return std::tolower(c); });
  if (lower == "vulnerable") return Role::Vulnerable;
  if (lower == "patched") return Role::Patched;
  return std::nullopt;
}

// --- Date ------------------------------------------------------------------

std::optional<Date> Date::parse(std::string_view text) {
  if (text.size() != 10 || text[4] != '-' || text[7] != '-') return std::nullopt;
  auto number = [&](std::size_t pos, std::size_t len, int& out) {
    const char* first = text.data() + pos;
    const char* last = first + len;
    auto [ptr, ec] = std::from_chars(first, last, out);
    return ec == std::errc{} && ptr == last;
  };
  int y = 0, m = 0, d = 0;
  if (!number(0, 4, y) || !number(5, 2, m) || !number(8, 2, d)) return std::nullopt;
  const std::chrono::year_month_day ymd{std::chrono::year{y}, std::chrono::month{static_cast<unsigned>(m)},
                                        std::chrono::day{static_cast<unsigned>(d)}};
  if (m < 1 || d < 1 || !ymd.ok()) return std::nullopt;
  return Date{y, static_cast<unsigned>(m), static_cast<unsigned>(d)};
}

std::string Date::to_string() const {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "%04d-%02u-%02u", year, month, day);
  return buf;
}

bool ContextBundle::empty() const noexcept {
  return includes.empty() && type_definitions.empty() && macros.empty() && global_variables.empty() &&
         callee_functions.empty();
}

// --- JSON ------------------------------------------------------------------

namespace {

[[noreturn]] void schema_error(const std::string& field, const std::string& problem) {
  throw CorpusError(0, "field '" + field + "' " + problem);
}

const json& require(const json& obj, const char* key, const std::string& path) {
  auto it = obj.find(key);
  if (it == obj.end()) schema_error(path, "is missing");
  return *it;
}

std::string require_string(const json& obj, const char* key, const std::string& prefix = {}) {
  const std::string path = prefix + key;
  const json& v = require(obj, key, path);
  if (!v.is_string()) schema_error(path, "must be a string");
  return v.get<std::string>();
}

std::vector<std::string> string_list(const json& obj, const char* key, const std::string& prefix, bool required) {
  const std::string path = prefix + key;
  auto it = obj.find(key);
  if (it == obj.end()) {
    if (required) schema_error(path, "is missing");
    return {};
  }
  if (!it->is_array()) schema_error(path, "must be an array of strings");
  std::vector<std::string> out;
  out.reserve(it->size());
  for (const auto& item : *it) {
    if (!item.is_string()) schema_error(path, "must be an array of strings");
    out.push_back(item.get<std::string>());
  }
  return out;
}

}  // namespace

json to_json(const Sample& s) {
  return json{
      {"sample_id", s.sample_id},
      {"pair_id", s.pair_id},
      {"role", to_string(s.role)},
      {"code", s.code},
      {"context",
       {{"includes", s.context.includes},
        {"type_definitions", s.context.type_definitions},
        {"macros", s.context.macros},
        {"global_variables", s.context.global_variables},
        {"callee_functions", s.context.callee_functions}}},
      {"file_path", s.file_path},
      {"method_name", s.method_name},
      {"project", s.project},
      {"commit_date", s.commit_date.to_string()},
      {"ground_truth",
       {{"cwe_ids", s.ground_truth.cwe_ids},
        {"cve_description", s.ground_truth.cve_description},
        {"commit_message", s.ground_truth.commit_message},
        {"patch_diff", s.ground_truth.patch_diff}}},
  };
}

Sample sample_from_json(const json& j) {
  if (!j.is_object()) throw CorpusError(0, "record is not a JSON object");
  Sample s;
  s.sample_id = require_string(j, "sample_id");
  s.pair_id = require_string(j, "pair_id");
  const std::string role = require_string(j, "role");
  auto parsed_role = parse_role(role);
  if (!parsed_role) schema_error("role", "must be \"vulnerable\" or \"patched\", got \"" + role + "\"");
  s.role = *parsed_role;
  s.code = require_string(j, "code");
  if (s.code.empty()) schema_error("code", "must be non-empty");

  const json& ctx = require(j, "context", "context");
  if (!ctx.is_object()) schema_error("context", "must be an object");
  s.context.includes = string_list(ctx, "includes", "context.", false);
  s.context.type_definitions = string_list(ctx, "type_definitions", "context.", false);
  s.context.macros = string_list(ctx, "macros", "context.", false);
  s.context.global_variables = string_list(ctx, "global_variables", "context.", false);
  s.context.callee_functions = string_list(ctx, "callee_functions", "context.", false);

  s.file_path = require_string(j, "file_path");
  s.method_name = require_string(j, "method_name");
  s.project = require_string(j, "project");
  const std::string date = require_string(j, "commit_date");
  auto parsed_date = Date::parse(date);
  if (!parsed_date) schema_error("commit_date", "is not a valid YYYY-MM-DD date: \"" + date + "\"");
  s.commit_date = *parsed_date;

  const json& gt = require(j, "ground_truth", "ground_truth");
  if (!gt.is_object()) schema_error("ground_truth", "must be an object");
  auto cwes = string_list(gt, "cwe_ids", "ground_truth.", true);
  if (cwes.empty()) schema_error("ground_truth.cwe_ids", "must be non-empty");
  for (auto& id : cwes) {
    auto parsed = CweId::parse(id);
    if (!parsed) schema_error("ground_truth.cwe_ids", "contains invalid identifier \"" + id + "\"");
    id = parsed->to_string();
  }
  s.ground_truth.cwe_ids = std::move(cwes);
  s.ground_truth.cve_description = require_string(gt, "cve_description", "ground_truth.");
  s.ground_truth.commit_message = require_string(gt, "commit_message", "ground_truth.");
  s.ground_truth.patch_diff = require_string(gt, "patch_diff", "ground_truth.");
  return s;
}

// --- Corpus ----------------------------------------------------------------

Corpus::Corpus(std::vector<Sample> samples) : samples_(std::move(samples)) {
  struct Slots {
    std::optional<std::size_t> vulnerable, patched;
  };
  std::unordered_map<std::string, Slots> slots;
  std::vector<std::string> order;
  for (std::size_t i = 0; i < samples_.size(); ++i) {
    const Sample& s = samples_[i];
    if (s.code.empty()) throw CorpusError(0, "sample '" + s.sample_id + "': code is empty");
    if (s.ground_truth.cwe_ids.empty())
      throw CorpusError(0, "sample '" + s.sample_id + "': ground_truth.cwe_ids is empty");
    if (!by_sample_.emplace(s.sample_id, i).second) throw CorpusError(0, "duplicate sample_id '" + s.sample_id + "'");
    auto [it, inserted] = slots.try_emplace(s.pair_id);
    if (inserted) order.push_back(s.pair_id);
    auto& slot = s.role == Role::Vulnerable ? it->second.vulnerable : it->second.patched;
    if (slot)
      throw CorpusError(0, "pair '" + s.pair_id + "' has more than one " + std::string(to_string(s.role)) + " sample");
    slot = i;
  }
  for (const auto& pair_id : order) {
    const Slots& slot = slots.at(pair_id);
    if (!slot.vulnerable || !slot.patched) {
      const std::size_t only = slot.vulnerable ? *slot.vulnerable : *slot.patched;
      throw CorpusError(0, "unpaired sample '" + samples_[only].sample_id + "': pair '" + pair_id +
                               "' has no " + (slot.vulnerable ? "patched" : "vulnerable") + " member");
    }
    by_pair_.emplace(pair_id, pairs_.size());
    pairs_.push_back({pair_id, *slot.vulnerable, *slot.patched});
  }
}

const Sample* Corpus::find(std::string_view sample_id) const {
  auto it = by_sample_.find(std::string(sample_id));
  return it == by_sample_.end() ? nullptr : &samples_[it->second];
}

const PairIndex* Corpus::find_pair(std::string_view pair_id) const {
  auto it = by_pair_.find(std::string(pair_id));
  return it == by_pair_.end() ? nullptr : &pairs_[it->second];
}

Date Corpus::pair_date(const PairIndex& pair) const {
  return std::max(samples_[pair.vulnerable].commit_date, samples_[pair.patched].commit_date);
}

Corpus Corpus::subset(const std::vector<std::string>& pair_ids) const {
  std::unordered_set<std::string> keep(pair_ids.begin(), pair_ids.end());
  std::vector<Sample> out;
  for (const Sample& s : samples_)
    if (keep.contains(s.pair_id)) out.push_back(s);
  return Corpus(std::move(out));
}

Corpus parse_corpus(std::istream& in) {
  std::vector<Sample> samples;
  std::unordered_set<std::string> seen;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (is_blank(line)) continue;
    json record;
    try {
      record = json::parse(line);
    } catch (const json::parse_error& e) {
      throw CorpusError(line_no, std::string("malformed JSON: ") + e.what());
    }
    if (is_manifest(record)) continue;
    try {
      samples.push_back(sample_from_json(record));
    } catch (const CorpusError& e) {
      throw CorpusError(line_no, e.what());
    }
    if (!seen.insert(samples.back().sample_id).second)
      throw CorpusError(line_no, "duplicate sample_id '" + samples.back().sample_id + "'");
  }
  return Corpus(std::move(samples));
}

Corpus load_corpus(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open corpus file '" + path.string() + "'");
  return parse_corpus(in);
}

void write_corpus(std::ostream& out, const Corpus& corpus) {
  for (const Sample& s : corpus.samples()) out << to_json(s).dump() << '\n';
}

void save_corpus(const std::filesystem::path& path, const Corpus& corpus) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write corpus file '" + path.string() + "'");
  write_corpus(out, corpus);
}

// --- dedup / split ---------------------------------------------------------

namespace {

std::vector<const PairIndex*> chronological(const Corpus& corpus) {
  std::vector<const PairIndex*> order;
  for (const auto& p : corpus.pairs()) order.push_back(&p);
  std::stable_sort(order.begin(), order.end(), [&](const PairIndex* a, const PairIndex* b) {
    const Date da = corpus.pair_date(*a), db = corpus.pair_date(*b);
    if (da != db) return da < db;
    return a->pair_id < b->pair_id;
  });
  return order;
}

std::string dedup_key(const Sample& s) {
  std::string key(to_string(s.role));
  key += '\n';
  key += normalize_whitespace(strip_comments(s.code).text);
  return key;
}

}  // namespace

Corpus deduplicate(const Corpus& corpus) {
  std::unordered_set<std::string> seen;
  std::unordered_set<std::string> kept;
  for (const PairIndex* pair : chronological(corpus)) {
    const std::string kv = dedup_key(corpus.vulnerable(*pair));
    const std::string kp = dedup_key(corpus.patched(*pair));
    if (seen.contains(kv) || seen.contains(kp)) continue;
    seen.insert(kv);
    seen.insert(kp);
    kept.insert(pair->pair_id);
  }
  std::vector<std::string> ids;
  for (const auto& p : corpus.pairs())
    if (kept.contains(p.pair_id)) ids.push_back(p.pair_id);
  return corpus.subset(ids);
}

CorpusSplit split_by_commit_date(const Corpus& corpus, const SplitRatios& r) {
  if (corpus.pair_count() == 0) throw DataError("cannot split an empty corpus");
  if (!(r.train > 0 && r.validation > 0 && r.test > 0))
    throw ArgumentError("split ratios must all be positive");
  if (std::abs(r.train + r.validation + r.test - 1.0) > 1e-9) throw ArgumentError("split ratios must sum to 1");

  const auto order = chronological(corpus);
  const std::size_t n = order.size();
  // Small slack so that e.g. 0.1 * 10 is not floored to 0.
  auto floor_share = [n](double ratio) {
    return static_cast<std::size_t>(std::floor(static_cast<double>(n) * ratio + 1e-9));
  };
  const std::size_t n_val = floor_share(r.validation);
  const std::size_t n_test = floor_share(r.test);
  const std::size_t n_train = n - n_val - n_test;

  CorpusSplit split;
  for (std::size_t i = 0; i < n; ++i) {
    auto& bucket = i < n_train ? split.train : (i < n_train + n_val ? split.validation : split.test);
    bucket.push_back(order[i]->pair_id);
  }
  return split;
}

std::optional<PromptTemplate> parse_prompt_template(std::string_view text) noexcept {
  if (text == "detector") return PromptTemplate::Detector;
  if (text == "rationalization") return PromptTemplate::Rationalization;
  return std::nullopt;
}

// --- statistics --------------------------------------------------------------

std::size_t whitespace_token_count(std::string_view text) {
  std::size_t count = 0;
  bool in_token = false;
  for (unsigned char c : text) {
    const bool space = std::isspace(c) != 0;
    if (!space && !in_token) ++count;
    in_token = !space;
  }
  return count;
}

namespace {

std::string context_text(const ContextBundle& ctx) {
  std::string out;
  for (const auto* list : {&ctx.includes, &ctx.type_definitions, &ctx.macros, &ctx.global_variables,
                           &ctx.callee_functions})
    for (const auto& item : *list) {
      out += item;
      out += '\n';
    }
  return out;
}

TokenSummary summarize(const std::vector<std::size_t>& counts) {
  TokenSummary s;
  if (counts.empty()) return s;
  s.min = *std::min_element(counts.begin(), counts.end());
  s.max = *std::max_element(counts.begin(), counts.end());
  double total = 0;
  for (auto c : counts) total += static_cast<double>(c);
  s.mean = total / static_cast<double>(counts.size());
  return s;
}

}  // namespace

CorpusStats corpus_stats(const Corpus& corpus, const TokenCounter& counter) {
  CorpusStats stats;
  stats.samples = corpus.samples().size();
  stats.pairs = corpus.pair_count();
  std::set<std::string> projects;
  std::set<std::string> cwes;
  std::vector<std::size_t> fn, ctx, input;
  for (const Sample& s : corpus.samples()) {
    projects.insert(s.project);
    cwes.insert(s.ground_truth.cwe_ids.begin(), s.ground_truth.cwe_ids.end());
    fn.push_back(counter(s.code));
    ctx.push_back(counter(context_text(s.context)));
    const Prompt p = render_query(s, PromptTemplate::Detector);
    input.push_back(counter(p.system) + counter(p.user));
  }
  stats.projects = projects.size();
  stats.cwes = cwes.size();
  stats.function_tokens = summarize(fn);
  stats.context_tokens = summarize(ctx);
  stats.input_tokens = summarize(input);
  return stats;
}

}  // namespace vdpost
