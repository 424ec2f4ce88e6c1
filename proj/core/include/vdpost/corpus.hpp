// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 vdpost Contributors

// Context-aware vulnerability corpus: data model, JSONL I/O, comment
// stripping, deduplication and commit-date splitting.

#pragma once

#include <array>
#include <compare>
#include <cstddef>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include <nlohmann/json.hpp>

namespace vdpost {

enum class Role { Vulnerable, Patched };

std::string_view to_string(Role role) noexcept;
/// Accepts "vulnerable" / "patched" (case-insensitive).
std::optional<Role> parse_role(std::string_view text) noexcept;

/// Calendar date in ISO-8601 form (YYYY-MM-DD).
struct Date {
  int year = 1970;
  unsigned month = 1;
  unsigned day = 1;

  /// Returns nullopt for anything that is not a valid proleptic Gregorian date.
  static std::optional<Date> parse(std::string_view text);
  std::string to_string() const;

  auto operator<=>(const Date&) const = default;
};

struct ContextBundle {
  std::vector<std::string> includes;
  std::vector<std::string> type_definitions;
  std::vector<std::string> macros;
  std::vector<std::string> global_variables;
  std::vector<std::string> callee_functions;

  bool empty() const noexcept;
  bool operator==(const ContextBundle&) const = default;
};

struct GroundTruth {
  std::vector<std::string> cwe_ids;  // canonical "CWE-<digits>"
  std::string cve_description;
  std::string commit_message;
  std::string patch_diff;

  bool operator==(const GroundTruth&) const = default;
};

struct Sample {
  std::string sample_id;
  std::string pair_id;
  Role role = Role::Vulnerable;
  std::string code;
  ContextBundle context;
  std::string file_path;
  std::string method_name;
  std::string project;
  Date commit_date;
  GroundTruth ground_truth;

  bool operator==(const Sample&) const = default;
};

nlohmann::json to_json(const Sample& sample);
/// Throws CorpusError (line 0) naming the offending field.
Sample sample_from_json(const nlohmann::json& record);

/// Indices of the two members of one vulnerability-patch pair.
struct PairIndex {
  std::string pair_id;
  std::size_t vulnerable = 0;
  std::size_t patched = 0;
};

/// Immutable, validated set of paired samples.
class Corpus {
 public:
  Corpus() = default;
  /// Validates pairing, uniqueness and field invariants; throws CorpusError.
  explicit Corpus(std::vector<Sample> samples);

  const std::vector<Sample>& samples() const noexcept { return samples_; }
  /// Pairs in order of first appearance.
  const std::vector<PairIndex>& pairs() const noexcept { return pairs_; }
  std::size_t pair_count() const noexcept { return pairs_.size(); }
  bool empty() const noexcept { return samples_.empty(); }

  const Sample* find(std::string_view sample_id) const;
  const PairIndex* find_pair(std::string_view pair_id) const;
  const Sample& vulnerable(const PairIndex& pair) const { return samples_[pair.vulnerable]; }
  const Sample& patched(const PairIndex& pair) const { return samples_[pair.patched]; }
  /// Date used for ordering a pair: the later of the two commit dates.
  Date pair_date(const PairIndex& pair) const;

  /// Keeps only the given pairs, preserving corpus order.
  Corpus subset(const std::vector<std::string>& pair_ids) const;

  bool operator==(const Corpus& other) const { return samples_ == other.samples_; }

 private:
  std::vector<Sample> samples_;
  std::vector<PairIndex> pairs_;
  std::unordered_map<std::string, std::size_t> by_sample_;
  std::unordered_map<std::string, std::size_t> by_pair_;
};

Corpus parse_corpus(std::istream& in);
Corpus load_corpus(const std::filesystem::path& path);
void write_corpus(std::ostream& out, const Corpus& corpus);
void save_corpus(const std::filesystem::path& path, const Corpus& corpus);

struct StrippedSource {
  std::string text;
  bool unterminated_comment = false;
};

/// Removes // and /* */ comments from C/C++-like source. String, character
/// and raw-string literals are kept verbatim. A block comment becomes one
/// space followed by the newlines it spanned; a line comment is dropped up to
/// its newline.
StrippedSource strip_comments(std::string_view code);

/// Collapses whitespace runs to one space and trims both ends.
std::string normalize_whitespace(std::string_view text);

/// Drops pairs whose comment-stripped, whitespace-normalized (role, code)
/// key collides with a pair kept earlier. Pairs are visited by ascending
/// commit date (ties by pair_id) so the earliest pair survives.
Corpus deduplicate(const Corpus& corpus);

struct SplitRatios {
  double train = 0.8;
  double validation = 0.1;
  double test = 0.1;
};

struct CorpusSplit {
  std::vector<std::string> train;
  std::vector<std::string> validation;
  std::vector<std::string> test;
};

/// Chronological pair-level split: earliest pairs train, latest test.
/// Validation and test sizes are floor(n * ratio); train takes the rest.
CorpusSplit split_by_commit_date(const Corpus& corpus, const SplitRatios& ratios = {});

enum class PromptTemplate { Detector, Rationalization };

std::optional<PromptTemplate> parse_prompt_template(std::string_view text) noexcept;

/// A rendered chat prompt. `system` is empty when the layout has none.
struct Prompt {
  std::string system;
  std::string user;

  bool operator==(const Prompt&) const = default;
};

/// The fenced ```Context and ```Code sections shared by several prompts.
std::string render_code_sections(const Sample& sample);

Prompt render_query(const Sample& sample, PromptTemplate tmpl);

using TokenCounter = std::function<std::size_t(std::string_view)>;

/// Whitespace-delimited token count. Not comparable to a subword tokenizer.
std::size_t whitespace_token_count(std::string_view text);

struct TokenSummary {
  std::size_t min = 0;
  double mean = 0.0;
  std::size_t max = 0;
};

struct CorpusStats {
  std::size_t samples = 0;
  std::size_t pairs = 0;
  std::size_t projects = 0;
  std::size_t cwes = 0;
  TokenSummary function_tokens;
  TokenSummary context_tokens;
  TokenSummary input_tokens;
};

CorpusStats corpus_stats(const Corpus& corpus, const TokenCounter& counter = whitespace_token_count);

}  // namespace vdpost
