// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 vdpost Contributors

#include "demo_fixtures.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <stdexcept>

#include "vdpost/completion.hpp"
#include "vdpost/digest.hpp"
#include "vdpost/jsonl.hpp"
#include "vdpost/judge.hpp"

namespace vdpost::demo {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct PairSpec {
  const char* id;
  const char* project;
  const char* date;
  const char* cwe;
  const char* parent_cwe;  // directly related in the taxonomy
  const char* method;
  const char* file;
  const char* vulnerable_code;
  const char* patched_code;
  const char* cve;
  const char* commit;
  const char* diff;
  const char* flaw;  // one-line root cause used in generated analyses
  // Draw letters, see completion_text().
  const char* policy_vuln;
  const char* policy_patch;
  const char* teacher_vuln;
  const char* teacher_patch;
};

// Vulnerable letters: C correct, P parent CWE (partially incorrect), F right
// CWE with a wrong root cause, W unrelated CWE, N says NO_VUL, U no verdict,
// E empty answer. Patched letters: C says NO_VUL, K unrelated HAS_VUL
// (judged unknown), F reports the fixed flaw, U no verdict.
const PairSpec kPairs[] = {
    {"p-uaf", "netd", "2019-03-14", "CWE-416", "CWE-825", "session_close", "src/session.c",
     "void session_close(struct session *s) {\n  free(s->buf);\n  if (s->flags & S_LOG)\n    log_line(s->buf);\n}\n",
     "void session_close(struct session *s) {\n  if (s->flags & S_LOG)\n    log_line(s->buf);\n  free(s->buf);\n  s->buf = NULL;\n}\n",
     "Use-after-free in session_close allows remote attackers to read freed memory via a logged session.",
     "session: log before freeing the buffer",
     "-  free(s->buf);\n   if (s->flags & S_LOG)\n     log_line(s->buf);\n+  free(s->buf);\n+  s->buf = NULL;\n",
     "the buffer is freed and then passed to log_line", "CCCCCCCC", "CCCCCCCC", "CCWCCNCC", "CCCCFCCC"},
    {"p-oob-write", "imgkit", "2020-07-02", "CWE-787", "CWE-119", "copy_row", "lib/row.c",
     "int copy_row(uint8_t *dst, const uint8_t *src, size_t n, size_t cap) {\n  memcpy(dst, src, n);\n  return 0;\n}\n",
     "int copy_row(uint8_t *dst, const uint8_t *src, size_t n, size_t cap) {\n  if (n > cap)\n    return -1;\n  memcpy(dst, src, n);\n  return 0;\n}\n",
     "Heap-based buffer overflow in copy_row via a crafted image row length.",
     "row: reject rows longer than the destination",
     "+  if (n > cap)\n+    return -1;\n", "n is never checked against cap before memcpy", "NNNNWWUN", "FFFFFFFF",
     "NNWWNNUW", "FFFFFFFF"},
    {"p-null", "tinyhttp", "2021-01-20", "CWE-476", "CWE-754", "header_value", "src/headers.c",
     "const char *header_value(struct req *r, const char *k) {\n  struct hdr *h = find_header(r, k);\n  return h->value;\n}\n",
     "const char *header_value(struct req *r, const char *k) {\n  struct hdr *h = find_header(r, k);\n  return h ? h->value : NULL;\n}\n",
     "NULL pointer dereference in header_value when a requested header is absent.",
     "headers: handle missing header", "-  return h->value;\n+  return h ? h->value : NULL;\n",
     "find_header may return NULL and the result is dereferenced", "CCCCPFWN", "CCKKFCUC", "CCCCCCCC", "CCCCCCCC"},
    {"p-int", "zcomp", "2022-05-11", "CWE-190", "CWE-682", "alloc_table", "src/table.c",
     "void *alloc_table(uint32_t rows, uint32_t cols) {\n  uint32_t n = rows * cols;\n  return malloc(n * sizeof(int));\n}\n",
     "void *alloc_table(uint32_t rows, uint32_t cols) {\n  if (cols && rows > UINT32_MAX / cols)\n    return NULL;\n  size_t n = (size_t)rows * cols;\n  return calloc(n, sizeof(int));\n}\n",
     "Integer overflow in alloc_table leads to an undersized allocation.", "table: guard size computation",
     "+  if (cols && rows > UINT32_MAX / cols)\n+    return NULL;\n", "rows * cols wraps before the allocation",
     "CFCWCNCE", "CCCCFCKC", "CWCCCCCC", "CCKCCCCC"},
    {"p-oob-read", "pktlib", "2023-02-08", "CWE-125", "CWE-119", "read_tlv", "src/tlv.c",
     "int read_tlv(const uint8_t *p, size_t len) {\n  size_t l = p[1];\n  return p[2 + l];\n}\n",
     "int read_tlv(const uint8_t *p, size_t len) {\n  if (len < 2)\n    return -1;\n  size_t l = p[1];\n  if (2 + l >= len)\n    return -1;\n  return p[2 + l];\n}\n",
     "Out-of-bounds read in read_tlv via a truncated TLV record.", "tlv: validate length field",
     "+  if (2 + l >= len)\n+    return -1;\n", "the length byte is trusted without checking len", "CCCCCCCU", "CCCCCCCF",
     "CCCCCCCC", "CCCCCCCC"},
    {"p-leak", "cfgparse", "2024-09-30", "CWE-401", "CWE-772", "load_section", "src/cfg.c",
     "int load_section(struct cfg *c, const char *name) {\n  char *tmp = strdup(name);\n  if (!lookup(c, tmp))\n    return -1;\n  free(tmp);\n  return 0;\n}\n",
     "int load_section(struct cfg *c, const char *name) {\n  char *tmp = strdup(name);\n  int rc = lookup(c, tmp) ? 0 : -1;\n  free(tmp);\n  return rc;\n}\n",
     "Memory leak in load_section on lookup failure allows memory exhaustion.", "cfg: free on error path",
     "-  if (!lookup(c, tmp))\n-    return -1;\n+  int rc = lookup(c, tmp) ? 0 : -1;\n", "tmp is not freed when lookup fails",
     "PWCNFCUC", "KCCFCUCC", "NWNNUNNW", "CCCCCCUC"},
};

const json kEdges = json::array({
    {"CWE-416", "CWE-825"}, {"CWE-416", "CWE-672"}, {"CWE-825", "CWE-119"}, {"CWE-119", "CWE-118"},
    {"CWE-118", "CWE-664"}, {"CWE-787", "CWE-119"}, {"CWE-125", "CWE-119"}, {"CWE-476", "CWE-754"},
    {"CWE-754", "CWE-703"}, {"CWE-190", "CWE-682"}, {"CWE-401", "CWE-772"}, {"CWE-772", "CWE-404"},
    {"CWE-404", "CWE-664"}, {"CWE-672", "CWE-666"}, {"CWE-666", "CWE-664"},
});

constexpr const char* kUnrelatedCwe = "CWE-20";

Sample make_sample(const PairSpec& p, Role role) {
  Sample s;
  s.pair_id = p.id;
  s.role = role;
  s.sample_id = std::string(p.id) + (role == Role::Vulnerable ? "-v" : "-p");
  s.code = role == Role::Vulnerable ? p.vulnerable_code : p.patched_code;
  s.context.includes = {"#include <stdlib.h>", "#include <string.h>"};
  s.context.callee_functions = {"/* callee bodies elided */"};
  s.file_path = p.file;
  s.method_name = p.method;
  s.project = p.project;
  s.commit_date = *Date::parse(p.date);
  s.ground_truth = {{p.cwe}, p.cve, p.commit, p.diff};
  return s;
}

std::string completion_text(const PairSpec& p, Role role, char letter, const std::string& source, int draw) {
  const std::string head = "<think>\nInspecting " + std::string(p.method) + " (" + source + " draw " +
                           std::to_string(draw) + ").\n</think>\n";
  const std::string tag = "Analysis (" + source + " draw " + std::to_string(draw) + "): ";
  if (role == Role::Vulnerable) {
    switch (letter) {
      case 'C': return head + tag + std::string(p.flaw) + ".\nCWE: " + p.cwe + "\nHAS_VUL";
      case 'P': return head + tag + "memory handling around " + p.method + " looks unsafe.\nCWE: " + p.parent_cwe + "\nHAS_VUL";
      case 'F': return head + tag + "input validation on the caller side is missing.\nCWE: " + p.cwe + "\nHAS_VUL";
      case 'W': return head + tag + "untrusted input reaches a format routine.\nCWE: " + kUnrelatedCwe + "\nHAS_VUL";
      case 'N': return head + tag + "all accesses look bounded.\nNO_VUL";
      case 'U': return head + tag + "the code may or may not be safe.\nVerdict: unsure";
      case 'E': return head;
    }
  } else {
    switch (letter) {
      case 'C': return head + tag + "the patched logic handles the failure path.\nNO_VUL";
      case 'K': return head + tag + "a separate unchecked return value remains.\nCWE: " + kUnrelatedCwe + "\nHAS_VUL";
      case 'F': return head + tag + std::string(p.flaw) + ".\nCWE: " + p.cwe + "\nHAS_VUL";
      case 'U': return head + tag + "hard to tell.\nVerdict: unsure";
    }
  }
  throw std::logic_error(std::string("unknown draw letter ") + letter);
}

JudgeOption judge_option(Role role, char letter) {
  if (role == Role::Vulnerable) {
    if (letter == 'C') return JudgeOption::Correct;
    if (letter == 'P') return JudgeOption::PartiallyIncorrect;
    return JudgeOption::Incorrect;
  }
  if (letter == 'C') return JudgeOption::Correct;
  if (letter == 'K') return JudgeOption::Unknown;
  return JudgeOption::Incorrect;
}

std::array<DimensionOption, 3> spec_options(Role role, char letter) {
  using D = DimensionOption;
  if (letter == 'C') return {D::Correct, D::Correct, D::Correct};
  if (role == Role::Vulnerable) {
    if (letter == 'P') return {D::Correct, D::PartiallyCorrect, D::Incorrect};
    if (letter == 'F') return {D::Correct, D::Incorrect, D::Incorrect};
    return {D::Incorrect, D::Incorrect, D::PartiallyCorrect};
  }
  if (letter == 'K') return {D::Correct, D::PartiallyCorrect, D::PartiallyCorrect};
  return {D::Incorrect, D::Incorrect, D::Incorrect};
}

class FixtureSet {
 public:
  void add(const std::string& model, const std::vector<ChatMessage>& messages, std::vector<std::string> replies,
           int delay_ms = 0) {
    const std::string digest = request_digest(model, messages);
    if (auto it = index_.find(digest); it != index_.end()) {
      if (fixtures_[it->second].replies != replies) throw std::logic_error("conflicting demo fixtures for " + digest);
      return;
    }
    index_.emplace(digest, fixtures_.size());
    Fixture f;
    f.digest = digest;
    f.replies = std::move(replies);
    f.delay_ms = delay_ms;
    fixtures_.push_back(std::move(f));
  }

  Fixture& last() { return fixtures_.back(); }
  std::vector<Fixture> take() { return std::move(fixtures_); }

 private:
  std::vector<Fixture> fixtures_;
  std::map<std::string, std::size_t> index_;
};

json endpoint(const std::string& model, int max_in_flight) {
  return {{"base_url", kPlaceholderUrl},
          {"model", model},
          {"max_in_flight", max_in_flight},
          {"timeout_seconds", 30.0},
          {"retry_limit", 3},
          {"backoff_initial_seconds", 0.01},
          {"backoff_max_seconds", 0.05}};
}

}  // namespace

DemoBundle build_demo(const DemoOptions& options) {
  if (options.candidates < 1) throw std::invalid_argument("candidates must be >= 1");
  DemoBundle bundle;
  std::vector<const PairSpec*> chosen;
  for (const auto& p : kPairs)
    if (options.pair_ids.empty() ||
        std::find(options.pair_ids.begin(), options.pair_ids.end(), p.id) != options.pair_ids.end())
      chosen.push_back(&p);
  if (chosen.empty()) throw std::invalid_argument("no demo pair selected");
  std::vector<Sample> samples;
  for (const PairSpec* pp : chosen) {
    const PairSpec& p = *pp;
    samples.push_back(make_sample(p, Role::Vulnerable));
    samples.push_back(make_sample(p, Role::Patched));
  }
  bundle.corpus = Corpus(samples);
  bundle.taxonomy = {{"edges", kEdges}};

  const std::string policy = "demo-policy", teacher = "demo-teacher", judge = "demo-judge",
                    spec_gen = "demo-spec-generator";
  FixtureSet fixtures;
  bool failed_policy = false, failed_judge = false;
  const std::size_t n = static_cast<std::size_t>(options.candidates);

  auto add_generator = [&](const std::string& model, const std::string& source, const Sample& s, const PairSpec& p,
                           const std::string& plan, bool with_spec) {
    std::vector<std::string> replies;
    std::string letters;
    for (std::size_t j = 0; j < n; ++j) {
      const char letter = plan[j % plan.size()];
      letters.push_back(letter);
      replies.push_back(completion_text(p, s.role, letter, source, static_cast<int>(j)));
    }
    fixtures.add(model, to_messages(render_query(s, PromptTemplate::Detector)), replies,
                 model == policy ? options.policy_delay_ms : 0);
    if (options.inject_failures && model == policy && !failed_policy) {
      fixtures.last().fail_first = {500, 500};
      failed_policy = true;
    }

    SpecChecklist checklist;
    if (with_spec) {
      checklist.phase = phase_for(s.role);
      for (auto name : spec_dimensions(checklist.phase))
        checklist.items.push_back({std::string(name), "Check " + std::string(name) + " for " + p.method + "."});
      fixtures.add(spec_gen, to_messages(render_spec_generation_prompt(s)), {to_json(checklist).dump(2)});
    }

    for (std::size_t j = 0; j < n; ++j) {
      const Completion c = parse_completion(replies[j]);
      if (c.answer_text.find_first_not_of(" \t\r\n") == std::string::npos) continue;
      const JudgeOption option = judge_option(s.role, letters[j]);
      const json verdict = {{"correctness",
                             {{"justification", "The analysis " + std::string(option == JudgeOption::Correct
                                                                                  ? "matches"
                                                                                  : "does not match") +
                                                    " the documented root cause."},
                              {"option", to_string(option)}}}};
      fixtures.add(judge, to_messages(render_reasoning_judge_prompt(c.answer_text, s.ground_truth, s.role)),
                   {"```json\n" + verdict.dump(2) + "\n```"});
      if (options.inject_failures && !failed_judge && model == policy) {
        fixtures.last().fail_first = {429};
        failed_judge = true;
      }
      if (with_spec) {
        const auto opts = spec_options(s.role, letters[j]);
        json dims = json::object();
        for (std::size_t d = 0; d < 3; ++d)
          dims[checklist.items[d].dimension] = {{"justification", "Rubric item " + std::to_string(d + 1) + "."},
                                                {"option", to_string(opts[d])}};
        fixtures.add(judge, to_messages(render_spec_judge_prompt(c.answer_text, checklist)), {dims.dump(2)});
      }
    }
    return letters;
  };

  for (const PairSpec* pp : chosen) {
    const PairSpec& p = *pp;
    for (Role role : {Role::Vulnerable, Role::Patched}) {
      const Sample s = make_sample(p, role);
      const bool v = role == Role::Vulnerable;
      bundle.policy_plan.emplace_back(s.sample_id,
                                      add_generator(policy, "policy", s, p, v ? p.policy_vuln : p.policy_patch, true));
      bundle.teacher_plan.emplace_back(
          s.sample_id, add_generator(teacher, "teacher", s, p, v ? p.teacher_vuln : p.teacher_patch, false));
    }
  }
  bundle.fixtures = fixtures.take();

  bundle.config = {{"corpus", "corpus.jsonl"},
                   {"taxonomy", {{"path", "cwe_edges.json"}, {"format", "edge_list_json"}}},
                   {"endpoints",
                    {{"policy", endpoint(policy, options.max_in_flight)},
                     {"teacher", endpoint(teacher, options.max_in_flight)},
                     {"judge", endpoint(judge, options.max_in_flight)},
                     {"spec_generator", endpoint(spec_gen, options.max_in_flight)}}},
                   {"candidates", options.candidates},
                   {"granularity", "reasoning"},
                   {"schedule", {{"mode", "curriculum"}, {"batch_size", 4}, {"filter_extremes", true}}},
                   {"output_dir", "out"},
                   {"seed", 7},
                   {"workers", 16}};
  return bundle;
}

fs::path write_demo(const fs::path& dir, const DemoBundle& bundle, const std::string& base_url) {
  fs::create_directories(dir);
  save_corpus(dir / "corpus.jsonl", bundle.corpus);
  write_json(dir / "cwe_edges.json", bundle.taxonomy);
  save_fixtures(dir / "fixtures.jsonl", bundle.fixtures);
  json config = bundle.config;
  for (auto& [role, e] : config["endpoints"].items()) e["base_url"] = base_url;
  write_json(dir / "config.json", config);
  return dir / "config.json";
}

}  // namespace vdpost::demo
