// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 vdpost Contributors

#include "vdpost/pipeline.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <cctype>
#include <exception>
#include <fstream>
#include <iomanip>
#include <mutex>
#include <ostream>
#include <sstream>
#include <thread>
#include <unordered_map>

#include "vdpost/digest.hpp"
#include "vdpost/error.hpp"
#include "vdpost/jsonl.hpp"
#include "vdpost/judge.hpp"
#include "vdpost/metrics.hpp"

namespace vdpost {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

json manifest_for(const PipelineConfig& cfg, std::string_view command) {
  return make_manifest(command, config_digest(cfg), cfg.seed);
}

fs::path artifact(const PipelineConfig& cfg, std::string_view name) { return cfg.output_dir / name; }

Corpus working_corpus(const PipelineConfig& cfg) {
  if (!fs::exists(cfg.corpus)) throw CorpusError(0, "corpus file '" + cfg.corpus.string() + "' does not exist");
  Corpus corpus = load_corpus(cfg.corpus);
  if (cfg.deduplicate) corpus = deduplicate(corpus);
  if (cfg.slice == CorpusSlice::All) return corpus;
  const CorpusSplit split = split_by_commit_date(corpus, cfg.split);
  switch (cfg.slice) {
    case CorpusSlice::Train: return corpus.subset(split.train);
    case CorpusSlice::Validation: return corpus.subset(split.validation);
    case CorpusSlice::Test: return corpus.subset(split.test);
    case CorpusSlice::All: break;
  }
  return corpus;
}

CweTaxonomy working_taxonomy(const PipelineConfig& cfg) {
  if (!cfg.taxonomy) throw ConfigError("prediction-level scoring needs a \"taxonomy\" entry in the config");
  if (!fs::exists(*cfg.taxonomy)) throw DataError("taxonomy file '" + cfg.taxonomy->string() + "' does not exist");
  return load_taxonomy(*cfg.taxonomy, cfg.taxonomy_format);
}

const EndpointConfig& require_endpoint(const PipelineConfig& cfg, std::string_view role, std::string_view why) {
  const EndpointConfig* e = cfg.endpoint(role);
  if (e == nullptr) throw ConfigError(std::string(why) + " needs a \"" + std::string(role) + "\" endpoint");
  return *e;
}

/// Runs fn(i) for i in [0, n) on up to `workers` threads. The exception of
/// the lowest failing index is rethrown after all threads finish.
template <class Fn>
void parallel_for(std::size_t n, int workers, Fn&& fn) {
  std::vector<std::exception_ptr> errors(n);
  std::atomic<std::size_t> next{0};
  auto body = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      try {
        fn(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  const std::size_t threads = std::min<std::size_t>(n, static_cast<std::size_t>(workers));
  if (threads <= 1) {
    body();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(threads);
    for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(body);
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

/// Keyed record cache under output_dir/cache. Completed records are appended
/// to a sidecar ".partial" file as they arrive so an interrupted run resumes
/// from there; finalize() rewrites the cache in corpus order.
class RecordCache {
 public:
  RecordCache(fs::path path, json manifest) : path_(std::move(path)), manifest_(std::move(manifest)) {
    partial_ = path_;
    partial_ += ".partial";
    if (fs::exists(path_))
      for (auto& r : read_jsonl(path_)) absorb(std::move(r));
    if (fs::exists(partial_)) {
      std::ifstream in(partial_);
      std::string line;
      while (std::getline(in, line)) {
        if (is_blank(line)) continue;
        json r = json::parse(line, nullptr, false);
        if (r.is_discarded() || is_manifest(r)) continue;  // a torn final line after a crash
        absorb(std::move(r));
      }
    }
  }

  const json* find(const std::string& key) const {
    auto it = records_.find(key);
    return it == records_.end() ? nullptr : &it->second;
  }

  void put(const std::string& key, json record) {
    record["key"] = key;
    std::lock_guard lock(mutex_);
    if (!out_.is_open()) {
      fs::create_directories(partial_.parent_path());
      const bool fresh = !fs::exists(partial_);
      out_.open(partial_, std::ios::app | std::ios::binary);
      if (!out_) throw DataError("cannot write cache file '" + partial_.string() + "'");
      if (fresh) out_ << manifest_.dump() << '\n';
    }
    out_ << record.dump(-1, ' ', false, json::error_handler_t::replace) << '\n';
    out_.flush();
    records_[key] = std::move(record);
  }

  void finalize(const std::vector<std::string>& order) {
    std::lock_guard lock(mutex_);
    std::vector<json> out;
    for (const auto& key : order)
      if (auto it = records_.find(key); it != records_.end()) out.push_back(it->second);
    // Keep records for keys outside this run (another corpus slice, say).
    std::vector<std::string> rest;
    for (const auto& [key, _] : records_)
      if (std::find(order.begin(), order.end(), key) == order.end()) rest.push_back(key);
    std::sort(rest.begin(), rest.end());
    for (const auto& key : rest) out.push_back(records_.at(key));
    fs::create_directories(path_.parent_path());
    write_jsonl(path_, manifest_, out);
    if (out_.is_open()) out_.close();
    std::error_code ec;
    fs::remove(partial_, ec);
  }

 private:
  void absorb(json r) {
    if (!r.is_object() || !r.contains("key") || !r["key"].is_string()) return;
    std::string key = r["key"].get<std::string>();
    records_[std::move(key)] = std::move(r);
  }

  fs::path path_;
  fs::path partial_;
  json manifest_;
  std::mutex mutex_;
  std::ofstream out_;
  std::unordered_map<std::string, json> records_;
};

std::string_view template_name(PromptTemplate t) { return t == PromptTemplate::Detector ? "detector" : "rationalization"; }

bool blank(std::string_view s) {
  return std::all_of(s.begin(), s.end(), [](unsigned char c) { return std::isspace(c) != 0; });
}

/// Reasoning-level judgment of one completion. An empty answer cannot be
/// judged and counts as Incorrect.
JudgeVerdict judge_one(const Gateway& judge, const Completion& c, const Sample& s) {
  if (blank(c.answer_text)) return {s.role, JudgeOption::Incorrect, "empty answer"};
  return judge_reasoning(judge, c.answer_text, s.ground_truth, s.role);
}

void report_failures(std::vector<StageFailure>& failures, std::size_t total, std::ostream& log) {
  if (failures.empty()) return;
  for (const auto& f : failures) log << "error: sample " << f.sample_id << ": " << f.message << '\n';
  throw EndpointError(std::to_string(failures.size()) + " of " + std::to_string(total) +
                      " samples failed; completed work is cached, rerun to resume");
}

struct CandidateRequest {
  std::string generator_role;
  PromptTemplate tmpl = PromptTemplate::Detector;
  bool judged = false;
  std::string_view purpose;
};

/// One candidate set per corpus sample, in corpus order, sampling and judging
/// only what the cache lacks.
std::vector<CandidateSet> ensure_candidates(const PipelineConfig& cfg, const Corpus& corpus,
                                            const CandidateRequest& req, std::ostream& log) {
  const EndpointConfig& gen_cfg = require_endpoint(cfg, req.generator_role, req.purpose);
  const auto n = static_cast<std::size_t>(cfg.candidates);
  const auto& samples = corpus.samples();

  RecordCache cache(cfg.output_dir / artifacts::kCacheDir /
                        ("candidates-" + req.generator_role + "-" + std::string(template_name(req.tmpl)) + ".jsonl"),
                    manifest_for(cfg, "cache"));

  std::vector<Prompt> prompts;
  std::vector<std::optional<CandidateSet>> sets(samples.size());
  std::vector<std::size_t> pending;
  bool need_sampling = false, need_judging = false;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const Sample& s = samples[i];
    prompts.push_back(render_query(s, req.tmpl));
    if (const json* rec = cache.find(s.sample_id); rec != nullptr && rec->value("model", "") == gen_cfg.model_name) {
      CandidateSet set = candidate_set_from_json(rec->at("set"));
      if (set.query == prompts.back().user && set.size() == n && set.role == s.role) sets[i] = std::move(set);
    }
    const bool sample_now = !sets[i].has_value();
    const bool judge_now = req.judged && (sample_now || sets[i]->judgments.empty());
    need_sampling |= sample_now;
    need_judging |= judge_now;
    if (sample_now || judge_now) pending.push_back(i);
  }

  std::optional<Gateway> generator, judge;
  if (need_sampling) generator.emplace(gen_cfg);
  if (need_judging) {
    const EndpointConfig* judge_cfg = cfg.endpoint("judge");
    if (judge_cfg == nullptr)
      throw ConfigError("reasoning-level judgments need a \"judge\" endpoint or cached verdicts");
    judge.emplace(*judge_cfg);
  }
  if (!pending.empty())
    log << "sampling/judging " << pending.size() << " of " << samples.size() << " samples ("
        << req.generator_role << ", " << template_name(req.tmpl) << ")\n";

  std::mutex failure_mutex;
  std::vector<StageFailure> failures;
  parallel_for(pending.size(), cfg.workers, [&](std::size_t p) {
    const std::size_t i = pending[p];
    const Sample& s = samples[i];
    auto store = [&](const CandidateSet& set) {
      cache.put(s.sample_id, {{"model", gen_cfg.model_name}, {"set", to_json(set)}});
    };
    try {
      if (!sets[i]) {
        CandidateSet set;
        set.sample_id = s.sample_id;
        set.pair_id = s.pair_id;
        set.role = s.role;
        set.query = prompts[i].user;
        set.completions = sample_completions(*generator, prompts[i], cfg.candidates);
        store(set);
        sets[i] = std::move(set);
      }
      if (req.judged && sets[i]->judgments.empty()) {
        std::vector<JudgeVerdict> verdicts;
        for (const auto& c : sets[i]->completions) verdicts.push_back(judge_one(*judge, c, s));
        sets[i]->judgments = std::move(verdicts);
        store(*sets[i]);
      }
    } catch (const EndpointError& e) {
      std::lock_guard lock(failure_mutex);
      failures.push_back({s.sample_id, e.what()});
    }
  });

  std::vector<std::string> order;
  for (const auto& s : samples) order.push_back(s.sample_id);
  cache.finalize(order);

  std::sort(failures.begin(), failures.end(), [&](const StageFailure& a, const StageFailure& b) {
    return std::find(order.begin(), order.end(), a.sample_id) < std::find(order.begin(), order.end(), b.sample_id);
  });
  report_failures(failures, pending.size(), log);

  std::vector<CandidateSet> out;
  out.reserve(sets.size());
  for (auto& s : sets) out.push_back(std::move(*s));
  return out;
}

std::string completions_digest(const CandidateSet& set) {
  json texts = json::array();
  for (const auto& c : set.completions) texts.push_back(c.raw_text);
  return sha256_hex(texts.dump(-1, ' ', false, json::error_handler_t::replace));
}

/// Per-sample rubric plus three dimension judgments per completion.
std::vector<std::vector<std::vector<DimensionJudgment>>> ensure_spec_judgments(const PipelineConfig& cfg,
                                                                               const Corpus& corpus,
                                                                               std::span<const CandidateSet> sets,
                                                                               std::ostream& log) {
  const auto& samples = corpus.samples();
  RecordCache cache(cfg.output_dir / artifacts::kCacheDir / "spec-policy.jsonl", manifest_for(cfg, "cache"));
  std::vector<std::vector<std::vector<DimensionJudgment>>> out(samples.size());
  std::vector<std::size_t> pending;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const json* rec = cache.find(samples[i].sample_id);
    if (rec != nullptr && rec->value("completions", "") == completions_digest(sets[i])) {
      for (const auto& per_completion : rec->at("judgments")) {
        std::vector<DimensionJudgment> dims;
        for (const auto& d : per_completion) dims.push_back(dimension_judgment_from_json(d));
        out[i].push_back(std::move(dims));
      }
    } else {
      pending.push_back(i);
    }
  }
  if (pending.empty()) return out;

  const Gateway generator(require_endpoint(cfg, "spec_generator", "specification-level rewards"));
  const Gateway judge(require_endpoint(cfg, "judge", "specification-level rewards"));
  log << "generating rubrics for " << pending.size() << " samples\n";

  std::mutex failure_mutex;
  std::vector<StageFailure> failures;
  parallel_for(pending.size(), cfg.workers, [&](std::size_t p) {
    const std::size_t i = pending[p];
    const Sample& s = samples[i];
    try {
      const SpecChecklist checklist = generate_specification(generator, s);
      std::vector<std::vector<DimensionJudgment>> per_sample;
      json stored = json::array();
      for (const auto& c : sets[i].completions) {
        std::vector<DimensionJudgment> dims;
        if (blank(c.answer_text)) {
          for (const auto& item : checklist.items) dims.push_back({item.dimension, DimensionOption::Incorrect, "empty answer"});
        } else {
          dims = judge_specification(judge, c.answer_text, checklist);
        }
        json row = json::array();
        for (const auto& d : dims) row.push_back(to_json(d));
        stored.push_back(std::move(row));
        per_sample.push_back(std::move(dims));
      }
      cache.put(s.sample_id,
                {{"completions", completions_digest(sets[i])}, {"checklist", to_json(checklist)}, {"judgments", stored}});
      out[i] = std::move(per_sample);
    } catch (const EndpointError& e) {
      std::lock_guard lock(failure_mutex);
      failures.push_back({s.sample_id, e.what()});
    }
  });
  std::vector<std::string> order;
  for (const auto& s : samples) order.push_back(s.sample_id);
  cache.finalize(order);
  std::sort(failures.begin(), failures.end(),
            [](const StageFailure& a, const StageFailure& b) { return a.sample_id < b.sample_id; });
  report_failures(failures, pending.size(), log);
  return out;
}

CandidateRequest policy_request(bool judged, std::string_view purpose) {
  return {"policy", PromptTemplate::Detector, judged, purpose};
}

}  // namespace

// --- curate ----------------------------------------------------------------------------

CurateSummary cmd_curate(const PipelineConfig& cfg, std::ostream& log) {
  const Corpus corpus = working_corpus(cfg);
  const std::string generator = cfg.curation_generator();
  const auto sets = ensure_candidates(cfg, corpus, {generator, cfg.curate_template, true, "curation"}, log);

  CurateSummary summary;
  summary.mode = cfg.curate_mode;
  summary.queries = sets.size();
  std::vector<json> records;
  std::vector<std::string> kept;
  if (cfg.curate_mode == CurateMode::Sft) {
    for (const auto& r : rejection_sample(sets, cfg.keep)) {
      records.push_back(to_json(r));
      if (kept.empty() || kept.back() != r.sample_id) kept.push_back(r.sample_id);
    }
    summary.output = artifact(cfg, artifacts::kSftDataset);
  } else {
    for (const auto& p : build_preference_pairs(sets, cfg.pairing)) {
      records.push_back(to_json(p));
      if (kept.empty() || kept.back() != p.sample_id) kept.push_back(p.sample_id);
    }
    summary.output = artifact(cfg, artifacts::kPreferencePairs);
    if (records.empty()) log << "warning: no sample has both an accepted and a rejected candidate; pair file is empty\n";
  }
  summary.retained = kept.size();
  summary.records = records.size();
  for (const auto& set : sets)
    if (std::find(kept.begin(), kept.end(), set.sample_id) == kept.end()) summary.rejected.push_back(set.sample_id);

  json manifest = manifest_for(cfg, "curate");
  manifest["manifest"]["mode"] = to_string(cfg.curate_mode);
  manifest["manifest"]["generator"] = generator;
  manifest["manifest"]["retention"] = {{"queries", summary.queries},
                                       {"retained", summary.retained},
                                       {"rejected", summary.rejected.size()},
                                       {"records", summary.records},
                                       {"rejected_ids", summary.rejected}};
  write_jsonl(summary.output, manifest, records);
  log << "curate: " << summary.retained << " of " << summary.queries << " queries retained, "
      << summary.rejected.size() << " rejected, " << summary.records << " records -> " << summary.output.string()
      << '\n';
  return summary;
}

// --- difficulty / schedule -------------------------------------------------------------

DifficultySummary cmd_difficulty(const PipelineConfig& cfg, std::ostream& log) {
  const Corpus corpus = working_corpus(cfg);
  const auto sets = ensure_candidates(cfg, corpus, policy_request(true, "difficulty scoring"), log);
  std::vector<json> records;
  for (const auto& pair : corpus.pairs())
    records.push_back(to_json(score_difficulty(sets[pair.vulnerable], sets[pair.patched])));
  DifficultySummary summary{records.size(), artifact(cfg, artifacts::kDifficulty)};
  write_jsonl(summary.output, manifest_for(cfg, "difficulty"), records);
  log << "difficulty: " << summary.pairs << " pairs -> " << summary.output.string() << '\n';
  return summary;
}

ScheduleSummary cmd_schedule(const PipelineConfig& cfg, std::ostream& log) {
  const Corpus corpus = working_corpus(cfg);
  const fs::path input = artifact(cfg, artifacts::kDifficulty);
  if (!fs::exists(input)) throw DataError("'" + input.string() + "' not found; run the difficulty command first");
  std::vector<DifficultyRecord> records;
  for (const auto& r : read_jsonl(input)) records.push_back(difficulty_from_json(r));

  ScheduleSummary summary;
  summary.pairs_in = records.size();
  if (cfg.filter_extremes) records = filter_extremes(records);
  const auto pairs = resolve_pairs(records, corpus);
  const Schedule plan = schedule(pairs, cfg.schedule_mode, cfg.batch_size, cfg.seed);
  summary.pairs_scheduled = pairs.size();
  summary.batches = plan.batches.size();
  summary.output = artifact(cfg, artifacts::kSchedule);

  json doc = manifest_for(cfg, "schedule");
  doc["manifest"]["filter_extremes"] = cfg.filter_extremes;
  doc["manifest"]["pairs_in"] = summary.pairs_in;
  doc["manifest"]["pairs_scheduled"] = summary.pairs_scheduled;
  doc["schedule"] = to_json(plan);
  write_json(summary.output, doc);
  log << "schedule: " << to_string(cfg.schedule_mode) << ", " << summary.pairs_scheduled << " of " << summary.pairs_in
      << " pairs in " << summary.batches << " batches -> " << summary.output.string() << '\n';
  return summary;
}

// --- reward ----------------------------------------------------------------------------

RewardSummary cmd_reward(const PipelineConfig& cfg, std::ostream& log) {
  const Corpus corpus = working_corpus(cfg);
  const Granularity g = cfg.granularity;
  const bool judged = g == Granularity::Reasoning;
  const auto sets = ensure_candidates(cfg, corpus, policy_request(judged, "reward computation"), log);
  std::optional<CweTaxonomy> tax;
  if (g == Granularity::Prediction) tax = working_taxonomy(cfg);
  std::vector<std::vector<std::vector<DimensionJudgment>>> dims;
  if (g == Granularity::Specification) dims = ensure_spec_judgments(cfg, corpus, sets, log);

  RewardSummary summary;
  summary.granularity = g;
  std::vector<json> reward_records, group_records;
  for (std::size_t i = 0; i < sets.size(); ++i) {
    const CandidateSet& set = sets[i];
    const Sample& s = corpus.samples()[i];
    std::vector<double> values;
    json completions = json::array();
    for (std::size_t j = 0; j < set.size(); ++j) {
      const Completion& c = set.completions[j];
      RewardSignal r;
      switch (g) {
        case Granularity::Detection: r = detection_reward(c, s.role); break;
        case Granularity::Prediction: r = prediction_reward(c, s.ground_truth, s.role, *tax); break;
        case Granularity::Reasoning: r = reasoning_reward(set.judgments[j], s.role); break;
        case Granularity::Specification: r = specification_reward(dims[i][j]); break;
      }
      values.push_back(r.value);
      json rec = to_json(r);
      rec["sample_id"] = s.sample_id;
      rec["completion"] = j;
      reward_records.push_back(std::move(rec));
      completions.push_back(c.raw_text);
    }
    const auto advantages = grpo_advantages(values, cfg.grpo);
    group_records.push_back({{"sample_id", s.sample_id},
                             {"pair_id", s.pair_id},
                             {"role", to_string(s.role)},
                             {"query", set.query},
                             {"completions", completions},
                             {"rewards", values},
                             {"advantages", advantages}});
  }
  summary.groups = group_records.size();
  summary.rewards = reward_records.size();
  summary.output = artifact(cfg, artifacts::kRewards);
  summary.groups_output = artifact(cfg, artifacts::kRolloutGroups);
  json manifest = manifest_for(cfg, "reward");
  manifest["manifest"]["granularity"] = to_string(g);
  write_jsonl(summary.output, manifest, reward_records);
  write_jsonl(summary.groups_output, manifest, group_records);
  log << "reward: " << summary.rewards << " " << to_string(g) << " rewards over " << summary.groups << " groups -> "
      << summary.output.string() << '\n';
  return summary;
}

// --- evaluate --------------------------------------------------------------------------

EvaluateSummary cmd_evaluate(const PipelineConfig& cfg, std::ostream& log) {
  const Corpus corpus = working_corpus(cfg);
  if (corpus.empty()) throw DataError("nothing to evaluate: the selected corpus slice is empty");
  const auto sets = ensure_candidates(cfg, corpus, policy_request(true, "evaluation"), log);
  const CweTaxonomy tax = working_taxonomy(cfg);
  const std::size_t n = static_cast<std::size_t>(cfg.candidates);
  const std::size_t k = cfg.pass_k == 0 ? n : cfg.pass_k;

  constexpr std::array<Granularity, 3> kLevels{Granularity::Detection, Granularity::Prediction, Granularity::Reasoning};
  // outcomes[level][sample][completion]
  std::array<std::vector<std::vector<Outcome>>, 3> outcomes;
  std::vector<ShiftRecord> shift;
  std::vector<json> outcome_records;
  for (std::size_t i = 0; i < sets.size(); ++i) {
    const Sample& s = corpus.samples()[i];
    for (auto& level : outcomes) level.emplace_back();
    for (std::size_t j = 0; j < n; ++j) {
      const Completion& c = sets[i].completions[j];
      const JudgeVerdict& v = sets[i].judgments[j];
      std::array<Outcome, 3> o{};
      for (std::size_t l = 0; l < 3; ++l) {
        o[l] = classify(c, &v, s.ground_truth, s.role, kLevels[l], tax);
        outcomes[l].back().push_back(o[l]);
      }
      shift.push_back({s.sample_id + "#" + std::to_string(j), o[0], o[1], o[2]});
      outcome_records.push_back({{"sample_id", s.sample_id},
                                 {"completion", j},
                                 {"verdict", to_string(c.verdict)},
                                 {"judgment", to_string(v.option)},
                                 {"detection", to_string(o[0])},
                                 {"prediction", to_string(o[1])},
                                 {"reasoning", to_string(o[2])}});
    }
  }

  MetricsReport report;
  report.headline = Granularity::Reasoning;
  report.shift = granularity_shift(shift);
  for (std::size_t l = 0; l < 3; ++l) {
    GranularityReport r;
    r.granularity = kLevels[l];
    std::vector<std::vector<bool>> rows;
    for (const auto& sample : outcomes[l]) {
      std::vector<bool> row;
      for (Outcome o : sample) {
        row.push_back(is_correct(o));
        r.confusion.add(o);
      }
      rows.push_back(std::move(row));
    }
    const OutcomeMatrix matrix(std::move(rows));
    r.pass_at_1 = pass_at_1(matrix);
    r.k = k;
    r.pass_at_k = pass_at_k(matrix, k);
    r.prf = prf(r.confusion);
    std::vector<PairOutcome> pair_outcomes;
    for (const auto& pair : corpus.pairs())
      for (std::size_t j = 0; j < n; ++j)
        pair_outcomes.push_back({pair.pair_id, is_correct(outcomes[l][pair.vulnerable][j]),
                                 is_correct(outcomes[l][pair.patched][j])});
    r.pairs = pair_metrics(pair_outcomes);
    report.levels.push_back(r);
  }

  EvaluateSummary summary{artifact(cfg, artifacts::kReport), artifact(cfg, artifacts::kReportTable)};
  json doc = manifest_for(cfg, "evaluate");
  doc["report"] = report.to_json();
  write_json(summary.output, doc);
  write_jsonl(artifact(cfg, artifacts::kOutcomes), manifest_for(cfg, "evaluate"), outcome_records);
  {
    const std::string table = report.to_table();
    const fs::path tmp = summary.table_output.string() + ".tmp";
    {
      std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
      if (!out) throw DataError("cannot write '" + tmp.string() + "'");
      out << "# vdpost " << tool_version() << " evaluate config_digest=" << config_digest(cfg) << '\n' << table;
    }
    fs::rename(tmp, summary.table_output);
    log << table;
  }
  return summary;
}

// --- gradcheck -------------------------------------------------------------------------

GradcheckSummary cmd_gradcheck(const PipelineConfig* cfg, std::span<const Objective> objectives, std::size_t trials,
                               double step, std::uint64_t seed, std::ostream& log) {
  if (objectives.empty()) throw ArgumentError("gradcheck needs at least one objective");
  GradcheckSummary summary;
  json results = json::array();
  for (Objective o : objectives) {
    const auto report = finite_diff_check(o, trials, step, seed);
    summary.reports.push_back(report);
    results.push_back({{"objective", to_string(o)},
                       {"trials", report.trials},
                       {"parameters_checked", report.parameters_checked},
                       {"max_relative_error", report.max_relative_error}});
    std::ostringstream line;
    line << std::left << std::setw(6) << to_string(o) << " trials=" << report.trials
         << " max_relative_error=" << std::scientific << std::setprecision(3) << report.max_relative_error << '\n';
    log << line.str();
  }
  if (cfg != nullptr) {
    json doc = manifest_for(*cfg, "gradcheck");
    doc["manifest"]["step"] = step;
    doc["results"] = results;
    summary.output = artifact(*cfg, artifacts::kGradcheck);
    write_json(*summary.output, doc);
  }
  return summary;
}

}  // namespace vdpost
