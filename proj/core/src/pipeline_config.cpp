// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 vdpost Contributors

#include <algorithm>
#include <fstream>
#include <set>

#include "vdpost/digest.hpp"
#include "vdpost/error.hpp"
#include "vdpost/pipeline.hpp"

namespace vdpost {

using nlohmann::json;
namespace fs = std::filesystem;

std::string_view to_string(CurateMode mode) noexcept { return mode == CurateMode::Sft ? "sft" : "preference"; }

std::optional<CurateMode> parse_curate_mode(std::string_view text) noexcept {
  if (text == "sft") return CurateMode::Sft;
  if (text == "preference") return CurateMode::Preference;
  return std::nullopt;
}

std::string_view to_string(CorpusSlice slice) noexcept {
  switch (slice) {
    case CorpusSlice::All: return "all";
    case CorpusSlice::Train: return "train";
    case CorpusSlice::Validation: return "validation";
    case CorpusSlice::Test: return "test";
  }
  return "all";
}

std::optional<CorpusSlice> parse_corpus_slice(std::string_view text) noexcept {
  for (auto s : {CorpusSlice::All, CorpusSlice::Train, CorpusSlice::Validation, CorpusSlice::Test})
    if (text == to_string(s)) return s;
  return std::nullopt;
}

namespace {

std::string_view template_name(PromptTemplate t) { return t == PromptTemplate::Detector ? "detector" : "rationalization"; }
std::string_view format_name(TaxonomyFormat f) { return f == TaxonomyFormat::OfficialXml ? "official_xml" : "edge_list_json"; }
std::string_view keep_name(KeepPolicy k) { return k == KeepPolicy::FirstCorrect ? "first_correct" : "all_correct"; }
std::string_view pairing_name(PairingPolicy p) { return p == PairingPolicy::FirstPair ? "first_pair" : "cartesian"; }
std::string_view std_mode_name(StdMode m) { return m == StdMode::Population ? "population" : "sample"; }

void reject_unknown(const json& j, std::string_view where, const std::set<std::string>& known) {
  if (!j.is_object()) throw ConfigError(std::string(where) + " must be a JSON object");
  for (const auto& [key, _] : j.items())
    if (!known.contains(key)) throw ConfigError("unknown key \"" + key + "\" in " + std::string(where));
}

fs::path resolve(const fs::path& base, const std::string& text) {
  fs::path p(text);
  return p.is_absolute() || base.empty() ? p : base / p;
}

template <class T, class Parse>
T parse_enum(const json& j, std::string_view key, Parse parse) {
  const auto text = j.get<std::string>();
  auto v = parse(text);
  if (!v) throw ConfigError("invalid value \"" + text + "\" for " + std::string(key));
  return *v;
}

}  // namespace

void PipelineConfig::validate() const {
  if (corpus.empty()) throw ConfigError("config: corpus path is required");
  if (candidates < 1) throw ConfigError("config: candidates must be >= 1");
  if (batch_size < 1) throw ConfigError("config: schedule.batch_size must be >= 1");
  if (schedule_mode == ScheduleMode::Paired && batch_size % 2 != 0)
    throw ConfigError("config: paired scheduling needs an even batch_size");
  if (workers < 1 || workers > 1024) throw ConfigError("config: workers must lie in [1, 1024]");
  if (pass_k > static_cast<std::size_t>(candidates)) throw ConfigError("config: pass_k exceeds candidates");
  if (gradcheck_trials < 1) throw ConfigError("config: gradcheck.trials must be >= 1");
  if (!(gradcheck_step >= 1e-8 && gradcheck_step <= 1e-3)) throw ConfigError("config: gradcheck.step must lie in [1e-8, 1e-3]");
  const double sum = split.train + split.validation + split.test;
  if (split.train < 0 || split.validation < 0 || split.test < 0 || std::abs(sum - 1.0) > 1e-9)
    throw ConfigError("config: split ratios must be non-negative and sum to 1");
  for (const auto& [role, endpoint] : endpoints) {
    if (std::find(std::begin(kEndpointRoles), std::end(kEndpointRoles), role) == std::end(kEndpointRoles))
      throw ConfigError("config: unknown endpoint role \"" + role + "\"");
    endpoint.validate();
  }
  if (curate_generator && *curate_generator != "policy" && *curate_generator != "teacher")
    throw ConfigError("config: curate.generator must be \"policy\" or \"teacher\"");
  try {
    grpo.validate();
  } catch (const ArgumentError& e) {
    throw ConfigError(std::string("config: grpo: ") + e.what());
  }
}

const EndpointConfig* PipelineConfig::endpoint(std::string_view role) const {
  auto it = endpoints.find(std::string(role));
  return it == endpoints.end() ? nullptr : &it->second;
}

std::string PipelineConfig::curation_generator() const {
  if (curate_generator) return *curate_generator;
  if (curate_mode == CurateMode::Sft && endpoint("teacher") != nullptr) return "teacher";
  return "policy";
}

PipelineConfig pipeline_config_from_json(const json& j, const fs::path& base_dir) {
  reject_unknown(j, "config",
                 {"corpus", "taxonomy", "endpoints", "candidates", "granularity", "curate", "schedule", "corpus_filter",
                  "pass_k", "grpo", "gradcheck", "output_dir", "seed", "workers"});
  PipelineConfig c;
  try {
    c.corpus = resolve(base_dir, j.at("corpus").get<std::string>());
    if (auto t = j.find("taxonomy"); t != j.end()) {
      reject_unknown(*t, "taxonomy", {"path", "format"});
      c.taxonomy = resolve(base_dir, t->at("path").get<std::string>());
      if (t->contains("format")) {
        try {
          c.taxonomy_format = parse_taxonomy_format((*t)["format"].get<std::string>());
        } catch (const TaxonomyError& e) {
          throw ConfigError(std::string("taxonomy: ") + e.what());
        }
      }
    }
    if (auto e = j.find("endpoints"); e != j.end()) {
      if (!e->is_object()) throw ConfigError("endpoints must be an object keyed by role");
      for (const auto& [role, body] : e->items()) {
        try {
          c.endpoints.emplace(role, endpoint_from_json(body));
        } catch (const ConfigError& err) {
          throw ConfigError("endpoint \"" + role + "\": " + err.what());
        }
      }
    }
    c.candidates = j.value("candidates", c.candidates);
    if (j.contains("granularity"))
      c.granularity = parse_enum<Granularity>(j["granularity"], "granularity", parse_granularity);
    if (auto cu = j.find("curate"); cu != j.end()) {
      reject_unknown(*cu, "curate", {"mode", "template", "keep", "pairing", "generator"});
      if (cu->contains("generator")) c.curate_generator = (*cu)["generator"].get<std::string>();
      if (cu->contains("mode")) c.curate_mode = parse_enum<CurateMode>((*cu)["mode"], "curate.mode", parse_curate_mode);
      if (cu->contains("template"))
        c.curate_template = parse_enum<PromptTemplate>((*cu)["template"], "curate.template", parse_prompt_template);
      if (cu->contains("keep"))
        c.keep = parse_enum<KeepPolicy>((*cu)["keep"], "curate.keep", [](std::string_view s) -> std::optional<KeepPolicy> {
          if (s == "first_correct") return KeepPolicy::FirstCorrect;
          if (s == "all_correct") return KeepPolicy::AllCorrect;
          return std::nullopt;
        });
      if (cu->contains("pairing"))
        c.pairing = parse_enum<PairingPolicy>((*cu)["pairing"], "curate.pairing",
                                              [](std::string_view s) -> std::optional<PairingPolicy> {
                                                if (s == "first_pair") return PairingPolicy::FirstPair;
                                                if (s == "cartesian") return PairingPolicy::Cartesian;
                                                return std::nullopt;
                                              });
    }
    if (auto s = j.find("schedule"); s != j.end()) {
      reject_unknown(*s, "schedule", {"mode", "batch_size", "filter_extremes"});
      if (s->contains("mode")) c.schedule_mode = parse_enum<ScheduleMode>((*s)["mode"], "schedule.mode", parse_schedule_mode);
      c.batch_size = s->value("batch_size", c.batch_size);
      c.filter_extremes = s->value("filter_extremes", c.filter_extremes);
    }
    if (auto f = j.find("corpus_filter"); f != j.end()) {
      reject_unknown(*f, "corpus_filter", {"deduplicate", "slice", "ratios"});
      c.deduplicate = f->value("deduplicate", c.deduplicate);
      if (f->contains("slice")) c.slice = parse_enum<CorpusSlice>((*f)["slice"], "corpus_filter.slice", parse_corpus_slice);
      if (auto r = f->find("ratios"); r != f->end()) {
        const auto v = r->get<std::vector<double>>();
        if (v.size() != 3) throw ConfigError("corpus_filter.ratios must hold three fractions");
        c.split = {v[0], v[1], v[2]};
      }
    }
    c.pass_k = j.value("pass_k", c.pass_k);
    if (auto g = j.find("grpo"); g != j.end()) {
      reject_unknown(*g, "grpo", {"beta", "clip_epsilon", "std", "std_floor"});
      c.grpo.beta = g->value("beta", c.grpo.beta);
      c.grpo.clip_epsilon = g->value("clip_epsilon", c.grpo.clip_epsilon);
      c.grpo.std_floor = g->value("std_floor", c.grpo.std_floor);
      if (g->contains("std"))
        c.grpo.std_mode = parse_enum<StdMode>((*g)["std"], "grpo.std", [](std::string_view s) -> std::optional<StdMode> {
          if (s == "population") return StdMode::Population;
          if (s == "sample") return StdMode::Sample;
          return std::nullopt;
        });
    }
    if (auto g = j.find("gradcheck"); g != j.end()) {
      reject_unknown(*g, "gradcheck", {"trials", "step"});
      c.gradcheck_trials = g->value("trials", c.gradcheck_trials);
      c.gradcheck_step = g->value("step", c.gradcheck_step);
    }
    if (j.contains("output_dir")) c.output_dir = resolve(base_dir, j["output_dir"].get<std::string>());
    else if (!base_dir.empty()) c.output_dir = base_dir / c.output_dir;
    c.seed = j.value("seed", c.seed);
    c.workers = j.value("workers", c.workers);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  c.validate();
  return c;
}

PipelineConfig load_pipeline_config(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path.string() + "'");
  json j = json::parse(in, nullptr, false);
  if (j.is_discarded()) throw ConfigError("config file '" + path.string() + "' is not valid JSON");
  return pipeline_config_from_json(j, path.parent_path());
}

json to_json(const PipelineConfig& c) {
  json endpoints = json::object();
  for (const auto& [role, e] : c.endpoints) endpoints[role] = to_json(e);
  json j = {{"corpus", c.corpus.generic_string()},
            {"endpoints", endpoints},
            {"candidates", c.candidates},
            {"granularity", to_string(c.granularity)},
            {"curate",
             {{"mode", to_string(c.curate_mode)},
              {"template", template_name(c.curate_template)},
              {"keep", keep_name(c.keep)},
              {"pairing", pairing_name(c.pairing)},
              {"generator", c.curation_generator()}}},
            {"schedule",
             {{"mode", to_string(c.schedule_mode)}, {"batch_size", c.batch_size}, {"filter_extremes", c.filter_extremes}}},
            {"corpus_filter",
             {{"deduplicate", c.deduplicate},
              {"slice", to_string(c.slice)},
              {"ratios", {c.split.train, c.split.validation, c.split.test}}}},
            {"pass_k", c.pass_k},
            {"grpo",
             {{"beta", c.grpo.beta},
              {"clip_epsilon", c.grpo.clip_epsilon},
              {"std", std_mode_name(c.grpo.std_mode)},
              {"std_floor", c.grpo.std_floor}}},
            {"gradcheck", {{"trials", c.gradcheck_trials}, {"step", c.gradcheck_step}}},
            {"output_dir", c.output_dir.generic_string()},
            {"seed", c.seed},
            {"workers", c.workers}};
  if (c.taxonomy) j["taxonomy"] = {{"path", c.taxonomy->generic_string()}, {"format", format_name(c.taxonomy_format)}};
  return j;
}

std::string config_digest(const PipelineConfig& config) {
  json j = to_json(config);
  j.erase("output_dir");
  j.erase("workers");  // scheduling only; outputs do not depend on it
  // Paths are reduced to file names so relocating a checkout keeps the digest.
  j["corpus"] = config.corpus.filename().generic_string();
  if (config.taxonomy) j["taxonomy"]["path"] = config.taxonomy->filename().generic_string();
  // Transport settings (base_url, limits, key variable) do not change replies.
  for (auto& [role, e] : j["endpoints"].items()) {
    json kept = {{"model", e["model"]}, {"temperature", e["temperature"]}};
    if (e.contains("reasoning_effort")) kept["reasoning_effort"] = e["reasoning_effort"];
    e = std::move(kept);
  }
  return sha256_hex(j.dump());
}

}  // namespace vdpost
