// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 vdpost Contributors

// Prints one PASS/FAIL line per acceptance criterion; exits non-zero when any
// criterion fails.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <iostream>
#include <map>
#include <memory>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "curation_fixture.hpp"
#include "demo_env.hpp"
#include "judge_cases.hpp"
#include "metrics_fixture.hpp"
#include "test_support.hpp"
#include "vdpost/curation.hpp"
#include "vdpost/cwe_taxonomy.hpp"
#include "vdpost/metrics.hpp"
#include "vdpost/objectives.hpp"

namespace {

using namespace vdpost;
namespace fs = std::filesystem;
namespace vt = vdpost::testing;

// Tolerances and budgets.
constexpr double kCweBudgetSeconds = 1.0;
constexpr double kPassAtKTolerance = 1e-12;
constexpr double kPassAtKBudgetSeconds = 5.0;
constexpr int kPassAtKMatrices = 1000;
constexpr double kAdvantageTolerance = 1e-9;
constexpr double kAdvantageBudgetSeconds = 5.0;
constexpr int kAdvantageGroups = 1000;
constexpr std::size_t kGradTrials = 100;
constexpr double kGradStep = 1e-6;
constexpr double kGradTolerance = 1e-4;
constexpr double kGradBudgetSeconds = 60.0;
constexpr double kIdentityTolerance = 1e-12;
constexpr double kCurationBudgetSeconds = 5.0;
constexpr std::size_t kMinAdversarialCases = 20;

struct Check {
  bool ok = true;
  std::vector<std::string> notes;

  void require(bool cond, const std::string& what) {
    if (!cond) {
      ok = false;
      if (notes.size() < 5) notes.push_back(what);
    }
  }
};

using Criterion = std::function<std::string(Check&)>;

std::string fmt(const char* f, double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, x);
  return buf;
}

std::string cwe_matching(Check& c) {
  const double secs = vt::seconds([&] {
    const auto tax = load_taxonomy(vt::fixture("cwe_1000_excerpt.xml"), TaxonomyFormat::OfficialXml);
    const std::vector<CweId> truth{CweId::from_string("CWE-416")};
    const std::vector<std::pair<std::vector<std::string>, bool>> cases{
        {{"CWE-416"}, true},  {{"CWE-825"}, true},  {{"CWE-20", "CWE-416"}, true}, {{"CWE-787", "CWE-825"}, true},
        {{"CWE-119"}, false}, {{"CWE-118"}, false}, {{"CWE-664"}, false},          {{"CWE-119", "CWE-118", "CWE-664"}, false},
    };
    for (const auto& [ids, expected] : cases) {
      const auto preds = parse_cwe_list(ids);
      c.require(match_any(preds, truth, tax) == expected, "predictions " + ids.front() + "... mismatched");
    }
  });
  c.require(secs < kCweBudgetSeconds, "over time budget");
  return fmt("8 cases, %.3f s", secs);
}

std::string pass_at_k_oracle(Check& c) {
  double worst = 0.0;
  const double secs = vt::seconds([&] {
    std::mt19937_64 rng(2026);
    for (int m = 0; m < kPassAtKMatrices; ++m) {
      const std::size_t n = 1 + rng() % 20, g = 8;
      const double p = static_cast<double>(rng() % 101) / 100.0;
      std::bernoulli_distribution coin(p);
      std::vector<std::vector<bool>> rows(n, std::vector<bool>(g));
      for (auto& r : rows)
        for (std::size_t j = 0; j < g; ++j) r[j] = coin(rng);
      const OutcomeMatrix mat(rows);
      worst = std::max(worst, std::abs(pass_at_1(mat) - vt::oracle_pass_at_1(rows)));
      double prev = -1.0;
      for (std::size_t k = 1; k <= g; ++k) {
        const double v = pass_at_k(mat, k);
        worst = std::max(worst, std::abs(v - vt::oracle_pass_at_k(rows, k)));
        c.require(v >= prev, "pass@k not monotone on matrix " + std::to_string(m));
        prev = v;
      }
    }
  });
  c.require(worst <= kPassAtKTolerance, "max deviation " + fmt("%.3g", worst));
  c.require(secs < kPassAtKBudgetSeconds, "over time budget");
  return std::to_string(kPassAtKMatrices) + " matrices, max |err| " + fmt("%.2g", worst) + ", " + fmt("%.3f s", secs);
}

std::string grpo_advantage_properties(Check& c) {
  const double secs = vt::seconds([&] {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(-5.0, 5.0);
    for (int i = 0; i < kAdvantageGroups; ++i) {
      const std::vector<double> same(1 + rng() % 16, u(rng));
      for (double a : grpo_advantages(same)) c.require(a == 0.0, "all-equal group gave a non-zero advantage");

      std::vector<double> r(2 + rng() % 15);
      for (auto& x : r) x = (rng() % 2) ? u(rng) : std::round(u(rng));
      if (std::all_of(r.begin(), r.end(), [&](double x) { return x == r[0]; })) r[0] += 1.0;
      const auto a = grpo_advantages(r);
      c.require(std::abs(vt::mean(a)) < kAdvantageTolerance, "mean not zero");
      c.require(std::abs(vt::population_std(a) - 1.0) < kAdvantageTolerance, "std not one");
      const double scale = 0.01 + std::abs(u(rng)) * 20.0, shift = u(rng) * 100.0;
      std::vector<double> t(r.size());
      for (std::size_t j = 0; j < r.size(); ++j) t[j] = scale * r[j] + shift;
      const auto b = grpo_advantages(t);
      for (std::size_t j = 0; j < r.size(); ++j)
        c.require(std::abs(a[j] - b[j]) < kAdvantageTolerance, "shift/scale invariance violated");
    }
  });
  c.require(secs < kAdvantageBudgetSeconds, "over time budget");
  return std::to_string(kAdvantageGroups) + " groups, " + fmt("%.3f s", secs);
}

std::string gradient_checks(Check& c) {
  std::ostringstream detail;
  const double secs = vt::seconds([&] {
    for (Objective o : {Objective::Sft, Objective::Dpo, Objective::Orpo, Objective::Grpo}) {
      const auto r = finite_diff_check(o, kGradTrials, kGradStep, 0x5eed);
      c.require(r.trials >= kGradTrials, std::string(to_string(o)) + " ran too few trials");
      c.require(r.max_relative_error < kGradTolerance, std::string(to_string(o)) + " error too large");
      detail << to_string(o) << ' ' << fmt("%.2g", r.max_relative_error) << ", ";
    }
  });
  c.require(secs < kGradBudgetSeconds, "over time budget");
  return detail.str() + fmt("%.2f s", secs);
}

LogProbSequence tagged(std::vector<double> v, PolicyTag t) { return {std::move(v), t}; }

std::string closed_form_identities(Check& c) {
  std::mt19937_64 rng(13);
  std::uniform_real_distribution<double> lp(-6.0, -1e-3), u(-2.0, 2.0), beta_d(0.0, 2.0);
  auto draw = [&](PolicyTag tag) {
    std::vector<double> v(1 + rng() % 8);
    for (auto& x : v) x = lp(rng);
    return tagged(v, tag);
  };
  double dpo_worst = 0.0, orpo_worst = 0.0;
  for (int i = 0; i < 200; ++i) {
    const auto ct = draw(PolicyTag::Theta), rt = draw(PolicyTag::Theta);
    const double beta = beta_d(rng);
    const double dpo = dpo_loss(ct, tagged(ct.values, PolicyTag::Ref), rt, tagged(rt.values, PolicyTag::Ref), beta);
    dpo_worst = std::max(dpo_worst, std::abs(dpo - std::log(2.0)));
    orpo_worst = std::max(orpo_worst, std::abs(orpo_loss(ct, rt, 0.0).loss - sft_loss(ct)));

    GrpoConfig cfg;
    cfg.beta = beta;
    const double th = lp(rng), adv = u(rng);
    c.require(grpo_token_term(th, th, lp(rng), adv, cfg).surrogate == adv, "on-policy term differs from advantage");
    c.require(grpo_token_term(th, lp(rng), th, adv, cfg).kl == 0.0, "KL non-zero at theta = ref");

    RolloutGroup group;
    for (int g = 0; g < 3; ++g) group.push_back({draw(PolicyTag::Theta), {}, {}, u(rng)});
    for (auto& r : group) {
      r.old = tagged(r.theta.values, PolicyTag::Old);
      r.ref = draw(PolicyTag::Ref);
      r.ref.values.resize(r.theta.values.size(), -1.0);
    }
    GrpoConfig zero;
    zero.beta = 0.0;
    const std::vector<RolloutGroup> groups{group};
    const auto res = grpo_objective(groups, zero);
    c.require(res.loss == -res.surrogate, "beta = 0 objective carries a KL contribution");
    for (auto& r : group) r.ref = tagged(r.theta.values, PolicyTag::Ref);
    cfg.beta = 0.5;
    c.require(grpo_objective(std::vector<RolloutGroup>{group}, cfg).kl == 0.0, "KL term non-zero at theta = ref");
  }
  c.require(dpo_worst <= kIdentityTolerance, "dpo at theta = ref off by " + fmt("%.3g", dpo_worst));
  c.require(orpo_worst <= kIdentityTolerance, "orpo(beta = 0) differs from sft by " + fmt("%.3g", orpo_worst));
  return "200 random instances, dpo " + fmt("%.2g", dpo_worst) + ", orpo " + fmt("%.2g", orpo_worst);
}

std::string curation_protocol(Check& c) {
  const double secs = vt::seconds([&] {
    const auto f = vt::load_curation_fixture();
    std::set<std::string> kept;
    for (const auto& r : rejection_sample(f.candidates)) kept.insert(r.sample_id);
    c.require(kept == vt::oracle_retained(f.raw), "retention set differs from the judged-correct queries");

    const auto oracle = vt::oracle_pass_at_1(f.raw);
    std::map<std::string, const CandidateSet*> by_id;
    for (const auto& s : f.candidates) by_id[s.sample_id] = &s;
    std::vector<DifficultyRecord> records;
    for (const auto& p : f.corpus.pairs())
      records.push_back(score_difficulty(*by_id.at(f.corpus.vulnerable(p).sample_id),
                                         *by_id.at(f.corpus.patched(p).sample_id)));
    for (const auto& r : records) c.require(r.pairwise_pass_at_1 == oracle.at(r.pair_id), "difficulty of " + r.pair_id);

    std::set<std::string> filtered, expected;
    for (const auto& r : filter_extremes(records)) filtered.insert(r.pair_id);
    for (const auto& [pair, p] : oracle)
      if (p > 0.0 && p < 1.0) expected.insert(pair);
    c.require(filtered == expected, "extreme filter removed the wrong pairs");

    std::vector<std::string> all_ids;
    for (const auto& s : f.corpus.samples()) all_ids.push_back(s.sample_id);
    std::sort(all_ids.begin(), all_ids.end());
    const auto pairs = resolve_pairs(records, f.corpus);
    for (ScheduleMode mode : {ScheduleMode::Random, ScheduleMode::Curriculum, ScheduleMode::Paired})
      for (std::size_t batch : {2u, 4u, 6u, 16u, 20u})
        for (std::uint64_t seed : {1u, 2u, 99u}) {
          const auto s = schedule(pairs, mode, batch, seed);
          std::vector<std::string> flat;
          for (const auto& b : s.batches) {
            c.require(!b.empty() && b.size() <= batch, "batch size out of range");
            flat.insert(flat.end(), b.begin(), b.end());
            if (mode == ScheduleMode::Paired) {
              std::map<std::string, int> n;
              for (const auto& id : b) ++n[f.corpus.find(id)->pair_id];
              for (const auto& [pair, count] : n) c.require(count == 2, "paired batch split " + pair);
            }
          }
          if (mode != ScheduleMode::Random)
            for (std::size_t i = 1; i < flat.size(); ++i)
              c.require(oracle.at(f.corpus.find(flat[i - 1])->pair_id) >= oracle.at(f.corpus.find(flat[i])->pair_id),
                        "curriculum order increases");
          std::sort(flat.begin(), flat.end());
          c.require(flat == all_ids, "schedule is not a permutation");
        }
  });
  c.require(secs < kCurationBudgetSeconds, "over time budget");
  return "16 queries, 8 pairs, 45 schedules, " + fmt("%.3f s", secs);
}

std::string metrics_protocol(Check& c) {
  const auto f = vt::load_metrics_fixture();
  constexpr Granularity levels[3] = {Granularity::Detection, Granularity::Prediction, Granularity::Reasoning};
  Confusion got[3];
  std::map<std::string, std::vector<Outcome>> by_id[3];
  for (const auto& item : f.items)
    for (int l = 0; l < 3; ++l) {
      const Outcome o = classify(item.completion, &item.judgment, item.truth, item.role, levels[l], f.taxonomy);
      got[l].add(o);
      by_id[l][item.id].push_back(o);
    }
  for (int l = 0; l < 3; ++l) c.require(got[l] == f.expected[l], std::string(to_string(levels[l])) + " confusion");
  c.require(got[0].tp >= got[1].tp && got[1].tp >= got[2].tp, "TP counts not ordered by strictness");

  for (int l = 0; l < 3; ++l) {
    std::vector<PairOutcome> pairs;
    for (const auto& item : f.items) {
      if (item.role != Role::Vulnerable) continue;
      const std::string twin = item.pair_id + "-p" + item.id.substr(item.id.rfind('-'));
      pairs.push_back({item.pair_id, is_correct(by_id[l].at(item.id).front()), is_correct(by_id[l].at(twin).front())});
    }
    const auto m = pair_metrics(pairs);
    c.require(std::abs(m.p_c + m.p_b + m.p_v + m.p_r - 1.0) < 1e-12, "pair fractions do not sum to one");
  }

  const auto doc = nlohmann::json::parse(vt::read_file(vt::fixture("judge_agreement_audit.json")));
  const auto human = vt::bits(doc.at("human")), judge = vt::bits(doc.at("judge"));
  const std::unique_ptr<bool[]> hs(new bool[human.size()]), js(new bool[judge.size()]);
  std::copy(human.begin(), human.end(), hs.get());
  std::copy(judge.begin(), judge.end(), js.get());
  const auto counts = judge_agreement(std::span<const bool>(js.get(), judge.size()),
                                      std::span<const bool>(hs.get(), human.size()));
  c.require(counts.correct_judgments == 341 && counts.incorrect_judgments == 59, "agreement counts");
  std::ostringstream s;
  s << "TP " << got[0].tp << '/' << got[1].tp << '/' << got[2].tp << ", agreement (" << counts.correct_judgments
    << ", " << counts.incorrect_judgments << ")";
  return s.str();
}

std::map<std::string, std::string> snapshot(const fs::path& dir) {
  std::map<std::string, std::string> out;
  for (const auto& e : fs::recursive_directory_iterator(dir))
    if (e.is_regular_file()) out[fs::relative(e.path(), dir).string()] = vt::read_file(e.path());
  return out;
}

std::string end_to_end(Check& c) {
  const demo::DemoOptions options;
  std::map<std::string, std::string> runs[2];
  std::size_t worst_peak = 0;
  const double secs = vt::seconds([&] {
    for (int run = 0; run < 2; ++run) {
      vt::DemoEnv env(options);
      for (const char* cmd : {"curate", "difficulty", "schedule", "reward", "evaluate"}) {
        const auto r = env.run({cmd});
        c.require(r.code == 0, std::string(cmd) + " exited " + std::to_string(r.code) + ": " + r.err);
      }
      for (const auto& [model, peak] : env.server->probe().peak_by_model) {
        worst_peak = std::max(worst_peak, peak);
        c.require(peak <= static_cast<std::size_t>(options.max_in_flight), model + " exceeded max_in_flight");
      }
      runs[run] = snapshot(env.out());
    }
  });
  c.require(!runs[0].empty(), "no artifacts written");
  c.require(runs[0].size() == runs[1].size(), "runs wrote different file sets");
  for (const auto& [name, bytes] : runs[0]) {
    auto it = runs[1].find(name);
    c.require(it != runs[1].end() && it->second == bytes, name + " differs between runs");
  }
  return std::to_string(runs[0].size()) + " files identical, peak in flight " + std::to_string(worst_peak) + "/" +
         std::to_string(options.max_in_flight) + ", " + fmt("%.2f s", secs);
}

std::string judge_robustness(Check& c) {
  std::size_t valid = 0, adversarial = 0;
  for (const auto& jc : vt::load_judge_cases()) {
    const std::string got = vt::run_judge_case(jc.spec), want = jc.spec.at("expect");
    c.require(got == want, jc.name + ": got " + got);
    (jc.valid ? valid : adversarial)++;
  }
  c.require(adversarial >= kMinAdversarialCases, "too few adversarial cases");
  return std::to_string(valid) + " valid, " + std::to_string(adversarial) + " adversarial";
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, Criterion>> criteria{
      {"CWE matching on the research-view excerpt", cwe_matching},
      {"pass@1 and pass@k against a brute-force oracle", pass_at_k_oracle},
      {"GRPO group advantages", grpo_advantage_properties},
      {"objective gradients against central differences", gradient_checks},
      {"closed-form objective identities", closed_form_identities},
      {"curation protocol on bundled fixtures", curation_protocol},
      {"metrics protocol on the hand-labeled set", metrics_protocol},
      {"offline end-to-end run is reproducible and bounded", end_to_end},
      {"judge protocol robustness", judge_robustness},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Check check;
    std::string detail;
    try {
      detail = criteria[i].second(check);
    } catch (const std::exception& e) {
      check.ok = false;
      check.notes.push_back(std::string("exception: ") + e.what());
    }
    std::cout << (check.ok ? "PASS" : "FAIL") << " criterion " << (i + 1) << ": " << criteria[i].first;
    if (!detail.empty()) std::cout << " (" << detail << ")";
    for (const auto& n : check.notes) std::cout << "; " << n;
    std::cout << '\n';
    failed += check.ok ? 0 : 1;
  }
  return failed == 0 ? 0 : 1;
}
