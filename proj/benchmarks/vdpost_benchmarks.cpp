// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 vdpost Contributors

#include <benchmark/benchmark.h>

#include <random>
#include <string>
#include <vector>

#include "vdpost/completion.hpp"
#include "vdpost/corpus.hpp"
#include "vdpost/cwe_taxonomy.hpp"
#include "vdpost/metrics.hpp"
#include "vdpost/objectives.hpp"

namespace {

using namespace vdpost;

OutcomeMatrix random_matrix(std::size_t n, std::size_t g, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<std::vector<bool>> rows(n, std::vector<bool>(g));
  for (auto& r : rows)
    for (std::size_t j = 0; j < g; ++j) r[j] = rng() & 1u;
  return OutcomeMatrix(std::move(rows));
}

void BM_PassAtK(benchmark::State& state) {
  const auto m = random_matrix(static_cast<std::size_t>(state.range(0)), 8, 1);
  for (auto _ : state) benchmark::DoNotOptimize(pass_at_k(m, 4));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_PassAtK)->Arg(20)->Arg(1000)->Arg(100000);

void BM_GrpoAdvantages(benchmark::State& state) {
  std::mt19937_64 rng(2);
  std::normal_distribution<double> n;
  std::vector<double> rewards(static_cast<std::size_t>(state.range(0)));
  for (auto& r : rewards) r = n(rng);
  for (auto _ : state) benchmark::DoNotOptimize(grpo_advantages(rewards));
}
BENCHMARK(BM_GrpoAdvantages)->Arg(8)->Arg(64)->Arg(1024);

std::string synthetic_source(std::size_t lines) {
  std::string s;
  for (std::size_t i = 0; i < lines; ++i) {
    s += "  int v" + std::to_string(i) + " = f(\"/* not a comment */\", '\\'');  // trailing note\n";
    if (i % 7 == 0) s += "  /* block\n     comment */\n";
  }
  return s;
}

void BM_StripComments(benchmark::State& state) {
  const std::string src = synthetic_source(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(strip_comments(src));
  state.SetBytesProcessed(state.iterations() * static_cast<std::int64_t>(src.size()));
}
BENCHMARK(BM_StripComments)->Arg(50)->Arg(2000);

void BM_ParseCompletion(benchmark::State& state) {
  std::string text = "<think>";
  for (int i = 0; i < 200; ++i) text += "step " + std::to_string(i) + " considers CWE-" + std::to_string(100 + i) + "\n";
  text += "</think>\nThe pointer is used after free (CWE-416, CWE-825).\nHAS_VUL\n";
  for (auto _ : state) benchmark::DoNotOptimize(parse_completion(text));
}
BENCHMARK(BM_ParseCompletion);

void BM_MatchAny(benchmark::State& state) {
  std::set<CweId> nodes;
  std::set<CweTaxonomy::Edge> edges;
  for (std::uint32_t i = 2; i < 1000; ++i) {
    nodes.insert(CweId(i));
    nodes.insert(CweId(i / 2));
    edges.insert({CweId(i), CweId(i / 2)});
  }
  const CweTaxonomy tax(nodes, edges);
  const std::vector<CweId> truth{CweId(416)}, preds{CweId(20), CweId(119), CweId(832), CweId(208)};
  for (auto _ : state) benchmark::DoNotOptimize(match_any(preds, truth, tax));
}
BENCHMARK(BM_MatchAny);

void BM_GradCheck(benchmark::State& state) {
  const auto objective = static_cast<Objective>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(finite_diff_check(objective, 10, 1e-6, 3));
  state.SetLabel(std::string(to_string(objective)));
}
BENCHMARK(BM_GradCheck)->DenseRange(0, 3)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
