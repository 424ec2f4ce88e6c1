// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 vdpost Contributors

// Central-difference verification of the objective gradients through a toy
// bigram policy.

#include <cmath>
#include <functional>
#include <random>

#include "vdpost/error.hpp"
#include "vdpost/objectives.hpp"
#include "vdpost/toy_policy.hpp"

namespace vdpost {

namespace {

using Tokens = std::vector<int>;

struct Problem {
  std::function<double(const ToyPolicy&)> loss;
  std::function<std::vector<double>(const ToyPolicy&)> grad;
};

std::size_t draw(std::mt19937_64& rng, std::size_t lo, std::size_t hi) {
  return lo + static_cast<std::size_t>(rng() % (hi - lo + 1));
}

LogProbSequence tagged(std::vector<double> values, PolicyTag tag) { return {std::move(values), tag}; }

Problem sft_problem(std::mt19937_64& rng, const ToyPolicy& start) {
  Tokens seq = start.sample(draw(rng, 1, 6), rng);
  return {[seq](const ToyPolicy& p) { return sft_loss(tagged(p.token_logprobs(seq), PolicyTag::Theta)); },
          [seq](const ToyPolicy& p) {
            std::vector<double> g(p.parameter_count(), 0.0);
            p.accumulate_gradient(seq, sft_loss_grad(tagged(p.token_logprobs(seq), PolicyTag::Theta)), g);
            return g;
          }};
}

Problem dpo_problem(std::size_t vocab, std::mt19937_64& rng, const ToyPolicy& start) {
  const ToyPolicy ref = ToyPolicy::random(vocab, rng);
  Tokens chosen = start.sample(draw(rng, 1, 6), rng);
  Tokens rejected = start.sample(draw(rng, 1, 6), rng);
  const auto chosen_ref = tagged(ref.token_logprobs(chosen), PolicyTag::Ref);
  const auto rejected_ref = tagged(ref.token_logprobs(rejected), PolicyTag::Ref);
  const double beta = 0.05 + 0.5 * static_cast<double>(rng() % 1000) / 1000.0;
  auto views = [=](const ToyPolicy& p) {
    return std::pair{tagged(p.token_logprobs(chosen), PolicyTag::Theta),
                     tagged(p.token_logprobs(rejected), PolicyTag::Theta)};
  };
  return {[=](const ToyPolicy& p) {
            auto [c, r] = views(p);
            return dpo_loss(c, chosen_ref, r, rejected_ref, beta);
          },
          [=](const ToyPolicy& p) {
            auto [c, r] = views(p);
            const auto pg = dpo_loss_grad(c, chosen_ref, r, rejected_ref, beta);
            std::vector<double> g(p.parameter_count(), 0.0);
            p.accumulate_gradient(chosen, pg.chosen, g);
            p.accumulate_gradient(rejected, pg.rejected, g);
            return g;
          }};
}

Problem orpo_problem(std::mt19937_64& rng, const ToyPolicy& start) {
  Tokens chosen = start.sample(draw(rng, 1, 6), rng);
  Tokens rejected = start.sample(draw(rng, 1, 6), rng);
  const double beta = 0.05 + 0.5 * static_cast<double>(rng() % 1000) / 1000.0;
  return {[=](const ToyPolicy& p) {
            return orpo_loss(tagged(p.token_logprobs(chosen), PolicyTag::Theta),
                             tagged(p.token_logprobs(rejected), PolicyTag::Theta), beta)
                .loss;
          },
          [=](const ToyPolicy& p) {
            const auto pg = orpo_loss_grad(tagged(p.token_logprobs(chosen), PolicyTag::Theta),
                                           tagged(p.token_logprobs(rejected), PolicyTag::Theta), beta);
            std::vector<double> g(p.parameter_count(), 0.0);
            p.accumulate_gradient(chosen, pg.chosen, g);
            p.accumulate_gradient(rejected, pg.rejected, g);
            return g;
          }};
}

Problem grpo_problem(std::size_t vocab, std::mt19937_64& rng, const ToyPolicy& start, std::size_t trial) {
  // old is a small perturbation of the start point so ratios straddle the
  // clip range; ref is unrelated.
  std::vector<double> old_params(start.parameters().begin(), start.parameters().end());
  for (double& v : old_params) v += 0.3 * (static_cast<double>(rng() % 2001) / 1000.0 - 1.0);
  const ToyPolicy old = start.with_parameters(std::move(old_params));
  const ToyPolicy ref = ToyPolicy::random(vocab, rng);

  GrpoConfig cfg;
  cfg.beta = trial % 2 == 0 ? 0.0 : 0.05;
  const std::size_t groups = draw(rng, 1, 2);
  std::vector<std::vector<Tokens>> seqs(groups);
  std::vector<std::vector<double>> advantages(groups);
  for (std::size_t g = 0; g < groups; ++g) {
    const std::size_t size = draw(rng, 2, 4);
    std::vector<double> rewards;
    for (std::size_t i = 0; i < size; ++i) {
      seqs[g].push_back(old.sample(draw(rng, 1, 6), rng));
      rewards.push_back(rng() % 2 == 0 ? 1.0 : -1.0);
    }
    advantages[g] = grpo_advantages(rewards, cfg);
  }
  auto build = [=](const ToyPolicy& p) {
    std::vector<RolloutGroup> out(groups);
    for (std::size_t g = 0; g < groups; ++g)
      for (std::size_t i = 0; i < seqs[g].size(); ++i)
        out[g].push_back({tagged(p.token_logprobs(seqs[g][i]), PolicyTag::Theta),
                          tagged(old.token_logprobs(seqs[g][i]), PolicyTag::Old),
                          tagged(ref.token_logprobs(seqs[g][i]), PolicyTag::Ref), advantages[g][i]});
    return out;
  };
  return {[=](const ToyPolicy& p) { return grpo_objective(build(p), cfg).loss; },
          [=](const ToyPolicy& p) {
            const auto groups_ = build(p);
            const auto tg = grpo_loss_grad(groups_, cfg);
            std::vector<double> g(p.parameter_count(), 0.0);
            for (std::size_t a = 0; a < groups; ++a)
              for (std::size_t i = 0; i < seqs[a].size(); ++i) p.accumulate_gradient(seqs[a][i], tg[a][i], g);
            return g;
          }};
}

}  // namespace

GradCheckReport finite_diff_check(Objective objective, std::size_t trial_count, double step, std::uint64_t seed) {
  if (trial_count == 0) throw ArgumentError("finite_diff_check: trial_count must be positive");
  if (!(step >= 1e-8 && step <= 1e-3)) throw ArgumentError("finite_diff_check: step must lie in [1e-8, 1e-3]");

  GradCheckReport report;
  report.objective = objective;
  report.trials = trial_count;
  std::mt19937_64 rng(seed ^ (static_cast<std::uint64_t>(objective) * 0x9e3779b97f4a7c15ULL));
  for (std::size_t trial = 0; trial < trial_count; ++trial) {
    const std::size_t vocab = draw(rng, 2, 10);
    const ToyPolicy policy = ToyPolicy::random(vocab, rng);
    Problem problem;
    switch (objective) {
      case Objective::Sft: problem = sft_problem(rng, policy); break;
      case Objective::Dpo: problem = dpo_problem(vocab, rng, policy); break;
      case Objective::Orpo: problem = orpo_problem(rng, policy); break;
      case Objective::Grpo: problem = grpo_problem(vocab, rng, policy, trial); break;
    }
    const std::vector<double> analytic = problem.grad(policy);
    std::vector<double> numeric(policy.parameter_count());
    std::vector<double> params(policy.parameters().begin(), policy.parameters().end());
    for (std::size_t i = 0; i < params.size(); ++i) {
      const double keep = params[i];
      params[i] = keep + step;
      const double up = problem.loss(policy.with_parameters(params));
      params[i] = keep - step;
      const double down = problem.loss(policy.with_parameters(params));
      params[i] = keep;
      if (!std::isfinite(up) || !std::isfinite(down))
        throw Error("finite_diff_check: non-finite " + std::string(to_string(objective)) + " loss at a probe point");
      numeric[i] = (up - down) / (2.0 * step);
    }
    report.parameters_checked += params.size();
    report.max_relative_error = std::max(report.max_relative_error, relative_error(analytic, numeric));
  }
  return report;
}

}  // namespace vdpost
