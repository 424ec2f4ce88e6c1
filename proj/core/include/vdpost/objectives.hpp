// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 vdpost Contributors

// Reference kernels for the SFT, DPO, ORPO and GRPO objectives. Every kernel
// returns a loss (the negated objective) together with its analytic gradient
// with respect to the Theta token log-probabilities.

#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "vdpost/logprob.hpp"

namespace vdpost {

enum class StdMode { Population, Sample };

struct GrpoConfig {
  double beta = 0.0;  // KL weight
  double clip_epsilon = 0.2;
  StdMode std_mode = StdMode::Population;
  double std_floor = 1e-8;  // below this the group counts as all-equal

  /// Throws ArgumentError on negative beta, non-positive epsilon or floor.
  void validate() const;
};

// --- SFT -----------------------------------------------------------------------

/// Negative mean token log-probability of the chosen response.
double sft_loss(const LogProbSequence& chosen);
/// d loss / d chosen.values[t].
std::vector<double> sft_loss_grad(const LogProbSequence& chosen);

// --- DPO -----------------------------------------------------------------------

/// beta * (mean log-ratio of chosen - mean log-ratio of rejected).
double dpo_margin(const LogProbSequence& chosen_theta, const LogProbSequence& chosen_ref,
                  const LogProbSequence& rejected_theta, const LogProbSequence& rejected_ref, double beta);

/// -log sigmoid(margin).
double dpo_loss(const LogProbSequence& chosen_theta, const LogProbSequence& chosen_ref,
                const LogProbSequence& rejected_theta, const LogProbSequence& rejected_ref, double beta);

struct PairGradient {
  std::vector<double> chosen;
  std::vector<double> rejected;
};

PairGradient dpo_loss_grad(const LogProbSequence& chosen_theta, const LogProbSequence& chosen_ref,
                           const LogProbSequence& rejected_theta, const LogProbSequence& rejected_ref, double beta);

// --- ORPO ----------------------------------------------------------------------

/// Largest length-normalised likelihood admitted before the odds map.
inline constexpr double kOrpoLikelihoodCeiling = 1.0 - 1e-8;

struct OrpoResult {
  double loss = 0.0;
  double sft_part = 0.0;          // -mean chosen log-prob
  double log_odds_ratio = 0.0;    // log odds(chosen) - log odds(rejected)
  double odds_ratio_term = 0.0;   // -beta * log sigmoid(log_odds_ratio)
  bool clamped = false;           // a likelihood hit kOrpoLikelihoodCeiling
};

/// Sequence likelihood is exp(mean token log-prob) for both responses.
OrpoResult orpo_loss(const LogProbSequence& chosen_theta, const LogProbSequence& rejected_theta, double beta);
PairGradient orpo_loss_grad(const LogProbSequence& chosen_theta, const LogProbSequence& rejected_theta, double beta);

/// log(p / (1 - p)) given log p, with p clamped to kOrpoLikelihoodCeiling.
double log_odds_from_logprob(double mean_logprob, bool* clamped = nullptr);

// --- GRPO ----------------------------------------------------------------------

/// (r_i - mean) / std, or all zeros when std < cfg.std_floor.
std::vector<double> grpo_advantages(std::span<const double> rewards, const GrpoConfig& cfg = {});

struct GrpoTokenTerm {
  double surrogate = 0.0;  // min(rho * A, clip(rho, 1-eps, 1+eps) * A)
  double kl = 0.0;         // exp(d) - d - 1 with d = logp_ref - logp_theta
};

GrpoTokenTerm grpo_token_term(double logp_theta, double logp_old, double logp_ref, double advantage,
                              const GrpoConfig& cfg);

struct RolloutResponse {
  LogProbSequence theta;
  LogProbSequence old;
  LogProbSequence ref;
  double advantage = 0.0;
};

using RolloutGroup = std::vector<RolloutResponse>;

struct GrpoResult {
  double loss = 0.0;       // -(surrogate - beta * kl)
  double surrogate = 0.0;  // group- and length-averaged clipped surrogate
  double kl = 0.0;         // group- and length-averaged KL estimate
};

/// Averages 1/G sum_i 1/|o_i| sum_t over each group, then over groups.
GrpoResult grpo_objective(std::span<const RolloutGroup> groups, const GrpoConfig& cfg);

/// grad[g][i][t] = d loss / d groups[g][i].theta.values[t].
std::vector<std::vector<std::vector<double>>> grpo_loss_grad(std::span<const RolloutGroup> groups,
                                                             const GrpoConfig& cfg);

// --- gradient verification -----------------------------------------------------

enum class Objective { Sft, Dpo, Orpo, Grpo };

std::string_view to_string(Objective objective) noexcept;
std::optional<Objective> parse_objective(std::string_view text) noexcept;

struct GradCheckReport {
  Objective objective = Objective::Sft;
  std::size_t trials = 0;
  std::size_t parameters_checked = 0;
  double max_relative_error = 0.0;
};

/// Builds random toy-policy instances (vocab <= 10, sequences <= 6 tokens),
/// compares analytic parameter gradients of the selected loss with central
/// differences, and reports the worst relative error. step must lie in
/// [1e-8, 1e-3]; throws Error when a probe point yields a non-finite loss.
GradCheckReport finite_diff_check(Objective objective, std::size_t trial_count, double step,
                                  std::uint64_t seed = 0x5eed);

/// Relative error between two gradient vectors:
/// ||a - b||_inf / max(||a||_inf, ||b||_inf, 1e-8).
double relative_error(std::span<const double> analytic, std::span<const double> numeric);

}  // namespace vdpost
