// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 vdpost Contributors

#include "vdpost/objectives.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "vdpost/error.hpp"

namespace vdpost {

namespace {

void check_sequence(const LogProbSequence& s, PolicyTag expected, const char* what) {
  if (s.values.empty()) throw ArgumentError(std::string(what) + ": empty log-probability sequence");
  if (s.tag != expected)
    throw ArgumentError(std::string(what) + ": expected a " + std::string(to_string(expected)) + " sequence, got " +
                        std::string(to_string(s.tag)));
  for (double v : s.values)
    if (!std::isfinite(v)) throw ArgumentError(std::string(what) + ": non-finite log-probability");
}

void check_aligned(const LogProbSequence& a, const LogProbSequence& b, const char* what) {
  if (a.values.size() != b.values.size())
    throw ArgumentError(std::string(what) + ": length mismatch (" + std::to_string(a.values.size()) + " vs " +
                        std::to_string(b.values.size()) + ")");
}

double mean(const std::vector<double>& v) {
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

double mean_log_ratio(const LogProbSequence& theta, const LogProbSequence& ref) {
  double sum = 0.0;
  for (std::size_t t = 0; t < theta.values.size(); ++t) sum += theta.values[t] - ref.values[t];
  return sum / static_cast<double>(theta.values.size());
}

// log(1 + exp(x)) without overflow.
double softplus(double x) { return x > 0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x)); }

double sigmoid(double x) {
  if (x >= 0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

void check_dpo_inputs(const LogProbSequence& ct, const LogProbSequence& cr, const LogProbSequence& rt,
                      const LogProbSequence& rr, double beta) {
  check_sequence(ct, PolicyTag::Theta, "dpo chosen_theta");
  check_sequence(cr, PolicyTag::Ref, "dpo chosen_ref");
  check_sequence(rt, PolicyTag::Theta, "dpo rejected_theta");
  check_sequence(rr, PolicyTag::Ref, "dpo rejected_ref");
  check_aligned(ct, cr, "dpo chosen");
  check_aligned(rt, rr, "dpo rejected");
  if (!std::isfinite(beta) || beta < 0) throw ArgumentError("dpo: beta must be finite and non-negative");
}

}  // namespace

void GrpoConfig::validate() const {
  if (!std::isfinite(beta) || beta < 0) throw ArgumentError("grpo: beta must be non-negative");
  if (!(clip_epsilon > 0)) throw ArgumentError("grpo: clip_epsilon must be positive");
  if (!(std_floor > 0)) throw ArgumentError("grpo: std_floor must be positive");
}

// --- SFT -------------------------------------------------------------------------

double sft_loss(const LogProbSequence& chosen) {
  check_sequence(chosen, PolicyTag::Theta, "sft");
  return -mean(chosen.values);
}

std::vector<double> sft_loss_grad(const LogProbSequence& chosen) {
  check_sequence(chosen, PolicyTag::Theta, "sft");
  return std::vector<double>(chosen.values.size(), -1.0 / static_cast<double>(chosen.values.size()));
}

// --- DPO -------------------------------------------------------------------------

double dpo_margin(const LogProbSequence& ct, const LogProbSequence& cr, const LogProbSequence& rt,
                  const LogProbSequence& rr, double beta) {
  check_dpo_inputs(ct, cr, rt, rr, beta);
  return beta * (mean_log_ratio(ct, cr) - mean_log_ratio(rt, rr));
}

double dpo_loss(const LogProbSequence& ct, const LogProbSequence& cr, const LogProbSequence& rt,
                const LogProbSequence& rr, double beta) {
  return softplus(-dpo_margin(ct, cr, rt, rr, beta));
}

PairGradient dpo_loss_grad(const LogProbSequence& ct, const LogProbSequence& cr, const LogProbSequence& rt,
                           const LogProbSequence& rr, double beta) {
  const double m = dpo_margin(ct, cr, rt, rr, beta);
  const double dm = -sigmoid(-m);  // d loss / d margin
  PairGradient g;
  g.chosen.assign(ct.values.size(), dm * beta / static_cast<double>(ct.values.size()));
  g.rejected.assign(rt.values.size(), -dm * beta / static_cast<double>(rt.values.size()));
  return g;
}

// --- ORPO ------------------------------------------------------------------------

namespace {

const double kLogCeiling = std::log(kOrpoLikelihoodCeiling);

double clamp_logprob(double mean_logprob, bool& clamped) {
  clamped = mean_logprob > kLogCeiling;
  return clamped ? kLogCeiling : mean_logprob;
}

// d/dx log(e^x / (1 - e^x)) = 1 / (1 - e^x).
double log_odds_slope(double x) { return 1.0 / -std::expm1(x); }

}  // namespace

double log_odds_from_logprob(double mean_logprob, bool* clamped) {
  bool c = false;
  const double x = clamp_logprob(mean_logprob, c);
  if (clamped) *clamped = c;
  return x - std::log(-std::expm1(x));
}

OrpoResult orpo_loss(const LogProbSequence& chosen, const LogProbSequence& rejected, double beta) {
  check_sequence(chosen, PolicyTag::Theta, "orpo chosen");
  check_sequence(rejected, PolicyTag::Theta, "orpo rejected");
  if (!std::isfinite(beta) || beta < 0) throw ArgumentError("orpo: beta must be finite and non-negative");
  OrpoResult r;
  r.sft_part = -mean(chosen.values);
  bool c1 = false, c2 = false;
  r.log_odds_ratio = log_odds_from_logprob(mean(chosen.values), &c1) - log_odds_from_logprob(mean(rejected.values), &c2);
  r.clamped = c1 || c2;
  r.odds_ratio_term = beta == 0.0 ? 0.0 : beta * softplus(-r.log_odds_ratio);
  r.loss = r.sft_part + r.odds_ratio_term;
  return r;
}

PairGradient orpo_loss_grad(const LogProbSequence& chosen, const LogProbSequence& rejected, double beta) {
  const OrpoResult r = orpo_loss(chosen, rejected, beta);
  bool c1 = false, c2 = false;
  const double a = clamp_logprob(mean(chosen.values), c1);
  const double b = clamp_logprob(mean(rejected.values), c2);
  const double dz = beta == 0.0 ? 0.0 : -beta * sigmoid(-r.log_odds_ratio);  // d term / d log_odds_ratio
  const double da = -1.0 + (c1 ? 0.0 : dz * log_odds_slope(a));
  const double db = c2 ? 0.0 : -dz * log_odds_slope(b);
  PairGradient g;
  g.chosen.assign(chosen.values.size(), da / static_cast<double>(chosen.values.size()));
  g.rejected.assign(rejected.values.size(), db / static_cast<double>(rejected.values.size()));
  return g;
}

// --- GRPO ------------------------------------------------------------------------

std::vector<double> grpo_advantages(std::span<const double> rewards, const GrpoConfig& cfg) {
  cfg.validate();
  if (rewards.empty()) throw ArgumentError("grpo_advantages: empty reward group");
  for (double r : rewards)
    if (!std::isfinite(r)) throw ArgumentError("grpo_advantages: non-finite reward");
  const double n = static_cast<double>(rewards.size());
  const double mu = std::accumulate(rewards.begin(), rewards.end(), 0.0) / n;
  double ss = 0.0;
  for (double r : rewards) ss += (r - mu) * (r - mu);
  double sd = 0.0;
  if (cfg.std_mode == StdMode::Population) sd = std::sqrt(ss / n);
  else if (rewards.size() > 1) sd = std::sqrt(ss / (n - 1));
  std::vector<double> out(rewards.size(), 0.0);
  if (sd < cfg.std_floor) return out;
  for (std::size_t i = 0; i < rewards.size(); ++i) out[i] = (rewards[i] - mu) / sd;
  return out;
}

GrpoTokenTerm grpo_token_term(double logp_theta, double logp_old, double logp_ref, double advantage,
                              const GrpoConfig& cfg) {
  const double rho = std::exp(logp_theta - logp_old);
  const double clipped = std::clamp(rho, 1.0 - cfg.clip_epsilon, 1.0 + cfg.clip_epsilon);
  const double delta = logp_ref - logp_theta;
  return {std::min(rho * advantage, clipped * advantage), std::exp(delta) - delta - 1.0};
}

namespace {

void check_groups(std::span<const RolloutGroup> groups, const GrpoConfig& cfg) {
  cfg.validate();
  if (groups.empty()) throw ArgumentError("grpo: no rollout groups");
  for (const auto& group : groups) {
    if (group.empty()) throw ArgumentError("grpo: empty rollout group");
    for (const auto& r : group) {
      check_sequence(r.theta, PolicyTag::Theta, "grpo theta");
      check_sequence(r.old, PolicyTag::Old, "grpo old");
      check_sequence(r.ref, PolicyTag::Ref, "grpo ref");
      check_aligned(r.theta, r.old, "grpo theta/old");
      check_aligned(r.theta, r.ref, "grpo theta/ref");
      if (!std::isfinite(r.advantage)) throw ArgumentError("grpo: non-finite advantage");
    }
  }
}

}  // namespace

GrpoResult grpo_objective(std::span<const RolloutGroup> groups, const GrpoConfig& cfg) {
  check_groups(groups, cfg);
  GrpoResult out;
  for (const auto& group : groups) {
    double s_group = 0.0, k_group = 0.0;
    for (const auto& r : group) {
      double s = 0.0, k = 0.0;
      const std::size_t len = r.theta.values.size();
      for (std::size_t t = 0; t < len; ++t) {
        const auto term = grpo_token_term(r.theta.values[t], r.old.values[t], r.ref.values[t], r.advantage, cfg);
        s += term.surrogate;
        k += term.kl;
      }
      s_group += s / static_cast<double>(len);
      k_group += k / static_cast<double>(len);
    }
    out.surrogate += s_group / static_cast<double>(group.size());
    out.kl += k_group / static_cast<double>(group.size());
  }
  out.surrogate /= static_cast<double>(groups.size());
  out.kl /= static_cast<double>(groups.size());
  out.loss = -(out.surrogate - (cfg.beta == 0.0 ? 0.0 : cfg.beta * out.kl));
  return out;
}

std::vector<std::vector<std::vector<double>>> grpo_loss_grad(std::span<const RolloutGroup> groups,
                                                             const GrpoConfig& cfg) {
  check_groups(groups, cfg);
  std::vector<std::vector<std::vector<double>>> grad;
  const double lo = 1.0 - cfg.clip_epsilon, hi = 1.0 + cfg.clip_epsilon;
  for (const auto& group : groups) {
    auto& g_group = grad.emplace_back();
    for (const auto& r : group) {
      const std::size_t len = r.theta.values.size();
      const double scale = 1.0 / (static_cast<double>(groups.size()) * static_cast<double>(group.size()) *
                                  static_cast<double>(len));
      auto& g = g_group.emplace_back(len, 0.0);
      for (std::size_t t = 0; t < len; ++t) {
        const double rho = std::exp(r.theta.values[t] - r.old.values[t]);
        const double a = r.advantage;
        // The unclipped branch carries the gradient when it is the minimum.
        const bool unclipped = (rho >= lo && rho <= hi) || rho * a < std::clamp(rho, lo, hi) * a;
        const double d_surrogate = unclipped ? rho * a : 0.0;
        const double d_kl = cfg.beta == 0.0 ? 0.0 : 1.0 - std::exp(r.ref.values[t] - r.theta.values[t]);
        g[t] = -scale * (d_surrogate - cfg.beta * d_kl);
      }
    }
  }
  return grad;
}

// --- misc ----------------------------------------------------------------------

std::string_view to_string(Objective objective) noexcept {
  switch (objective) {
    case Objective::Sft: return "sft";
    case Objective::Dpo: return "dpo";
    case Objective::Orpo: return "orpo";
    case Objective::Grpo: return "grpo";
  }
  return "sft";
}

std::optional<Objective> parse_objective(std::string_view text) noexcept {
  for (auto o : {Objective::Sft, Objective::Dpo, Objective::Orpo, Objective::Grpo})
    if (text == to_string(o)) return o;
  return std::nullopt;
}

double relative_error(std::span<const double> analytic, std::span<const double> numeric) {
  if (analytic.size() != numeric.size()) throw ArgumentError("relative_error: size mismatch");
  double diff = 0.0, na = 0.0, nb = 0.0;
  for (std::size_t i = 0; i < analytic.size(); ++i) {
    diff = std::max(diff, std::abs(analytic[i] - numeric[i]));
    na = std::max(na, std::abs(analytic[i]));
    nb = std::max(nb, std::abs(numeric[i]));
  }
  return diff / std::max({na, nb, 1e-8});
}

}  // namespace vdpost
