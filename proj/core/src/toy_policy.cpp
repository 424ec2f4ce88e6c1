// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 vdpost Contributors

#include "vdpost/toy_policy.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "vdpost/error.hpp"

namespace vdpost {

namespace {

double unit(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

}  // namespace

ToyPolicy::ToyPolicy(std::size_t vocab_size, std::vector<double> parameters)
    : vocab_(vocab_size), params_(std::move(parameters)) {
  if (vocab_ < 1) throw ArgumentError("toy policy needs a non-empty vocabulary");
  if (params_.size() != (vocab_ + 1) * vocab_)
    throw ArgumentError("toy policy expects " + std::to_string((vocab_ + 1) * vocab_) + " parameters, got " +
                        std::to_string(params_.size()));
}

ToyPolicy ToyPolicy::random(std::size_t vocab_size, std::mt19937_64& rng, double scale) {
  std::vector<double> p((vocab_size + 1) * vocab_size);
  for (double& v : p) v = scale * (2.0 * unit(rng) - 1.0);
  return {vocab_size, std::move(p)};
}

std::vector<double> ToyPolicy::log_softmax_row(std::size_t row) const {
  const double* logits = params_.data() + row * vocab_;
  const double top = *std::max_element(logits, logits + vocab_);
  double z = 0.0;
  for (std::size_t j = 0; j < vocab_; ++j) z += std::exp(logits[j] - top);
  const double lse = top + std::log(z);
  std::vector<double> out(vocab_);
  for (std::size_t j = 0; j < vocab_; ++j) out[j] = logits[j] - lse;
  return out;
}

std::vector<double> ToyPolicy::token_logprobs(std::span<const int> tokens) const {
  std::vector<double> out;
  out.reserve(tokens.size());
  std::size_t prev = vocab_;
  for (int tok : tokens) {
    if (tok < 0 || static_cast<std::size_t>(tok) >= vocab_) throw ArgumentError("token outside the toy vocabulary");
    out.push_back(log_softmax_row(prev)[static_cast<std::size_t>(tok)]);
    prev = static_cast<std::size_t>(tok);
  }
  return out;
}

void ToyPolicy::accumulate_gradient(std::span<const int> tokens, std::span<const double> weights,
                                    std::span<double> grad) const {
  if (weights.size() != tokens.size()) throw ArgumentError("accumulate_gradient: one weight per token required");
  if (grad.size() != params_.size()) throw ArgumentError("accumulate_gradient: gradient size mismatch");
  std::size_t prev = vocab_;
  for (std::size_t t = 0; t < tokens.size(); ++t) {
    const int tok = tokens[t];
    if (tok < 0 || static_cast<std::size_t>(tok) >= vocab_) throw ArgumentError("token outside the toy vocabulary");
    const auto logp = log_softmax_row(prev);
    double* row = grad.data() + prev * vocab_;
    for (std::size_t j = 0; j < vocab_; ++j) row[j] -= weights[t] * std::exp(logp[j]);
    row[static_cast<std::size_t>(tok)] += weights[t];
    prev = static_cast<std::size_t>(tok);
  }
}

std::vector<int> ToyPolicy::sample(std::size_t length, std::mt19937_64& rng) const {
  std::vector<int> out;
  std::size_t prev = vocab_;
  for (std::size_t t = 0; t < length; ++t) {
    const auto logp = log_softmax_row(prev);
    double u = unit(rng);
    std::size_t pick = vocab_ - 1;
    for (std::size_t j = 0; j < vocab_; ++j) {
      u -= std::exp(logp[j]);
      if (u < 0) {
        pick = j;
        break;
      }
    }
    out.push_back(static_cast<int>(pick));
    prev = pick;
  }
  return out;
}

}  // namespace vdpost
