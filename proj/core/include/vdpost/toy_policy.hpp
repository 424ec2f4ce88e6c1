// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 vdpost Contributors

#pragma once

#include <cstddef>
#include <random>
#include <span>
#include <utility>
#include <vector>

namespace vdpost {

/// Bigram softmax policy used to check objective gradients. Row r of the
/// (vocab + 1) x vocab logit table scores the next token after token r; the
/// final row is the begin-of-sequence state.
class ToyPolicy {
 public:
  ToyPolicy(std::size_t vocab_size, std::vector<double> parameters);

  static ToyPolicy random(std::size_t vocab_size, std::mt19937_64& rng, double scale = 1.0);

  std::size_t vocab_size() const noexcept { return vocab_; }
  std::span<const double> parameters() const noexcept { return params_; }
  std::size_t parameter_count() const noexcept { return params_.size(); }

  ToyPolicy with_parameters(std::vector<double> parameters) const { return {vocab_, std::move(parameters)}; }

  /// log pi(tokens[t] | tokens[<t]) for every position.
  std::vector<double> token_logprobs(std::span<const int> tokens) const;

  /// grad += sum_t weights[t] * d log pi(tokens[t] | .) / d parameters.
  void accumulate_gradient(std::span<const int> tokens, std::span<const double> weights, std::span<double> grad) const;

  /// Samples a sequence of `length` tokens.
  std::vector<int> sample(std::size_t length, std::mt19937_64& rng) const;

 private:
  std::vector<double> log_softmax_row(std::size_t row) const;

  std::size_t vocab_;
  std::vector<double> params_;
};

}  // namespace vdpost
