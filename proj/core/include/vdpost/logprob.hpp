// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 vdpost Contributors

#pragma once

#include <optional>
#include <string_view>
#include <vector>

namespace vdpost {

/// Which policy produced a set of token log-probabilities.
enum class PolicyTag { Theta, Ref, Old };

std::string_view to_string(PolicyTag tag) noexcept;
std::optional<PolicyTag> parse_policy_tag(std::string_view text) noexcept;

/// Per-token log pi(o_t | q, o_<t). Values are finite and non-positive.
struct LogProbSequence {
  std::vector<double> values;
  PolicyTag tag = PolicyTag::Theta;

  bool operator==(const LogProbSequence&) const = default;
};

}  // namespace vdpost
