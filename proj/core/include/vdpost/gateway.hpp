// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 vdpost Contributors

// Chat-completions client with bounded per-endpoint parallelism and
// exponential-backoff retries.

#pragma once

#include <chrono>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

namespace vdpost {

struct ChatMessage {
  std::string role;
  std::string content;

  bool operator==(const ChatMessage&) const = default;
};

enum class ReasoningEffort { Low, Medium, High };

std::string_view to_string(ReasoningEffort effort) noexcept;
std::optional<ReasoningEffort> parse_reasoning_effort(std::string_view text) noexcept;

struct EndpointConfig {
  std::string base_url;      // scheme://host[:port][/prefix]
  std::string model_name;
  std::string api_key_env;   // empty: send no Authorization header
  int max_in_flight = 4;
  double timeout_seconds = 120.0;
  int retry_limit = 3;
  double temperature = 0.0;
  std::optional<ReasoningEffort> reasoning_effort;
  double backoff_initial_seconds = 0.5;
  double backoff_max_seconds = 8.0;

  /// Throws ConfigError on max_in_flight < 1, retry_limit outside [0, 10],
  /// non-positive timeout or an unusable base_url.
  void validate() const;
};

nlohmann::json to_json(const EndpointConfig& config);
/// Missing keys keep their defaults; base_url and model are required.
EndpointConfig endpoint_from_json(const nlohmann::json& j);

/// Thread-safe client for one endpoint. At most `max_in_flight` HTTP requests
/// issued through the same Gateway are outstanding at any instant.
class Gateway {
 public:
  /// Validates the config and resolves the API key. Throws AuthError naming
  /// the environment variable when it is unset.
  explicit Gateway(EndpointConfig config);
  ~Gateway();
  Gateway(Gateway&&) noexcept;
  Gateway& operator=(Gateway&&) noexcept;
  Gateway(const Gateway&) = delete;
  Gateway& operator=(const Gateway&) = delete;

  const EndpointConfig& config() const noexcept;

  /// One chat-completions request asking for `n` choices; returns the n
  /// transcripts ordered by choice index. Reasoning returned in a separate
  /// `reasoning_content` field is folded back in as <think>...</think>.
  std::vector<std::string> chat(std::span<const ChatMessage> messages, int n) const;

 private:
  struct State;
  std::unique_ptr<State> state_;
};

}  // namespace vdpost
