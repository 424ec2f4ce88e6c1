// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 vdpost Contributors

// Offline chat-completions server serving canned replies keyed by request
// digest, with a probe that records peak concurrent requests.

#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "vdpost/gateway.hpp"

namespace vdpost {

struct Fixture {
  std::string digest;                // request_digest(model, messages)
  std::vector<std::string> replies;  // choice i gets replies[i % size]
  std::vector<int> fail_first;       // statuses returned before the first success
  int delay_ms = 0;

  bool operator==(const Fixture&) const = default;
};

/// Accepts {"digest": ...} or {"request": {"model", "messages"}} plus
/// "replies" and the optional "fail_first" / "delay_ms". Throws DataError.
Fixture fixture_from_json(const nlohmann::json& j);
nlohmann::json to_json(const Fixture& fixture);

Fixture make_fixture(std::string_view model, std::span<const ChatMessage> messages, std::vector<std::string> replies);

/// Throws DataError naming the line on malformed records or duplicate digests.
std::vector<Fixture> load_fixtures(const std::filesystem::path& path);
void save_fixtures(const std::filesystem::path& path, std::span<const Fixture> fixtures);

enum class UnknownDigest { NotFound, Echo };

struct MockServerOptions {
  UnknownDigest unknown = UnknownDigest::NotFound;
  int threads = 32;
};

struct ProbeSnapshot {
  std::size_t requests = 0;
  std::size_t in_flight = 0;
  std::size_t peak_in_flight = 0;
  std::map<std::string, std::size_t> peak_by_model;
};

nlohmann::json to_json(const ProbeSnapshot& probe);

/// Endpoints: POST /v1/chat/completions, GET /probe, POST /probe/reset.
class MockLlmServer {
 public:
  explicit MockLlmServer(std::vector<Fixture> fixtures, MockServerOptions options = {});
  ~MockLlmServer();
  MockLlmServer(const MockLlmServer&) = delete;
  MockLlmServer& operator=(const MockLlmServer&) = delete;

  /// Binds and serves on a background thread; port 0 picks a free port.
  /// Returns the bound port. Throws ConfigError when the port is taken.
  int start(const std::string& host = "127.0.0.1", int port = 0);
  /// Blocks until stop() is called from another thread or a signal handler.
  void wait();
  void stop();

  int port() const noexcept;
  std::string base_url() const;

  ProbeSnapshot probe() const;
  void reset_probe();

 private:
  struct State;
  std::unique_ptr<State> state_;
};

}  // namespace vdpost
