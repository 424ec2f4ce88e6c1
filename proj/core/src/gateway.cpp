// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 vdpost Contributors

#include "vdpost/gateway.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <semaphore>
#include <set>
#include <thread>

#include <httplib.h>

#include "vdpost/error.hpp"

namespace vdpost {

using nlohmann::json;

namespace {

constexpr int kMaxInFlightLimit = 1024;

struct Target {
  std::string origin;  // scheme://host[:port]
  std::string prefix;  // path prefix without trailing '/'
};

std::optional<Target> split_base_url(const std::string& url) {
  const std::size_t scheme_end = url.find("://");
  if (scheme_end == std::string::npos) return std::nullopt;
  const std::string scheme = url.substr(0, scheme_end);
  if (scheme != "http" && scheme != "https") return std::nullopt;
  const std::size_t host_start = scheme_end + 3;
  const std::size_t path_start = url.find('/', host_start);
  Target t;
  t.origin = url.substr(0, path_start);
  if (t.origin.size() == host_start) return std::nullopt;
  if (path_start != std::string::npos) t.prefix = url.substr(path_start);
  while (!t.prefix.empty() && t.prefix.back() == '/') t.prefix.pop_back();
  return t;
}

bool retriable_status(int status) { return status == 408 || status == 429 || status >= 500; }

}  // namespace

std::string_view to_string(ReasoningEffort effort) noexcept {
  switch (effort) {
    case ReasoningEffort::Low: return "low";
    case ReasoningEffort::Medium: return "medium";
    case ReasoningEffort::High: return "high";
  }
  return "medium";
}

std::optional<ReasoningEffort> parse_reasoning_effort(std::string_view text) noexcept {
  if (text == "low") return ReasoningEffort::Low;
  if (text == "medium") return ReasoningEffort::Medium;
  if (text == "high") return ReasoningEffort::High;
  return std::nullopt;
}

void EndpointConfig::validate() const {
  if (!split_base_url(base_url)) throw ConfigError("endpoint base_url \"" + base_url + "\" is not an http(s) URL");
  if (model_name.empty()) throw ConfigError("endpoint model name is empty");
  if (max_in_flight < 1 || max_in_flight > kMaxInFlightLimit)
    throw ConfigError("max_in_flight must lie in [1, " + std::to_string(kMaxInFlightLimit) + "]");
  if (retry_limit < 0 || retry_limit > 10) throw ConfigError("retry_limit must lie in [0, 10]");
  if (!(timeout_seconds > 0)) throw ConfigError("timeout_seconds must be positive");
  if (!(temperature >= 0)) throw ConfigError("temperature must be non-negative");
  if (!(backoff_initial_seconds >= 0) || !(backoff_max_seconds >= 0))
    throw ConfigError("backoff durations must be non-negative");
}

json to_json(const EndpointConfig& c) {
  json j = {{"base_url", c.base_url},
            {"model", c.model_name},
            {"api_key_env", c.api_key_env},
            {"max_in_flight", c.max_in_flight},
            {"timeout_seconds", c.timeout_seconds},
            {"retry_limit", c.retry_limit},
            {"temperature", c.temperature},
            {"backoff_initial_seconds", c.backoff_initial_seconds},
            {"backoff_max_seconds", c.backoff_max_seconds}};
  if (c.reasoning_effort) j["reasoning_effort"] = to_string(*c.reasoning_effort);
  return j;
}

EndpointConfig endpoint_from_json(const json& j) {
  if (!j.is_object()) throw ConfigError("endpoint config must be an object");
  static const std::set<std::string> kKnown{"base_url",      "model",        "api_key_env",
                                            "max_in_flight", "timeout_seconds", "retry_limit",
                                            "temperature",   "reasoning_effort", "backoff_initial_seconds",
                                            "backoff_max_seconds"};
  for (const auto& [key, _] : j.items()) {
    if (key == "api_key" || key == "key" || key == "token")
      throw ConfigError("endpoint config must not contain secrets; name an environment variable in api_key_env");
    if (!kKnown.contains(key)) throw ConfigError("unknown endpoint config key \"" + key + "\"");
  }
  EndpointConfig c;
  try {
    c.base_url = j.at("base_url").get<std::string>();
    c.model_name = j.at("model").get<std::string>();
    c.api_key_env = j.value("api_key_env", c.api_key_env);
    c.max_in_flight = j.value("max_in_flight", c.max_in_flight);
    c.timeout_seconds = j.value("timeout_seconds", c.timeout_seconds);
    c.retry_limit = j.value("retry_limit", c.retry_limit);
    c.temperature = j.value("temperature", c.temperature);
    c.backoff_initial_seconds = j.value("backoff_initial_seconds", c.backoff_initial_seconds);
    c.backoff_max_seconds = j.value("backoff_max_seconds", c.backoff_max_seconds);
    if (j.contains("reasoning_effort") && !j["reasoning_effort"].is_null()) {
      const auto text = j["reasoning_effort"].get<std::string>();
      c.reasoning_effort = parse_reasoning_effort(text);
      if (!c.reasoning_effort) throw ConfigError("reasoning_effort must be low, medium or high, got \"" + text + "\"");
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("endpoint config: ") + e.what());
  }
  c.validate();
  return c;
}

// --- Gateway -----------------------------------------------------------------

struct Gateway::State {
  explicit State(EndpointConfig cfg) : config(std::move(cfg)), slots(config.max_in_flight) {}

  EndpointConfig config;
  Target target;
  std::optional<std::string> api_key;
  mutable std::counting_semaphore<kMaxInFlightLimit> slots;
};

Gateway::Gateway(EndpointConfig config) {
  config.validate();
  state_ = std::make_unique<State>(std::move(config));
  state_->target = *split_base_url(state_->config.base_url);
  const std::string& env = state_->config.api_key_env;
  if (!env.empty()) {
    const char* value = std::getenv(env.c_str());
    if (value == nullptr || *value == '\0')
      throw AuthError("API key environment variable " + env + " is not set (endpoint " + state_->config.base_url + ")");
    state_->api_key = value;
  }
}

Gateway::~Gateway() = default;
Gateway::Gateway(Gateway&&) noexcept = default;
Gateway& Gateway::operator=(Gateway&&) noexcept = default;

const EndpointConfig& Gateway::config() const noexcept { return state_->config; }

namespace {

std::vector<std::string> parse_envelope(const std::string& body, int n) {
  json j = json::parse(body, nullptr, false);
  if (j.is_discarded() || !j.is_object()) throw MalformedResponseError("response body is not a JSON object");
  auto choices = j.find("choices");
  if (choices == j.end() || !choices->is_array()) throw MalformedResponseError("response lacks a \"choices\" array");
  if (choices->size() != static_cast<std::size_t>(n))
    throw MalformedResponseError("asked for " + std::to_string(n) + " choices, got " +
                                 std::to_string(choices->size()));

  std::vector<std::pair<std::int64_t, std::string>> indexed;
  for (std::size_t i = 0; i < choices->size(); ++i) {
    const json& choice = (*choices)[i];
    if (!choice.is_object() || !choice.contains("message") || !choice["message"].is_object())
      throw MalformedResponseError("choice " + std::to_string(i) + " has no message object");
    const json& msg = choice["message"];
    std::string content;
    if (auto c = msg.find("content"); c != msg.end() && !c->is_null()) {
      if (!c->is_string()) throw MalformedResponseError("choice " + std::to_string(i) + " content is not a string");
      content = c->get<std::string>();
    }
    if (auto r = msg.find("reasoning_content"); r != msg.end() && r->is_string() && !r->get<std::string>().empty())
      content = "<think>" + r->get<std::string>() + "</think>" + content;
    std::int64_t index = static_cast<std::int64_t>(i);
    if (auto ix = choice.find("index"); ix != choice.end()) {
      if (!ix->is_number_integer()) throw MalformedResponseError("choice index is not an integer");
      index = ix->get<std::int64_t>();
    }
    indexed.emplace_back(index, std::move(content));
  }
  std::stable_sort(indexed.begin(), indexed.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  std::vector<std::string> out;
  out.reserve(indexed.size());
  for (auto& [_, text] : indexed) out.push_back(std::move(text));
  return out;
}

}  // namespace

std::vector<std::string> Gateway::chat(std::span<const ChatMessage> messages, int n) const {
  if (n < 1) throw ArgumentError("chat: n must be at least 1");
  if (messages.empty()) throw ArgumentError("chat: no messages");
  const EndpointConfig& cfg = state_->config;

  json body = {{"model", cfg.model_name}, {"temperature", cfg.temperature}, {"n", n}};
  body["messages"] = json::array();
  for (const auto& m : messages) body["messages"].push_back({{"role", m.role}, {"content", m.content}});
  if (cfg.reasoning_effort) body["reasoning_effort"] = to_string(*cfg.reasoning_effort);
  const std::string payload = body.dump(-1, ' ', false, json::error_handler_t::replace);
  const std::string path = state_->target.prefix + "/v1/chat/completions";

  httplib::Headers headers;
  if (state_->api_key) headers.emplace("Authorization", "Bearer " + *state_->api_key);

  const auto seconds = static_cast<time_t>(cfg.timeout_seconds);
  const auto micros = static_cast<time_t>((cfg.timeout_seconds - static_cast<double>(seconds)) * 1e6);

  std::string last_error;
  int last_status = 0;
  std::string last_body;
  for (int attempt = 0; attempt <= cfg.retry_limit; ++attempt) {
    if (attempt > 0) {
      const double delay =
          std::min(cfg.backoff_initial_seconds * std::pow(2.0, attempt - 1), cfg.backoff_max_seconds);
      std::this_thread::sleep_for(std::chrono::duration<double>(delay));
    }
    httplib::Result res;
    {
      state_->slots.acquire();
      struct Release {
        std::counting_semaphore<kMaxInFlightLimit>& s;
        ~Release() { s.release(); }
      } release{state_->slots};
      httplib::Client client(state_->target.origin);
      client.set_connection_timeout(seconds, micros);
      client.set_read_timeout(seconds, micros);
      client.set_write_timeout(seconds, micros);
      res = client.Post(path, headers, payload, "application/json");
    }
    if (!res) {
      last_error = "request to " + cfg.base_url + " failed: " + httplib::to_string(res.error());
      last_status = 0;
      last_body.clear();
      continue;
    }
    const int status = res->status;
    if (status == 401 || status == 403)
      throw AuthError("endpoint " + cfg.base_url + " rejected the credentials (HTTP " + std::to_string(status) +
                      "): " + res->body);
    if (status >= 200 && status < 300) return parse_envelope(res->body, n);
    last_status = status;
    last_body = res->body;
    last_error = "endpoint " + cfg.base_url + " returned HTTP " + std::to_string(status) + ": " + res->body;
    if (!retriable_status(status)) throw TransportError(last_error, last_status, last_body);
  }
  throw TransportError(last_error + " (after " + std::to_string(cfg.retry_limit) + " retries)", last_status,
                       last_body);
}

}  // namespace vdpost
