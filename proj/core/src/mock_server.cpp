// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 vdpost Contributors

#include "vdpost/mock_server.hpp"

#include <atomic>
#include <fstream>
#include <mutex>
#include <thread>
#include <unordered_map>

#include <httplib.h>
#include <sys/socket.h>

#include "vdpost/digest.hpp"
#include "vdpost/error.hpp"
#include "vdpost/jsonl.hpp"

namespace vdpost {

using nlohmann::json;

Fixture fixture_from_json(const json& j) {
  if (!j.is_object()) throw DataError("fixture must be a JSON object");
  Fixture f;
  try {
    if (auto d = j.find("digest"); d != j.end()) {
      f.digest = d->get<std::string>();
    } else if (auto r = j.find("request"); r != j.end()) {
      std::vector<ChatMessage> messages;
      for (const auto& m : r->at("messages"))
        messages.push_back({m.at("role").get<std::string>(), m.at("content").get<std::string>()});
      f.digest = request_digest(r->at("model").get<std::string>(), messages);
    } else {
      throw DataError("fixture needs \"digest\" or \"request\"");
    }
    f.replies = j.at("replies").get<std::vector<std::string>>();
    f.fail_first = j.value("fail_first", std::vector<int>{});
    f.delay_ms = j.value("delay_ms", 0);
  } catch (const json::exception& e) {
    throw DataError(std::string("malformed fixture: ") + e.what());
  }
  if (f.replies.empty()) throw DataError("fixture " + f.digest + " has no replies");
  if (f.delay_ms < 0) throw DataError("fixture " + f.digest + " has a negative delay");
  for (int s : f.fail_first)
    if (s < 400 || s > 599) throw DataError("fixture " + f.digest + ": fail_first statuses must be 4xx or 5xx");
  return f;
}

json to_json(const Fixture& f) {
  json j = {{"digest", f.digest}, {"replies", f.replies}};
  if (!f.fail_first.empty()) j["fail_first"] = f.fail_first;
  if (f.delay_ms != 0) j["delay_ms"] = f.delay_ms;
  return j;
}

Fixture make_fixture(std::string_view model, std::span<const ChatMessage> messages, std::vector<std::string> replies) {
  Fixture f;
  f.digest = request_digest(model, messages);
  f.replies = std::move(replies);
  return f;
}

std::vector<Fixture> load_fixtures(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open fixture file '" + path.string() + "'");
  std::vector<Fixture> out;
  std::unordered_map<std::string, std::size_t> seen;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (is_blank(line)) continue;
    try {
      json j = json::parse(line);
      if (is_manifest(j)) continue;
      out.push_back(fixture_from_json(j));
    } catch (const json::parse_error& e) {
      throw DataError(path.string() + ": line " + std::to_string(line_no) + ": " + e.what());
    } catch (const DataError& e) {
      throw DataError(path.string() + ": line " + std::to_string(line_no) + ": " + e.what());
    }
    if (!seen.emplace(out.back().digest, line_no).second)
      throw DataError(path.string() + ": line " + std::to_string(line_no) + ": duplicate digest " + out.back().digest);
  }
  return out;
}

void save_fixtures(const std::filesystem::path& path, std::span<const Fixture> fixtures) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot write fixture file '" + path.string() + "'");
  for (const auto& f : fixtures) out << to_json(f).dump() << '\n';
}

json to_json(const ProbeSnapshot& p) {
  return {{"requests", p.requests},
          {"in_flight", p.in_flight},
          {"peak_in_flight", p.peak_in_flight},
          {"peak_by_model", p.peak_by_model}};
}

// --- server --------------------------------------------------------------------------

struct MockLlmServer::State {
  std::vector<Fixture> fixtures;
  std::unordered_map<std::string, std::size_t> by_digest;
  MockServerOptions options;
  httplib::Server server;
  std::thread worker;
  int port = 0;
  std::string host;

  mutable std::mutex mutex;  // guards everything below
  std::unordered_map<std::string, std::size_t> failures_served;
  std::size_t requests = 0;
  std::size_t in_flight = 0;
  std::size_t peak = 0;
  std::map<std::string, std::size_t> model_in_flight;
  std::map<std::string, std::size_t> model_peak;

  void handle_chat(const httplib::Request& req, httplib::Response& res);
};

namespace {

void send_error(httplib::Response& res, int status, const std::string& message) {
  res.status = status;
  res.set_content(json{{"error", {{"message", message}, {"code", status}}}}.dump(), "application/json");
}

}  // namespace

void MockLlmServer::State::handle_chat(const httplib::Request& req, httplib::Response& res) {
  json body = json::parse(req.body, nullptr, false);
  if (body.is_discarded() || !body.is_object() || !body.contains("model") || !body["model"].is_string() ||
      !body.contains("messages") || !body["messages"].is_array())
    return send_error(res, 400, "request must carry \"model\" and \"messages\"");
  const std::string model = body["model"].get<std::string>();
  std::vector<ChatMessage> messages;
  for (const auto& m : body["messages"]) {
    if (!m.is_object() || !m.contains("role") || !m.contains("content") || !m["role"].is_string() ||
        !m["content"].is_string())
      return send_error(res, 400, "malformed message");
    messages.push_back({m["role"].get<std::string>(), m["content"].get<std::string>()});
  }
  const int n = body.value("n", 1);
  if (n < 1 || n > 128) return send_error(res, 400, "n must lie in [1, 128]");

  {
    std::lock_guard lock(mutex);
    ++requests;
    peak = std::max(peak, ++in_flight);
    auto& m = model_in_flight[model];
    model_peak[model] = std::max(model_peak[model], ++m);
  }
  struct Leave {
    State& s;
    const std::string& model;
    ~Leave() {
      std::lock_guard lock(s.mutex);
      --s.in_flight;
      --s.model_in_flight[model];
    }
  } leave{*this, model};

  const std::string digest = request_digest(model, messages);
  auto it = by_digest.find(digest);
  std::vector<std::string> replies;
  if (it == by_digest.end()) {
    if (options.unknown == UnknownDigest::NotFound)
      return send_error(res, 404, "no fixture for request digest " + digest);
    replies.push_back(messages.back().content);
  } else {
    const Fixture& f = fixtures[it->second];
    if (f.delay_ms > 0) std::this_thread::sleep_for(std::chrono::milliseconds(f.delay_ms));
    int fail_status = 0;
    {
      std::lock_guard lock(mutex);
      auto& served = failures_served[digest];
      if (served < f.fail_first.size()) fail_status = f.fail_first[served++];
    }
    if (fail_status != 0) return send_error(res, fail_status, "injected failure");
    replies = f.replies;
  }

  json choices = json::array();
  for (int i = 0; i < n; ++i)
    choices.push_back({{"index", i},
                       {"message", {{"role", "assistant"}, {"content", replies[static_cast<std::size_t>(i) % replies.size()]}}},
                       {"finish_reason", "stop"}});
  json out = {{"id", "mock-" + digest.substr(0, 16)},
              {"object", "chat.completion"},
              {"model", model},
              {"choices", std::move(choices)}};
  res.status = 200;
  res.set_content(out.dump(-1, ' ', false, json::error_handler_t::replace), "application/json");
}

MockLlmServer::MockLlmServer(std::vector<Fixture> fixtures, MockServerOptions options)
    : state_(std::make_unique<State>()) {
  if (options.threads < 1) throw ConfigError("mock server needs at least one worker thread");
  state_->fixtures = std::move(fixtures);
  state_->options = options;
  for (std::size_t i = 0; i < state_->fixtures.size(); ++i)
    if (!state_->by_digest.emplace(state_->fixtures[i].digest, i).second)
      throw DataError("duplicate fixture digest " + state_->fixtures[i].digest);

  auto& server = state_->server;
  const int threads = options.threads;
  server.new_task_queue = [threads] { return new httplib::ThreadPool(static_cast<std::size_t>(threads)); };
  // Plain SO_REUSEADDR: SO_REUSEPORT would let a second server share the port.
  server.set_socket_options([](socket_t sock) {
    int yes = 1;
    setsockopt(sock, SOL_SOCKET, SO_REUSEADDR, &yes, sizeof(yes));
  });
  State* s = state_.get();
  server.Post("/v1/chat/completions",
              [s](const httplib::Request& req, httplib::Response& res) { s->handle_chat(req, res); });
  server.Get("/probe", [this](const httplib::Request&, httplib::Response& res) {
    res.set_content(to_json(probe()).dump(), "application/json");
  });
  server.Post("/probe/reset", [this](const httplib::Request&, httplib::Response& res) {
    reset_probe();
    res.set_content("{}", "application/json");
  });
}

MockLlmServer::~MockLlmServer() { stop(); }

int MockLlmServer::start(const std::string& host, int port) {
  if (state_->worker.joinable()) throw ConfigError("mock server already started");
  auto& server = state_->server;
  int bound = port;
  if (port == 0) {
    bound = server.bind_to_any_port(host);
    if (bound < 0) throw ConfigError("mock server cannot bind to " + host);
  } else if (!server.bind_to_port(host, port)) {
    throw ConfigError("mock server cannot bind " + host + ":" + std::to_string(port) + " (port in use?)");
  }
  state_->port = bound;
  state_->host = host;
  state_->worker = std::thread([&server] { server.listen_after_bind(); });
  server.wait_until_ready();
  return bound;
}

void MockLlmServer::wait() {
  if (state_->worker.joinable()) state_->worker.join();
}

void MockLlmServer::stop() {
  if (!state_) return;
  state_->server.stop();
  if (state_->worker.joinable()) state_->worker.join();
}

int MockLlmServer::port() const noexcept { return state_->port; }

std::string MockLlmServer::base_url() const { return "http://" + state_->host + ":" + std::to_string(state_->port); }

ProbeSnapshot MockLlmServer::probe() const {
  std::lock_guard lock(state_->mutex);
  ProbeSnapshot p;
  p.requests = state_->requests;
  p.in_flight = state_->in_flight;
  p.peak_in_flight = state_->peak;
  p.peak_by_model = state_->model_peak;
  return p;
}

void MockLlmServer::reset_probe() {
  std::lock_guard lock(state_->mutex);
  state_->requests = 0;
  state_->peak = state_->in_flight;
  state_->model_peak.clear();
  for (const auto& [model, n] : state_->model_in_flight)
    if (n > 0) state_->model_peak[model] = n;
  state_->failures_served.clear();
}

}  // namespace vdpost
