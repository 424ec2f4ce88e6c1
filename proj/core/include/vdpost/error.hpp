// SPDX-License-Identifier: Apache-2.0
// Copyright 2026 vdpost Contributors

#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>

namespace vdpost {

/// Root of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Bad caller input or configuration (maps to CLI exit code 1).
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Precondition violated by a function argument (n = 0, k > G, ...).
class ArgumentError : public ConfigError {
 public:
  using ConfigError::ConfigError;
};

/// Malformed or inconsistent input data (maps to CLI exit code 2).
class DataError : public Error {
 public:
  using Error::Error;
};

/// Corpus file problems. `line()` is 1-based, 0 when not tied to a line.
class CorpusError : public DataError {
 public:
  CorpusError(std::size_t line, const std::string& what)
      : DataError(line == 0 ? what : "line " + std::to_string(line) + ": " + what), line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

class TaxonomyError : public DataError {
 public:
  enum class Kind { UnknownFormat, Malformed, SelfEdge, DanglingEdge, Cycle };

  TaxonomyError(Kind kind, const std::string& what) : DataError(what), kind_(kind) {}

  Kind kind() const noexcept { return kind_; }

 private:
  Kind kind_;
};

/// Any failure talking to an LLM endpoint (maps to CLI exit code 3).
class EndpointError : public Error {
 public:
  using Error::Error;
};

/// Connection failures, timeouts and non-2xx statuses once retries are spent.
class TransportError : public EndpointError {
 public:
  TransportError(const std::string& what, int status = 0, std::string body = {})
      : EndpointError(what), status_(status), body_(std::move(body)) {}

  /// HTTP status of the last attempt, 0 when no response was received.
  int status() const noexcept { return status_; }
  const std::string& body() const noexcept { return body_; }

 private:
  int status_;
  std::string body_;
};

/// 401/403 from the endpoint, or an API key that cannot be resolved.
class AuthError : public EndpointError {
 public:
  using EndpointError::EndpointError;
};

/// Response body is not a chat-completions envelope.
class MalformedResponseError : public EndpointError {
 public:
  using EndpointError::EndpointError;
};

/// A judge or rubric generator replied with something outside its JSON schema.
class JudgeProtocolError : public EndpointError {
 public:
  enum class Kind {
    NotJson,         // no single JSON object could be isolated
    SchemaViolation, // required key missing or of the wrong type
    BadOption,       // option string outside the allowed enum
    BadPhase,        // checklist phase does not match the sample role
    BadDimensionSet, // wrong or duplicated dimension names
    BadCardinality,  // checklist does not hold exactly three items
  };

  JudgeProtocolError(Kind kind, const std::string& what, std::string raw_reply = {})
      : EndpointError(what), kind_(kind), raw_reply_(std::move(raw_reply)) {}

  Kind kind() const noexcept { return kind_; }
  const std::string& raw_reply() const noexcept { return raw_reply_; }
  void set_raw_reply(std::string reply) { raw_reply_ = std::move(reply); }

 private:
  Kind kind_;
  std::string raw_reply_;
};

const char* to_string(JudgeProtocolError::Kind kind) noexcept;

}  // namespace vdpost
