#pragma once

#include <chrono>
#include <cstddef>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "sentiflow/error.hpp"
#include "sentiflow/prompt.hpp"

namespace sentiflow {

struct EndpointConfig {
  /// Requests go to {base_url}/chat/completions.
  std::string base_url = "http://127.0.0.1:8000/v1";
  std::string model_name = "llama-3-8b-instruct";
  double temperature = 0.0;
  int max_tokens = 16;
  std::chrono::milliseconds timeout{60'000};
  int max_attempts = 3;
  int max_in_flight = 8;
  std::optional<double> requests_per_second;
  /// First retry delay; doubles on each further attempt.
  std::chrono::milliseconds backoff_initial{1'000};
  /// Instructions in a system message and the post in a user message. When
  /// false, both go in a single user message.
  bool split_roles = true;
  /// Environment variable holding an optional bearer token.
  std::string api_key_env = "SENTIFLOW_API_KEY";

  /// Throws ConfigError when an invariant is violated.
  void validate() const;
};

struct CompletionResult {
  std::string text;
  std::chrono::milliseconds latency{0};
  int attempts = 0;
  std::string endpoint_model;
};

enum class FailureKind { Transport, Protocol, Auth };

std::string_view to_string(FailureKind kind);

class InferenceError : public Error {
 public:
  InferenceError(FailureKind kind, const std::string& message, int attempts)
      : Error(message), kind_(kind), attempts_(attempts) {}
  FailureKind kind() const { return kind_; }
  int attempts() const { return attempts_; }

 private:
  FailureKind kind_;
  int attempts_;
};

class TransportError : public InferenceError {
 public:
  TransportError(const std::string& message, int attempts)
      : InferenceError(FailureKind::Transport, message, attempts) {}
};

class ProtocolError : public InferenceError {
 public:
  ProtocolError(const std::string& message, int attempts)
      : InferenceError(FailureKind::Protocol, message, attempts) {}
};

class AuthError : public InferenceError {
 public:
  AuthError(const std::string& message, int attempts)
      : InferenceError(FailureKind::Auth, message, attempts) {}
};

struct InferenceFailure {
  FailureKind kind = FailureKind::Transport;
  std::string message;
  int attempts = 0;
};

struct BatchItem {
  std::size_t index = 0;
  std::variant<CompletionResult, InferenceFailure> outcome;

  bool ok() const { return std::holds_alternative<CompletionResult>(outcome); }
};

struct HttpReply {
  /// 0 when no HTTP response was received (connect failure, timeout, reset).
  int status = 0;
  std::string body;
  std::string error;
};

/// POST transport. Implementations must be callable from several threads.
class HttpTransport {
 public:
  virtual ~HttpTransport() = default;
  virtual HttpReply post(const std::string& path, const std::string& body,
                         const std::map<std::string, std::string>& headers,
                         std::chrono::milliseconds timeout) = 0;
};

/// cpp-httplib transport for http:// and https:// base URLs. Throws ConfigError
/// for an unsupported URL.
std::shared_ptr<HttpTransport> make_http_transport(const std::string& base_url);

/// Spaces request starts at 1/rate seconds. Safe to share across threads.
class RateLimiter {
 public:
  explicit RateLimiter(double requests_per_second);
  void acquire();

 private:
  std::mutex mutex_;
  std::chrono::steady_clock::duration interval_;
  std::chrono::steady_clock::time_point next_;
};

nlohmann::json encode_chat_request(const PromptBundle& bundle, const EndpointConfig& cfg);

/// Reply text at choices[0].message.content. Throws ProtocolError.
std::string decode_chat_response(const std::string& body);

class InferenceClient {
 public:
  explicit InferenceClient(EndpointConfig cfg);
  InferenceClient(EndpointConfig cfg, std::shared_ptr<HttpTransport> transport);

  /// Blocking single request with retry on timeouts, connection failures,
  /// HTTP 408/429/5xx. Throws TransportError, ProtocolError or AuthError.
  CompletionResult complete(const PromptBundle& bundle) const;

  /// Runs all bundles with at most max_in_flight outstanding requests. Output
  /// is ordered by index; failures are reported per item.
  std::vector<BatchItem> complete_many(std::span<const PromptBundle> bundles) const;

  const EndpointConfig& config() const { return cfg_; }

 private:
  EndpointConfig cfg_;
  std::shared_ptr<HttpTransport> transport_;
  std::string path_;
  std::shared_ptr<RateLimiter> limiter_;
};

}  // namespace sentiflow
