#pragma once

#include <atomic>
#include <chrono>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

namespace sentiflow::mock {

struct MockRequest {
  std::string model;
  std::string system;
  /// Content of the last user message.
  std::string user;
  /// 0-based arrival order.
  std::size_t sequence = 0;
};

struct MockReply {
  int status = 200;
  /// Reply text placed at choices[0].message.content.
  std::string content;
  /// When non-empty, sent verbatim instead of a generated body.
  std::string raw_body;
};

using Responder = std::function<MockReply(const MockRequest&)>;

/// Local chat-completion server on 127.0.0.1 with request instrumentation.
class MockEndpoint {
 public:
  explicit MockEndpoint(Responder responder,
                        std::chrono::milliseconds latency = std::chrono::milliseconds(0),
                        int port = 0);
  ~MockEndpoint();

  MockEndpoint(const MockEndpoint&) = delete;
  MockEndpoint& operator=(const MockEndpoint&) = delete;

  int port() const { return port_; }
  /// "http://127.0.0.1:<port>/v1"
  std::string base_url() const;

  std::size_t requests() const { return requests_.load(); }
  std::size_t peak_in_flight() const { return peak_.load(); }
  std::vector<MockRequest> received() const;

  /// Block until stop() is called from another thread or a signal handler.
  void wait();
  void stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
  Responder responder_;
  std::chrono::milliseconds latency_;
  int port_ = 0;
  std::atomic<std::size_t> requests_{0};
  std::atomic<std::size_t> in_flight_{0};
  std::atomic<std::size_t> peak_{0};
  mutable std::mutex log_mutex_;
  std::vector<MockRequest> log_;
  std::thread thread_;
};

/// Replies with the scripted text for a known post, else `fallback`.
/// The post is the user message, or the text after the final "Classify:"
/// cue in single-message mode.
Responder scripted_responder(std::map<std::string, std::string> script, std::string fallback);

/// Loads {"post": ..., "reply": ...} lines.
std::map<std::string, std::string> load_script(const std::filesystem::path& path);

/// Extracts the post under classification from a request.
std::string query_of(const MockRequest& request);

}  // namespace sentiflow::mock
