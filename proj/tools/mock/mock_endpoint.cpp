#include "mock_endpoint.hpp"

#include <fstream>
#include <stdexcept>

#include <httplib.h>
#include <nlohmann/json.hpp>

namespace sentiflow::mock {

using json = nlohmann::json;

struct MockEndpoint::Impl {
  httplib::Server server;
};

MockEndpoint::MockEndpoint(Responder responder, std::chrono::milliseconds latency, int port)
    : impl_(std::make_unique<Impl>()), responder_(std::move(responder)), latency_(latency) {
  auto& svr = impl_->server;
  // A wide pool so that client-side concurrency limits, not the server, bound
  // the observed in-flight count.
  svr.new_task_queue = [] { return new httplib::ThreadPool(64); };
  svr.set_tcp_nodelay(true);
  svr.Post(R"(/.*/chat/completions|/chat/completions)", [this](const httplib::Request& req,
                                                               httplib::Response& res) {
    const auto now = ++in_flight_;
    auto peak = peak_.load();
    while (now > peak && !peak_.compare_exchange_weak(peak, now)) {
    }
    MockRequest request;
    request.sequence = requests_++;
    auto doc = json::parse(req.body, nullptr, false);
    if (doc.is_object()) {
      request.model = doc.value("model", "");
      if (auto msgs = doc.find("messages"); msgs != doc.end() && msgs->is_array()) {
        for (const auto& m : *msgs) {
          if (!m.is_object()) continue;
          auto role = m.value("role", "");
          auto content = m.value("content", "");
          if (role == "system") request.system = content;
          if (role == "user") request.user = content;
        }
      }
    }
    {
      std::lock_guard lock(log_mutex_);
      log_.push_back(request);
    }
    if (latency_.count() > 0) std::this_thread::sleep_for(latency_);
    MockReply reply = responder_(request);
    res.status = reply.status;
    if (!reply.raw_body.empty()) {
      res.set_content(reply.raw_body, "application/json");
    } else if (reply.status >= 200 && reply.status < 300) {
      json body = {{"id", "mock-" + std::to_string(request.sequence)},
                   {"object", "chat.completion"},
                   {"model", request.model},
                   {"choices",
                    {{{"index", 0},
                      {"message", {{"role", "assistant"}, {"content", reply.content}}},
                      {"finish_reason", "stop"}}}}};
      res.set_content(body.dump(), "application/json");
    } else {
      res.set_content(json{{"error", {{"message", "mock failure"}}}}.dump(), "application/json");
    }
    --in_flight_;
  });

  port_ = port > 0 ? (svr.bind_to_port("127.0.0.1", port) ? port : -1)
                   : svr.bind_to_any_port("127.0.0.1");
  if (port_ <= 0) throw std::runtime_error("mock endpoint: cannot bind port");
  thread_ = std::thread([this] { impl_->server.listen_after_bind(); });
  impl_->server.wait_until_ready();
}

MockEndpoint::~MockEndpoint() { stop(); }

void MockEndpoint::stop() {
  impl_->server.stop();
  if (thread_.joinable() && thread_.get_id() != std::this_thread::get_id()) thread_.join();
}

void MockEndpoint::wait() {
  if (thread_.joinable()) thread_.join();
}

std::string MockEndpoint::base_url() const {
  return "http://127.0.0.1:" + std::to_string(port_) + "/v1";
}

std::vector<MockRequest> MockEndpoint::received() const {
  std::lock_guard lock(log_mutex_);
  return log_;
}

std::string query_of(const MockRequest& request) {
  if (!request.system.empty()) return request.user;
  constexpr std::string_view kCue = "Classify:\n";
  auto pos = request.user.rfind(kCue);
  return pos == std::string::npos ? request.user : request.user.substr(pos + kCue.size());
}

Responder scripted_responder(std::map<std::string, std::string> script, std::string fallback) {
  return [script = std::move(script), fallback = std::move(fallback)](const MockRequest& r) {
    auto it = script.find(query_of(r));
    return MockReply{200, it == script.end() ? fallback : it->second, {}};
  };
}

std::map<std::string, std::string> load_script(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open script " + path.string());
  std::map<std::string, std::string> script;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    auto doc = json::parse(line, nullptr, false);
    if (!doc.is_object() || !doc.contains("post") || !doc.contains("reply") ||
        !doc["post"].is_string() || !doc["reply"].is_string()) {
      throw std::runtime_error(path.string() + ":" + std::to_string(line_no) +
                               ": expected {\"post\", \"reply\"}");
    }
    script[doc["post"].get<std::string>()] = doc["reply"].get<std::string>();
  }
  return script;
}

}  // namespace sentiflow::mock
