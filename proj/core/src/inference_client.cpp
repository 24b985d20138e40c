#include "sentiflow/inference_client.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <thread>

#include <httplib.h>

namespace sentiflow {
namespace {

using json = nlohmann::json;
using Clock = std::chrono::steady_clock;

struct SplitUrl {
  std::string origin;  // scheme://host[:port]
  std::string path;    // without trailing slash
};

SplitUrl split_url(const std::string& url) {
  auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos) throw ConfigError("endpoint URL lacks a scheme: " + url);
  auto scheme = url.substr(0, scheme_end);
  if (scheme != "http" && scheme != "https") {
    throw ConfigError("unsupported endpoint scheme: " + scheme);
  }
  auto path_start = url.find('/', scheme_end + 3);
  SplitUrl out;
  out.origin = url.substr(0, path_start);
  out.path = path_start == std::string::npos ? "" : url.substr(path_start);
  while (!out.path.empty() && out.path.back() == '/') out.path.pop_back();
  if (out.origin.size() <= scheme_end + 3) throw ConfigError("endpoint URL lacks a host: " + url);
  return out;
}

class HttplibTransport final : public HttpTransport {
 public:
  explicit HttplibTransport(std::string origin) : origin_(std::move(origin)) {}

  HttpReply post(const std::string& path, const std::string& body,
                 const std::map<std::string, std::string>& headers,
                 std::chrono::milliseconds timeout) override {
    // One client per call: httplib::Client serializes requests on its socket.
    httplib::Client client(origin_);
    client.set_tcp_nodelay(true);
    client.set_connection_timeout(timeout);
    client.set_read_timeout(timeout);
    client.set_write_timeout(timeout);
    httplib::Headers h(headers.begin(), headers.end());
    auto res = client.Post(path, h, body, "application/json");
    HttpReply reply;
    if (!res) {
      reply.error = httplib::to_string(res.error());
      return reply;
    }
    reply.status = res->status;
    reply.body = std::move(res->body);
    return reply;
  }

 private:
  std::string origin_;
};

bool is_transient(int status) { return status == 0 || status == 408 || status == 429 || status >= 500; }

}  // namespace

std::string_view to_string(FailureKind kind) {
  switch (kind) {
    case FailureKind::Transport:
      return "transport";
    case FailureKind::Protocol:
      return "protocol";
    case FailureKind::Auth:
      return "auth";
  }
  return "unknown";
}

void EndpointConfig::validate() const {
  if (max_attempts < 1) throw ConfigError("max_attempts must be >= 1");
  if (max_in_flight < 1) throw ConfigError("max_in_flight must be >= 1");
  if (!(temperature >= 0)) throw ConfigError("temperature must be >= 0");
  if (max_tokens < 1) throw ConfigError("max_tokens must be >= 1");
  if (timeout.count() <= 0) throw ConfigError("timeout must be positive");
  if (requests_per_second && !(*requests_per_second > 0)) {
    throw ConfigError("requests_per_second must be positive");
  }
  if (backoff_initial.count() < 0) throw ConfigError("backoff must be non-negative");
  split_url(base_url);
}

std::shared_ptr<HttpTransport> make_http_transport(const std::string& base_url) {
  return std::make_shared<HttplibTransport>(split_url(base_url).origin);
}

RateLimiter::RateLimiter(double requests_per_second)
    : interval_(std::chrono::duration_cast<Clock::duration>(
          std::chrono::duration<double>(1.0 / requests_per_second))),
      next_(Clock::now()) {}

void RateLimiter::acquire() {
  Clock::time_point slot;
  {
    std::lock_guard lock(mutex_);
    slot = std::max(Clock::now(), next_);
    next_ = slot + interval_;
  }
  std::this_thread::sleep_until(slot);
}

json encode_chat_request(const PromptBundle& bundle, const EndpointConfig& cfg) {
  json messages = json::array();
  if (cfg.split_roles) {
    messages.push_back({{"role", "system"}, {"content", bundle.system_instructions}});
    messages.push_back({{"role", "user"}, {"content", bundle.query_post}});
  } else {
    messages.push_back(
        {{"role", "user"}, {"content", bundle.system_instructions + "\n" + bundle.query_post}});
  }
  return {{"model", cfg.model_name},
          {"messages", std::move(messages)},
          {"temperature", cfg.temperature},
          {"max_tokens", cfg.max_tokens}};
}

std::string decode_chat_response(const std::string& body) {
  auto doc = json::parse(body, nullptr, false);
  if (doc.is_discarded()) throw ProtocolError("response body is not JSON", 1);
  auto choices = doc.find("choices");
  if (!doc.is_object() || choices == doc.end() || !choices->is_array() || choices->empty()) {
    throw ProtocolError("response lacks choices[0]", 1);
  }
  const auto& first = (*choices)[0];
  if (!first.is_object() || !first.contains("message") || !first["message"].is_object()) {
    throw ProtocolError("response lacks choices[0].message", 1);
  }
  const auto& message = first["message"];
  auto content = message.find("content");
  if (content == message.end() || !content->is_string()) {
    throw ProtocolError("choices[0].message.content is not a string", 1);
  }
  return content->get<std::string>();
}

InferenceClient::InferenceClient(EndpointConfig cfg)
    : InferenceClient(cfg, make_http_transport(cfg.base_url)) {}

InferenceClient::InferenceClient(EndpointConfig cfg, std::shared_ptr<HttpTransport> transport)
    : cfg_(std::move(cfg)), transport_(std::move(transport)) {
  cfg_.validate();
  path_ = split_url(cfg_.base_url).path + "/chat/completions";
  if (cfg_.requests_per_second) limiter_ = std::make_shared<RateLimiter>(*cfg_.requests_per_second);
}

CompletionResult InferenceClient::complete(const PromptBundle& bundle) const {
  const std::string body = encode_chat_request(bundle, cfg_).dump(-1, ' ', false,
                                                                   json::error_handler_t::replace);
  std::map<std::string, std::string> headers;
  if (const char* token = std::getenv(cfg_.api_key_env.c_str()); token && *token) {
    headers["Authorization"] = std::string("Bearer ") + token;
  }

  const auto started = Clock::now();
  auto delay = cfg_.backoff_initial;
  std::string last_error;
  for (int attempt = 1; attempt <= cfg_.max_attempts; ++attempt) {
    if (attempt > 1) {
      std::this_thread::sleep_for(delay);
      delay *= 2;
    }
    if (limiter_) limiter_->acquire();
    HttpReply reply = transport_->post(path_, body, headers, cfg_.timeout);

    if (reply.status >= 200 && reply.status < 300) {
      CompletionResult result;
      try {
        result.text = decode_chat_response(reply.body);
      } catch (const ProtocolError& e) {
        throw ProtocolError(e.what(), attempt);
      }
      result.latency = std::chrono::duration_cast<std::chrono::milliseconds>(Clock::now() - started);
      result.attempts = attempt;
      auto doc = json::parse(reply.body, nullptr, false);
      if (doc.is_object() && doc.contains("model") && doc["model"].is_string()) {
        result.endpoint_model = doc["model"].get<std::string>();
      } else {
        result.endpoint_model = cfg_.model_name;
      }
      return result;
    }
    if (reply.status == 401 || reply.status == 403) {
      throw AuthError("endpoint rejected credentials (HTTP " + std::to_string(reply.status) + ")",
                      attempt);
    }
    if (!is_transient(reply.status)) {
      throw ProtocolError("unexpected HTTP " + std::to_string(reply.status), attempt);
    }
    last_error = reply.status == 0 ? reply.error : "HTTP " + std::to_string(reply.status);
  }
  throw TransportError("gave up after " + std::to_string(cfg_.max_attempts) +
                           " attempts: " + last_error,
                       cfg_.max_attempts);
}

std::vector<BatchItem> InferenceClient::complete_many(std::span<const PromptBundle> bundles) const {
  std::vector<BatchItem> results(bundles.size());
  if (bundles.empty()) return results;

  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next.fetch_add(1); i < bundles.size(); i = next.fetch_add(1)) {
      results[i].index = i;
      try {
        results[i].outcome = complete(bundles[i]);
      } catch (const InferenceError& e) {
        results[i].outcome = InferenceFailure{e.kind(), e.what(), e.attempts()};
      }
    }
  };
  const auto workers = std::min<std::size_t>(static_cast<std::size_t>(cfg_.max_in_flight),
                                             bundles.size());
  {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(worker);
  }
  return results;
}

}  // namespace sentiflow
