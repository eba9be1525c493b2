#include <httplib.h>

#include <algorithm>
#include <cstdlib>
#include <regex>
#include <thread>

#include "tabgen/gateway.hpp"

namespace tabgen {
namespace {

using nlohmann::json;

struct ParsedUrl {
  std::string origin;  // scheme://host[:port]
  std::string host;
  std::string path;
};

ParsedUrl parse_url(const std::string& url) {
  static const std::regex re(R"(^(https?)://([^/:]+)(:\d+)?(/.*)?$)");
  std::smatch m;
  if (!std::regex_match(url, m, re)) throw ConfigError("invalid endpoint URL '" + url + "'");
  ParsedUrl p;
  p.host = m[2].str();
  p.origin = m[1].str() + "://" + p.host + m[3].str();
  p.path = m[4].matched ? m[4].str() : "/";
  return p;
}

bool transient_status(int status) { return status == 408 || status == 429 || status >= 500; }

}  // namespace

bool OpenAiClient::endpoint_is_local(const std::string& url) {
  const auto host = parse_url(url).host;
  return host == "localhost" || host == "127.0.0.1" || host == "::1";
}

OpenAiClient::OpenAiClient(ModelConfig config)
    : config_(std::move(config)),
      slots_(static_cast<std::ptrdiff_t>(std::clamp<std::size_t>(config_.max_concurrency, 1, 1024))) {
  parse_url(config_.endpoint_url);
  if (!config_.credential_env.empty()) {
    if (const char* v = std::getenv(config_.credential_env.c_str())) api_key_ = v;
  }
  if (api_key_.empty() && !endpoint_is_local(config_.endpoint_url)) {
    throw GatewayError(GatewayErrorKind::missing_credential,
                       "environment variable '" + config_.credential_env + "' is not set");
  }
  if (config_.rate_limit_rpm > 0.0) limiter_ = std::make_unique<RateLimiter>(config_.rate_limit_rpm);
}

std::string OpenAiClient::identity() const { return "openai:" + config_.endpoint_url + ":" + config_.model_name; }

json OpenAiClient::request_body(const LlmRequest& request) const {
  json body{{"model", config_.model_name},
            {"temperature", config_.temperature},
            {"max_tokens", config_.max_output_tokens}};
  if (config_.api_style == ApiStyle::chat) {
    json messages = json::array();
    if (!request.system_message.empty()) messages.push_back({{"role", "system"}, {"content", request.system_message}});
    messages.push_back({{"role", "user"}, {"content", request.user_message}});
    body["messages"] = std::move(messages);
  } else {
    body["prompt"] = request.system_message.empty() ? request.user_message
                                                    : request.system_message + "\n\n" + request.user_message;
  }
  return body;
}

LlmResponse OpenAiClient::complete(const LlmRequest& request) {
  if (request.user_message.empty()) throw Error("empty user message");
  const ParsedUrl url = parse_url(config_.endpoint_url);
  const std::string payload = request_body(request).dump();

  slots_.acquire();
  struct Release {
    std::counting_semaphore<1024>& s;
    ~Release() { s.release(); }
  } release{slots_};

  httplib::Client http(url.origin);
  const auto timeout_s = std::chrono::duration_cast<std::chrono::seconds>(config_.request_timeout);
  const auto timeout_us =
      std::chrono::duration_cast<std::chrono::microseconds>(config_.request_timeout - timeout_s);
  http.set_connection_timeout(timeout_s.count(), timeout_us.count());
  http.set_read_timeout(timeout_s.count(), timeout_us.count());
  http.set_write_timeout(timeout_s.count(), timeout_us.count());
  httplib::Headers headers;
  if (!api_key_.empty()) headers.emplace("Authorization", "Bearer " + api_key_);

  std::string last_failure;
  for (int attempt = 0; attempt <= config_.max_retries; ++attempt) {
    if (attempt > 0) {
      const auto delay = config_.backoff_base * (1LL << std::min(attempt - 1, 10));
      std::this_thread::sleep_for(delay);
    }
    if (limiter_) limiter_->acquire();

    const auto start = std::chrono::steady_clock::now();
    auto res = http.Post(url.path, headers, payload, "application/json");
    const auto latency =
        std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - start);

    if (!res) {
      last_failure = "transport error: " + httplib::to_string(res.error());
      continue;
    }
    if (res->status == 401 || res->status == 403) {
      throw GatewayError(GatewayErrorKind::authentication, "HTTP " + std::to_string(res->status));
    }
    if (transient_status(res->status)) {
      last_failure = "HTTP " + std::to_string(res->status);
      continue;
    }
    if (res->status < 200 || res->status >= 300) {
      throw GatewayError(GatewayErrorKind::malformed_reply,
                         "HTTP " + std::to_string(res->status) + ": " + res->body.substr(0, 200));
    }

    json reply = json::parse(res->body, nullptr, false);
    if (reply.is_discarded() || !reply.is_object() || !reply.contains("choices") || !reply["choices"].is_array() ||
        reply["choices"].empty()) {
      throw GatewayError(GatewayErrorKind::malformed_reply, "no choices in reply");
    }
    const auto& choice = reply["choices"][0];
    LlmResponse out;
    if (config_.api_style == ApiStyle::chat) {
      if (!choice.contains("message") || !choice["message"].contains("content") ||
          !choice["message"]["content"].is_string()) {
        throw GatewayError(GatewayErrorKind::malformed_reply, "choice has no message content");
      }
      out.text = choice["message"]["content"].get<std::string>();
    } else {
      if (!choice.contains("text") || !choice["text"].is_string()) {
        throw GatewayError(GatewayErrorKind::malformed_reply, "choice has no text");
      }
      out.text = choice["text"].get<std::string>();
    }
    out.truncated = choice.value("finish_reason", std::string{}) == "length";
    out.latency = latency;
    const auto usage = reply.find("usage");
    if (usage != reply.end() && usage->is_object() && usage->contains("prompt_tokens") &&
        usage->contains("completion_tokens") && (*usage)["prompt_tokens"].is_number_unsigned() &&
        (*usage)["completion_tokens"].is_number_unsigned()) {
      out.input_tokens = (*usage)["prompt_tokens"].get<std::size_t>();
      out.output_tokens = (*usage)["completion_tokens"].get<std::size_t>();
      out.provider_reported = true;
    } else {
      out.input_tokens = count_tokens(request.system_message) + count_tokens(request.user_message);
      out.output_tokens = count_tokens(out.text);
    }
    return out;
  }
  throw GatewayError(GatewayErrorKind::exhausted_retries,
                     std::to_string(config_.max_retries + 1) + " attempts, last: " + last_failure);
}

}  // namespace tabgen
