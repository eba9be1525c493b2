#include "tabgen/gateway.hpp"

#include <ctime>
#include <fstream>
#include <thread>

#include "tabgen/util.hpp"

namespace tabgen {

using nlohmann::json;

std::string_view to_string(GatewayErrorKind kind) {
  switch (kind) {
    case GatewayErrorKind::exhausted_retries: return "exhausted retries";
    case GatewayErrorKind::authentication: return "authentication failure";
    case GatewayErrorKind::malformed_reply: return "malformed provider reply";
    case GatewayErrorKind::missing_credential: return "missing credential";
    case GatewayErrorKind::unscripted_prompt: return "unscripted prompt";
    case GatewayErrorKind::unrecognized_prompt: return "unrecognized prompt shape";
  }
  return "gateway error";
}

json ModelConfig::to_json() const {
  return json{{"endpoint_url", endpoint_url},
              {"model_name", model_name},
              {"credential_env", credential_env},
              {"family", family},
              {"api_style", api_style == ApiStyle::chat ? "chat" : "completion"},
              {"temperature", temperature},
              {"max_output_tokens", max_output_tokens},
              {"request_timeout_ms", request_timeout.count()},
              {"max_retries", max_retries},
              {"backoff_base_ms", backoff_base.count()},
              {"rate_limit_rpm", rate_limit_rpm},
              {"max_concurrency", max_concurrency}};
}

// ---------------------------------------------------------------------------
// ScriptedClient

ScriptedClient::ScriptedClient(std::map<std::string, std::string> transcript, std::string name)
    : transcript_(std::move(transcript)), name_(std::move(name)) {}

ScriptedClient ScriptedClient::load(const std::filesystem::path& path) {
  json j;
  try {
    j = json::parse(read_text_file(path));
  } catch (const json::parse_error& e) {
    throw ConfigError("transcript " + path.string() + ": " + e.what());
  }
  if (!j.is_array()) throw ConfigError("transcript must be a JSON array");
  std::map<std::string, std::string> t;
  for (const auto& e : j) {
    if (!e.is_object() || !e.contains("prompt") || !e.contains("response") || !e["prompt"].is_string() ||
        !e["response"].is_string()) {
      throw ConfigError("transcript entries need string 'prompt' and 'response'");
    }
    t[e["prompt"].get<std::string>()] = e["response"].get<std::string>();
  }
  return ScriptedClient(std::move(t), "scripted:" + sha256_hex(j.dump()).substr(0, 16));
}

LlmResponse ScriptedClient::complete(const LlmRequest& request) {
  auto it = transcript_.find(request.user_message);
  if (it == transcript_.end()) {
    throw GatewayError(GatewayErrorKind::unscripted_prompt, request.user_message.substr(0, 80));
  }
  LlmResponse r;
  r.text = it->second;
  r.input_tokens = count_tokens(request.system_message) + count_tokens(request.user_message);
  r.output_tokens = count_tokens(r.text);
  return r;
}

// ---------------------------------------------------------------------------
// RateLimiter

RateLimiter::RateLimiter(double requests_per_minute, double capacity)
    : rate_per_second_(requests_per_minute / 60.0),
      capacity_(capacity < 1.0 ? 1.0 : capacity),
      tokens_(capacity_),
      last_(std::chrono::steady_clock::now()) {}

void RateLimiter::acquire() {
  if (rate_per_second_ <= 0.0) return;
  std::unique_lock lock(mutex_);
  for (;;) {
    const auto now = std::chrono::steady_clock::now();
    const double elapsed = std::chrono::duration<double>(now - last_).count();
    last_ = now;
    tokens_ = std::min(capacity_, tokens_ + elapsed * rate_per_second_);
    if (tokens_ >= 1.0) {
      tokens_ -= 1.0;
      return;
    }
    const double wait = (1.0 - tokens_) / rate_per_second_;
    // Sleeping under the lock keeps waiters in arrival order.
    std::this_thread::sleep_for(std::chrono::duration<double>(wait));
  }
}

// ---------------------------------------------------------------------------
// CachingClient

CachingClient::CachingClient(std::shared_ptr<LlmClient> inner, std::filesystem::path dir)
    : inner_(std::move(inner)), dir_(std::move(dir)) {
  std::filesystem::create_directories(dir_);
}

std::string CachingClient::cache_key(const LlmRequest& request) const {
  const json key{{"model", inner_->identity()},
                 {"system", request.system_message},
                 {"user", request.user_message},
                 {"temperature", inner_->temperature()}};
  return sha256_hex(key.dump());
}

namespace {

std::string utc_timestamp() {
  const std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace

LlmResponse CachingClient::complete(const LlmRequest& request) {
  const std::string key = cache_key(request);
  const auto path = dir_ / (key + ".json");
  std::error_code ec;
  if (std::filesystem::exists(path, ec)) {
    try {
      const json j = json::parse(read_text_file(path));
      const auto& r = j.at("response");
      LlmResponse out;
      out.text = r.at("text").get<std::string>();
      out.input_tokens = j.at("usage").at("input_tokens").get<std::size_t>();
      out.output_tokens = j.at("usage").at("output_tokens").get<std::size_t>();
      out.provider_reported = j.at("usage").at("provider_reported").get<bool>();
      out.truncated = r.value("truncated", false);
      out.latency = std::chrono::milliseconds(r.value("latency_ms", 0));
      out.from_cache = true;
      ++hits_;
      return out;
    } catch (const std::exception&) {
      // Corrupt or partial entry: fall through and refetch.
    }
  }
  ++misses_;
  LlmResponse fresh = inner_->complete(request);
  const json entry{
      {"request",
       {{"model", inner_->identity()},
        {"system", request.system_message},
        {"user", request.user_message},
        {"temperature", inner_->temperature()}}},
      {"response", {{"text", fresh.text}, {"truncated", fresh.truncated}, {"latency_ms", fresh.latency.count()}}},
      {"usage",
       {{"input_tokens", fresh.input_tokens},
        {"output_tokens", fresh.output_tokens},
        {"provider_reported", fresh.provider_reported}}},
      {"timestamp", utc_timestamp()}};
  write_file_atomic(path, entry.dump(2) + "\n");
  return fresh;
}

// ---------------------------------------------------------------------------
// UsageLedger / MeteredClient

void UsageLedger::append(LedgerEntry entry) {
  std::lock_guard lock(mutex_);
  entries_.push_back(std::move(entry));
}

std::vector<LedgerEntry> UsageLedger::entries() const {
  std::lock_guard lock(mutex_);
  return entries_;
}

std::size_t UsageLedger::total_input_tokens() const {
  std::lock_guard lock(mutex_);
  std::size_t n = 0;
  for (const auto& e : entries_) n += e.input_tokens;
  return n;
}

std::size_t UsageLedger::total_output_tokens() const {
  std::lock_guard lock(mutex_);
  std::size_t n = 0;
  for (const auto& e : entries_) n += e.output_tokens;
  return n;
}

std::size_t UsageLedger::request_count() const {
  std::lock_guard lock(mutex_);
  return entries_.size();
}

void UsageLedger::write_jsonl(const std::filesystem::path& path) const {
  std::string text;
  for (const auto& e : entries()) {
    text += json{{"purpose", e.purpose},
                 {"input_tokens", e.input_tokens},
                 {"output_tokens", e.output_tokens},
                 {"provider_reported", e.provider_reported},
                 {"cached", e.from_cache}}
                .dump();
    text += '\n';
  }
  write_file_atomic(path, text);
}

MeteredClient::MeteredClient(std::shared_ptr<LlmClient> inner, std::shared_ptr<UsageLedger> ledger)
    : inner_(std::move(inner)), ledger_(std::move(ledger)) {}

LlmResponse MeteredClient::complete(const LlmRequest& request) {
  LlmResponse r = inner_->complete(request);
  ledger_->append({request.purpose, r.input_tokens, r.output_tokens, r.provider_reported, r.from_cache});
  return r;
}

}  // namespace tabgen
