#pragma once

#include <atomic>
#include <chrono>
#include <cstddef>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <semaphore>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "tabgen/error.hpp"
#include "tabgen/table.hpp"
#include "tabgen/tokens.hpp"

namespace tabgen {

enum class ApiStyle { chat, completion };

struct ModelConfig {
  std::string endpoint_url = "https://api.openai.com/v1/chat/completions";
  std::string model_name = "gpt-4-1106-preview";
  // Name of the environment variable holding the API key, never the key.
  std::string credential_env = "OPENAI_API_KEY";
  // Selects an optional wrapper.<family>.txt prompt asset.
  std::string family;
  ApiStyle api_style = ApiStyle::chat;
  double temperature = 0.0;
  int max_output_tokens = 4096;
  std::chrono::milliseconds request_timeout{120'000};
  int max_retries = 3;
  std::chrono::milliseconds backoff_base{500};
  // Requests per minute; 0 disables limiting.
  double rate_limit_rpm = 0.0;
  std::size_t max_concurrency = 4;

  nlohmann::json to_json() const;
};

struct LlmRequest {
  std::string system_message;
  std::string user_message;
  // Free-form label for the usage ledger (instance id, prompt kind). Not part
  // of the cache key.
  std::string purpose;
};

struct LlmResponse {
  std::string text;
  std::size_t input_tokens = 0;
  std::size_t output_tokens = 0;
  std::chrono::milliseconds latency{0};
  bool provider_reported = false;
  // Provider stopped at the output token limit.
  bool truncated = false;
  bool from_cache = false;
};

enum class GatewayErrorKind {
  exhausted_retries,
  authentication,
  malformed_reply,
  missing_credential,
  unscripted_prompt,
  unrecognized_prompt,
};

std::string_view to_string(GatewayErrorKind kind);

class GatewayError : public Error {
 public:
  GatewayError(GatewayErrorKind kind, const std::string& message)
      : Error(std::string(to_string(kind)) + ": " + message), kind_(kind) {}
  GatewayErrorKind kind() const noexcept { return kind_; }

 private:
  GatewayErrorKind kind_;
};

// Implementations must be safe to call from several threads at once.
class LlmClient {
 public:
  virtual ~LlmClient() = default;
  virtual LlmResponse complete(const LlmRequest& request) = 0;
  // Stable description of what answers the request; part of the cache key.
  virtual std::string identity() const = 0;
  virtual double temperature() const { return 0.0; }
};

// Answers from a fixed prompt -> response transcript.
class ScriptedClient final : public LlmClient {
 public:
  explicit ScriptedClient(std::map<std::string, std::string> transcript, std::string name = "scripted");
  // File: [{"prompt": str, "response": str}, ...]
  static ScriptedClient load(const std::filesystem::path& path);

  LlmResponse complete(const LlmRequest& request) override;
  std::string identity() const override { return name_; }

 private:
  std::map<std::string, std::string> transcript_;
  std::string name_;
};

struct OracleSpec {
  RelationalTable gold;
  double corruption_rate = 0.0;
  std::uint64_t seed = 0;
};

// Test double that reads answers off the gold table. Each emitted non-key
// value is independently replaced by a marked wrong value with probability
// corruption_rate; the decision is a pure function of (seed, key, column), so
// every prompting method sees the same corrupted cells. Keys are never
// corrupted.
class OracleClient final : public LlmClient {
 public:
  explicit OracleClient(OracleSpec spec);

  LlmResponse complete(const LlmRequest& request) override;
  std::string identity() const override { return identity_; }

  bool is_corrupted(const std::vector<std::string>& raw_key, const std::string& column) const;
  static std::string corrupt(const CellValue& value);

 private:
  OracleSpec spec_;
  std::string identity_;
};

// Client-side token bucket. capacity is the burst size.
class RateLimiter {
 public:
  explicit RateLimiter(double requests_per_minute, double capacity = 1.0);
  void acquire();

 private:
  std::mutex mutex_;
  double rate_per_second_;
  double capacity_;
  double tokens_;
  std::chrono::steady_clock::time_point last_;
};

// OpenAI-compatible HTTP client (chat or completion style). Transient
// failures (transport errors, 408, 429, 5xx) are retried with exponential
// backoff; 401/403 raise authentication errors; unparseable replies raise
// malformed_reply.
class OpenAiClient final : public LlmClient {
 public:
  explicit OpenAiClient(ModelConfig config);

  LlmResponse complete(const LlmRequest& request) override;
  std::string identity() const override;
  double temperature() const override { return config_.temperature; }

  // Request body sent for `request`, exposed for tests.
  nlohmann::json request_body(const LlmRequest& request) const;

  static bool endpoint_is_local(const std::string& url);

 private:
  ModelConfig config_;
  std::string api_key_;
  std::unique_ptr<RateLimiter> limiter_;
  std::counting_semaphore<1024> slots_;
};

// On-disk response cache keyed by (client identity, prompt, temperature).
// One JSON file per request hash holding request, response, usage, timestamp.
class CachingClient final : public LlmClient {
 public:
  CachingClient(std::shared_ptr<LlmClient> inner, std::filesystem::path dir);

  LlmResponse complete(const LlmRequest& request) override;
  std::string identity() const override { return inner_->identity(); }
  double temperature() const override { return inner_->temperature(); }

  std::string cache_key(const LlmRequest& request) const;
  std::size_t hits() const noexcept { return hits_.load(); }
  std::size_t misses() const noexcept { return misses_.load(); }

 private:
  std::shared_ptr<LlmClient> inner_;
  std::filesystem::path dir_;
  std::atomic<std::size_t> hits_{0};
  std::atomic<std::size_t> misses_{0};
};

struct LedgerEntry {
  std::string purpose;
  std::size_t input_tokens = 0;
  std::size_t output_tokens = 0;
  bool provider_reported = false;
  bool from_cache = false;
};

// Append-only usage log for one run.
class UsageLedger {
 public:
  void append(LedgerEntry entry);
  std::vector<LedgerEntry> entries() const;
  std::size_t total_input_tokens() const;
  std::size_t total_output_tokens() const;
  std::size_t request_count() const;
  void write_jsonl(const std::filesystem::path& path) const;

 private:
  mutable std::mutex mutex_;
  std::vector<LedgerEntry> entries_;
};

// Records one ledger entry per completed request. Failed requests (after
// any retries inside the wrapped client) are not recorded.
class MeteredClient final : public LlmClient {
 public:
  MeteredClient(std::shared_ptr<LlmClient> inner, std::shared_ptr<UsageLedger> ledger);

  LlmResponse complete(const LlmRequest& request) override;
  std::string identity() const override { return inner_->identity(); }
  double temperature() const override { return inner_->temperature(); }

 private:
  std::shared_ptr<LlmClient> inner_;
  std::shared_ptr<UsageLedger> ledger_;
};

}  // namespace tabgen
