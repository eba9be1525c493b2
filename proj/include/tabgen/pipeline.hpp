#pragma once

#include <chrono>
#include <cstddef>
#include <filesystem>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "tabgen/gateway.hpp"
#include "tabgen/prompts.hpp"
#include "tabgen/table.hpp"

namespace tabgen {

enum class Method { full_table, row_by_row, cell_by_cell };
enum class Scenario { baseline, example_row, oracle_keys };

// CLI spellings: full-table, row-by-row, cell-by-cell / baseline,
// example-row, oracle-keys. Throws ConfigError on anything else.
std::string_view to_string(Method m);
std::string_view to_string(Scenario s);
Method parse_method(std::string_view text);
Scenario parse_scenario(std::string_view text);

struct ResponseTrace {
  std::string text;
  std::size_t input_tokens = 0;
  std::size_t output_tokens = 0;
  bool provider_reported = false;
  bool truncated = false;
  std::optional<std::string> error;
  std::chrono::milliseconds latency{0};
};

struct GenerationRecord {
  std::string instance_id;
  Method method = Method::full_table;
  Scenario scenario = Scenario::baseline;
  bool dedup_keys = true;
  std::vector<RenderedPrompt> prompts;
  std::vector<ResponseTrace> responses;
  // Key tuples as generated, before null filtering and deduplication
  // (schema-ordered key columns). Empty for full-table runs.
  std::vector<std::vector<CellValue>> raw_keys;
  RelationalTable parsed_table;
  std::size_t parse_failures = 0;
  std::vector<std::string> failure_reasons;
  // Raw key values of the gold row shown as an example; evaluation drops it.
  std::optional<std::vector<std::string>> excluded_key;
  std::size_t total_input_tokens = 0;
  std::size_t total_output_tokens = 0;
  std::chrono::milliseconds wall_time{0};

  // "provider", "approximate", "mixed" or "none".
  std::string token_counter() const;
};

nlohmann::json record_to_json(const GenerationRecord& record, bool include_timings = false);
GenerationRecord record_from_json(const nlohmann::json& j);

struct PipelineOptions {
  // Upper bound on concurrent row/cell prompts within one instance.
  std::size_t parallelism = 4;
  // Drop repeated generated keys (first occurrence kept) before the
  // second stage.
  bool dedup_keys = true;
  // Wrapper template applied around every user message; empty for none.
  std::string wrapper;
};

class Pipeline {
 public:
  explicit Pipeline(PromptTemplates templates, PipelineOptions options = {});

  GenerationRecord run_full_table(const BenchmarkInstance& instance, LlmClient& client) const;
  GenerationRecord run_row_by_row(const BenchmarkInstance& instance, LlmClient& client) const;
  GenerationRecord run_cell_by_cell(const BenchmarkInstance& instance, LlmClient& client) const;
  // Throws ConfigError for oracle-keys with full-table.
  GenerationRecord run_scenario(const BenchmarkInstance& instance, LlmClient& client, Method method,
                                Scenario scenario) const;

  const PromptTemplates& templates() const noexcept { return templates_; }
  const PipelineOptions& options() const noexcept { return options_; }

 private:
  PromptTemplates templates_;
  PipelineOptions options_;
};

void validate_combination(Method method, Scenario scenario);

// Runs `fn(i)` for i in [0, n) on up to `parallelism` threads. The first
// exception is rethrown after all workers finish.
void parallel_for(std::size_t n, std::size_t parallelism, const std::function<void(std::size_t)>& fn);

using ClientFactory = std::function<std::shared_ptr<LlmClient>(const BenchmarkInstance&)>;

struct RunOptions {
  Method method = Method::full_table;
  Scenario scenario = Scenario::baseline;
  std::string config_hash;
  bool record_timings = false;
  // Instances of this split are run.
  Split split = Split::eval;
};

struct RunSummary {
  std::vector<GenerationRecord> records;
  std::size_t failed_instances = 0;
};

// Writes records/<id>.json, tables/<id>.json (one file per instance, as each
// finishes) and run_manifest.json under out_dir. Per-instance library errors
// are logged into that instance's record and the run continues.
RunSummary run_benchmark(const Benchmark& benchmark, const ClientFactory& clients, const Pipeline& pipeline,
                         const RunOptions& options, const std::filesystem::path& out_dir);

// Content hash of the benchmark's canonical serialization.
std::string benchmark_fingerprint(const Benchmark& benchmark);

struct PredictedTable {
  std::string instance_id;
  Method method = Method::full_table;
  Scenario scenario = Scenario::baseline;
  RelationalTable table;
};

nlohmann::json predicted_table_to_json(const GenerationRecord& record);
PredictedTable predicted_table_from_json(const nlohmann::json& j);

}  // namespace tabgen
