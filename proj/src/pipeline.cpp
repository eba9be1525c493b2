#include "tabgen/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <thread>
#include <unordered_set>

#include "tabgen/json_extract.hpp"
#include "tabgen/util.hpp"

namespace tabgen {

using nlohmann::json;

std::string_view to_string(Method m) {
  switch (m) {
    case Method::full_table: return "full-table";
    case Method::row_by_row: return "row-by-row";
    case Method::cell_by_cell: return "cell-by-cell";
  }
  return "full-table";
}

std::string_view to_string(Scenario s) {
  switch (s) {
    case Scenario::baseline: return "baseline";
    case Scenario::example_row: return "example-row";
    case Scenario::oracle_keys: return "oracle-keys";
  }
  return "baseline";
}

Method parse_method(std::string_view text) {
  for (auto m : {Method::full_table, Method::row_by_row, Method::cell_by_cell}) {
    if (to_string(m) == text) return m;
  }
  throw ConfigError("unknown method '" + std::string(text) + "' (full-table, row-by-row, cell-by-cell)");
}

Scenario parse_scenario(std::string_view text) {
  for (auto s : {Scenario::baseline, Scenario::example_row, Scenario::oracle_keys}) {
    if (to_string(s) == text) return s;
  }
  throw ConfigError("unknown scenario '" + std::string(text) + "' (baseline, example-row, oracle-keys)");
}

void validate_combination(Method method, Scenario scenario) {
  if (scenario == Scenario::oracle_keys && method == Method::full_table) {
    throw ConfigError("the oracle-keys scenario applies only to row-by-row and cell-by-cell");
  }
}

std::string GenerationRecord::token_counter() const {
  if (responses.empty()) return "none";
  std::size_t provider = 0;
  for (const auto& r : responses) provider += r.provider_reported ? 1 : 0;
  if (provider == responses.size()) return "provider";
  return provider == 0 ? "approximate" : "mixed";
}

void parallel_for(std::size_t n, std::size_t parallelism, const std::function<void(std::size_t)>& fn) {
  const std::size_t workers = std::min(std::max<std::size_t>(parallelism, 1), n);
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (std::size_t i = next.fetch_add(1); i < n; i = next.fetch_add(1)) {
          try {
            fn(i);
          } catch (...) {
            std::lock_guard lock(failure_mutex);
            if (!failure) failure = std::current_exception();
          }
        }
      });
    }
  }
  if (failure) std::rethrow_exception(failure);
}

namespace {

std::string describe_key(const std::vector<std::string>& values) {
  std::string out = "(";
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) out += ", ";
    out += values[i];
  }
  return out + ")";
}

class Runner {
 public:
  Runner(const Pipeline& pipeline, const BenchmarkInstance& instance, LlmClient& client, Scenario scenario)
      : pipeline_(pipeline), instance_(instance), client_(client), scenario_(scenario) {}

  RenderedPrompt prepare(RenderedPrompt prompt) const {
    if (scenario_ == Scenario::example_row) {
      prompt = augment_with_example(prompt, instance_.table.columns(), instance_.table.rows().front());
    }
    if (!pipeline_.options().wrapper.empty()) prompt.text = apply_wrapper(pipeline_.options().wrapper, prompt.text);
    return prompt;
  }

  ResponseTrace issue(const RenderedPrompt& prompt) const {
    ResponseTrace trace;
    LlmRequest request{"", prompt.text, instance_.id + ":" + std::string(to_string(prompt.kind))};
    try {
      const LlmResponse r = client_.complete(request);
      trace.text = r.text;
      trace.input_tokens = r.input_tokens;
      trace.output_tokens = r.output_tokens;
      trace.provider_reported = r.provider_reported;
      trace.truncated = r.truncated;
      trace.latency = r.latency;
    } catch (const GatewayError& e) {
      trace.error = e.what();
    }
    return trace;
  }

 private:
  const Pipeline& pipeline_;
  const BenchmarkInstance& instance_;
  LlmClient& client_;
  Scenario scenario_;
};

void finish_totals(GenerationRecord& rec) {
  rec.total_input_tokens = 0;
  rec.total_output_tokens = 0;
  for (const auto& r : rec.responses) {
    rec.total_input_tokens += r.input_tokens;
    rec.total_output_tokens += r.output_tokens;
  }
}

std::vector<std::string> raw_key_values(const Row& row, const std::vector<std::size_t>& key_indices) {
  std::vector<std::string> out;
  for (auto i : key_indices) out.push_back(row[i].value_or(""));
  return out;
}

GenerationRecord generate(const Pipeline& pipeline, const BenchmarkInstance& instance, LlmClient& client,
                          Method method, Scenario scenario) {
  validate_combination(method, scenario);
  const auto started = std::chrono::steady_clock::now();
  const auto& gold = instance.table;
  const auto& templates = pipeline.templates();
  const auto columns = gold.column_names();
  const auto key_names = gold.key_column_names();
  const auto& key_idx = gold.key_indices();
  const auto& non_key_idx = gold.non_key_indices();

  GenerationRecord rec;
  rec.instance_id = instance.id;
  rec.method = method;
  rec.scenario = scenario;
  rec.dedup_keys = pipeline.options().dedup_keys;
  rec.parsed_table = gold.with_rows({});
  if (scenario == Scenario::example_row) {
    if (gold.num_rows() == 0) throw ValidationError(instance.id, "example-row scenario needs a gold row");
    rec.excluded_key = raw_key_values(gold.rows().front(), key_idx);
  }

  Runner runner(pipeline, instance, client, scenario);
  auto fail = [&](std::string reason) {
    ++rec.parse_failures;
    rec.failure_reasons.push_back(std::move(reason));
  };
  auto finish = [&]() -> GenerationRecord {
    finish_totals(rec);
    rec.wall_time =
        std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - started);
    return std::move(rec);
  };

  if (method == Method::full_table) {
    auto prompt = runner.prepare(templates.render_full_table(instance.description, columns));
    auto trace = runner.issue(prompt);
    rec.prompts.push_back(prompt);
    if (trace.error) {
      fail("full table: " + *trace.error);
    } else {
      auto payload = extract_json_payload(trace.text, JsonShape::list, columns);
      if (payload.ok) {
        rec.parsed_table = gold.with_rows(std::move(payload.rows));
      } else {
        fail("full table: " + payload.failure);
      }
    }
    rec.responses.push_back(std::move(trace));
    return finish();
  }

  if (non_key_idx.empty()) throw ValidationError(instance.id, "table has no non-key column to generate");

  // Stage 1: key tuples, as raw text in schema key order.
  std::vector<std::vector<std::string>> keys;
  if (scenario == Scenario::oracle_keys) {
    for (const auto& row : gold.rows()) {
      keys.push_back(raw_key_values(row, key_idx));
      rec.raw_keys.emplace_back(keys.back().begin(), keys.back().end());
    }
  } else {
    auto prompt = runner.prepare(templates.render_keys(instance.description, key_names));
    auto trace = runner.issue(prompt);
    rec.prompts.push_back(prompt);
    std::optional<ExtractedPayload> payload;
    if (trace.error) {
      fail("keys: " + *trace.error);
    } else {
      payload = extract_json_payload(trace.text, JsonShape::list, key_names);
      if (!payload->ok) fail("keys: " + payload->failure);
    }
    rec.responses.push_back(std::move(trace));
    if (!payload || !payload->ok) return finish();

    std::unordered_set<KeyTuple, KeyTupleHash> seen;
    for (auto& cells : payload->rows) {
      rec.raw_keys.push_back(cells);
      if (std::any_of(cells.begin(), cells.end(), [](const CellValue& c) { return is_null_key_cell(c); })) continue;
      std::vector<std::size_t> positions(cells.size());
      for (std::size_t i = 0; i < positions.size(); ++i) positions[i] = i;
      if (rec.dedup_keys && !seen.insert(key_tuple(cells, positions, RowOrigin::generated)).second) continue;
      std::vector<std::string> values;
      for (auto& c : cells) values.push_back(*c);
      keys.push_back(std::move(values));
    }
  }

  // Stage 2: one prompt per key (row) or per (key, non-key column) (cell).
  struct Slot {
    std::size_t key = 0;
    std::size_t column = 0;
  };
  std::vector<RenderedPrompt> prompts;
  std::vector<Slot> slots;
  for (std::size_t k = 0; k < keys.size(); ++k) {
    if (method == Method::row_by_row) {
      prompts.push_back(runner.prepare(templates.render_row(instance.description, columns, key_names, keys[k])));
      slots.push_back({k, 0});
    } else {
      for (auto c : non_key_idx) {
        prompts.push_back(runner.prepare(
            templates.render_cell(instance.description, columns, key_names, keys[k], columns[c])));
        slots.push_back({k, c});
      }
    }
  }
  std::vector<ResponseTrace> traces(prompts.size());
  parallel_for(prompts.size(), pipeline.options().parallelism,
               [&](std::size_t i) { traces[i] = runner.issue(prompts[i]); });

  // Deterministic merge in (key order, column order).
  std::vector<Row> rows(keys.size(), Row(gold.num_cols()));
  for (std::size_t k = 0; k < keys.size(); ++k) {
    for (std::size_t i = 0; i < key_idx.size(); ++i) rows[k][key_idx[i]] = keys[k][i];
  }
  for (std::size_t i = 0; i < prompts.size(); ++i) {
    const auto& trace = traces[i];
    const auto& slot = slots[i];
    const std::string where = describe_key(keys[slot.key]);
    if (method == Method::row_by_row) {
      if (trace.error) {
        fail("row " + where + ": " + *trace.error);
        continue;
      }
      auto payload = extract_json_payload(trace.text, JsonShape::object, columns);
      if (!payload.ok) {
        fail("row " + where + ": " + payload.failure);
        continue;
      }
      for (auto c : non_key_idx) rows[slot.key][c] = payload.rows.front()[c];
    } else {
      const std::string& target = columns[slot.column];
      if (trace.error) {
        fail("cell " + where + "/" + target + ": " + *trace.error);
        continue;
      }
      auto payload = extract_json_payload(trace.text, JsonShape::object, {target});
      if (!payload.ok) {
        fail("cell " + where + "/" + target + ": " + payload.failure);
        continue;
      }
      rows[slot.key][slot.column] = payload.rows.front().front();
    }
  }
  rec.parsed_table = gold.with_rows(std::move(rows));
  for (std::size_t i = 0; i < prompts.size(); ++i) {
    rec.prompts.push_back(std::move(prompts[i]));
    rec.responses.push_back(std::move(traces[i]));
  }
  return finish();
}

json cell_to_json(const CellValue& c) { return c ? json(*c) : json(nullptr); }

CellValue cell_from_json(const json& j) {
  if (j.is_null()) return std::nullopt;
  return j.get<std::string>();
}

}  // namespace

Pipeline::Pipeline(PromptTemplates templates, PipelineOptions options)
    : templates_(std::move(templates)), options_(std::move(options)) {}

GenerationRecord Pipeline::run_full_table(const BenchmarkInstance& instance, LlmClient& client) const {
  return generate(*this, instance, client, Method::full_table, Scenario::baseline);
}

GenerationRecord Pipeline::run_row_by_row(const BenchmarkInstance& instance, LlmClient& client) const {
  return generate(*this, instance, client, Method::row_by_row, Scenario::baseline);
}

GenerationRecord Pipeline::run_cell_by_cell(const BenchmarkInstance& instance, LlmClient& client) const {
  return generate(*this, instance, client, Method::cell_by_cell, Scenario::baseline);
}

GenerationRecord Pipeline::run_scenario(const BenchmarkInstance& instance, LlmClient& client, Method method,
                                        Scenario scenario) const {
  return generate(*this, instance, client, method, scenario);
}

json record_to_json(const GenerationRecord& record, bool include_timings) {
  json prompts = json::array();
  for (const auto& p : record.prompts) {
    prompts.push_back({{"kind", std::string(to_string(p.kind))}, {"text", p.text}, {"has_example", p.has_example}});
  }
  json responses = json::array();
  for (const auto& r : record.responses) {
    json jr{{"text", r.text},
            {"input_tokens", r.input_tokens},
            {"output_tokens", r.output_tokens},
            {"provider_reported", r.provider_reported},
            {"truncated", r.truncated},
            {"error", r.error ? json(*r.error) : json(nullptr)}};
    if (include_timings) jr["latency_ms"] = r.latency.count();
    responses.push_back(std::move(jr));
  }
  json raw_keys = json::array();
  for (const auto& k : record.raw_keys) {
    json entry = json::array();
    for (const auto& c : k) entry.push_back(cell_to_json(c));
    raw_keys.push_back(std::move(entry));
  }
  json j{{"instance_id", record.instance_id},
         {"method", std::string(to_string(record.method))},
         {"scenario", std::string(to_string(record.scenario))},
         {"dedup_keys", record.dedup_keys},
         {"prompts", std::move(prompts)},
         {"responses", std::move(responses)},
         {"raw_keys", std::move(raw_keys)},
         {"parsed_table",
          {{"columns", columns_to_json(record.parsed_table.columns())}, {"rows", rows_to_json(record.parsed_table)}}},
         {"parse_failures", {{"count", record.parse_failures}, {"reasons", record.failure_reasons}}},
         {"excluded_key", record.excluded_key ? json(*record.excluded_key) : json(nullptr)},
         {"totals",
          {{"input_tokens", record.total_input_tokens},
           {"output_tokens", record.total_output_tokens},
           {"requests", record.responses.size()}}},
         {"token_counter", record.token_counter()}};
  if (include_timings) j["wall_time_ms"] = record.wall_time.count();
  return j;
}

GenerationRecord record_from_json(const json& j) {
  GenerationRecord r;
  try {
    r.instance_id = j.at("instance_id").get<std::string>();
    r.method = parse_method(j.at("method").get<std::string>());
    r.scenario = parse_scenario(j.at("scenario").get<std::string>());
    r.dedup_keys = j.value("dedup_keys", true);
    for (const auto& p : j.at("prompts")) {
      RenderedPrompt rp;
      rp.kind = parse_prompt_kind(p.at("kind").get<std::string>());
      rp.text = p.at("text").get<std::string>();
      rp.has_example = p.value("has_example", false);
      r.prompts.push_back(std::move(rp));
    }
    for (const auto& x : j.at("responses")) {
      ResponseTrace t;
      t.text = x.at("text").get<std::string>();
      t.input_tokens = x.at("input_tokens").get<std::size_t>();
      t.output_tokens = x.at("output_tokens").get<std::size_t>();
      t.provider_reported = x.value("provider_reported", false);
      t.truncated = x.value("truncated", false);
      if (x.contains("error") && !x["error"].is_null()) t.error = x["error"].get<std::string>();
      t.latency = std::chrono::milliseconds(x.value("latency_ms", 0));
      r.responses.push_back(std::move(t));
    }
    for (const auto& k : j.at("raw_keys")) {
      std::vector<CellValue> cells;
      for (const auto& c : k) cells.push_back(cell_from_json(c));
      r.raw_keys.push_back(std::move(cells));
    }
    r.parsed_table = table_from_json(j.at("parsed_table").at("columns"), j.at("parsed_table").at("rows"));
    r.parse_failures = j.at("parse_failures").at("count").get<std::size_t>();
    r.failure_reasons = j.at("parse_failures").at("reasons").get<std::vector<std::string>>();
    if (!j.at("excluded_key").is_null()) r.excluded_key = j["excluded_key"].get<std::vector<std::string>>();
    r.total_input_tokens = j.at("totals").at("input_tokens").get<std::size_t>();
    r.total_output_tokens = j.at("totals").at("output_tokens").get<std::size_t>();
    r.wall_time = std::chrono::milliseconds(j.value("wall_time_ms", 0));
  } catch (const json::exception& e) {
    throw ValidationError(r.instance_id, std::string("malformed generation record: ") + e.what());
  }
  return r;
}

json predicted_table_to_json(const GenerationRecord& record) {
  return json{{"instance_id", record.instance_id},
              {"method", std::string(to_string(record.method))},
              {"scenario", std::string(to_string(record.scenario))},
              {"columns", columns_to_json(record.parsed_table.columns())},
              {"rows", rows_to_json(record.parsed_table)}};
}

PredictedTable predicted_table_from_json(const json& j) {
  PredictedTable p;
  try {
    p.instance_id = j.at("instance_id").get<std::string>();
    p.method = parse_method(j.at("method").get<std::string>());
    p.scenario = parse_scenario(j.at("scenario").get<std::string>());
    p.table = table_from_json(j.at("columns"), j.at("rows"));
  } catch (const json::exception& e) {
    throw ValidationError(p.instance_id, std::string("malformed predicted table: ") + e.what());
  }
  return p;
}

std::string benchmark_fingerprint(const Benchmark& benchmark) {
  return sha256_hex(dump_canonical(benchmark_to_json(benchmark)));
}

RunSummary run_benchmark(const Benchmark& benchmark, const ClientFactory& clients, const Pipeline& pipeline,
                         const RunOptions& options, const std::filesystem::path& out_dir) {
  validate_combination(options.method, options.scenario);
  std::filesystem::create_directories(out_dir / "records");
  std::filesystem::create_directories(out_dir / "tables");

  RunSummary summary;
  json ids = json::array();
  std::size_t input_tokens = 0, output_tokens = 0, requests = 0, parse_failures = 0, truncated = 0;
  std::size_t provider_responses = 0;

  for (const auto& instance : benchmark.instances) {
    if (instance.split != options.split) continue;
    GenerationRecord rec;
    try {
      auto client = clients(instance);
      rec = pipeline.run_scenario(instance, *client, options.method, options.scenario);
    } catch (const ConfigError&) {
      throw;
    } catch (const Error& e) {
      rec = GenerationRecord{};
      rec.instance_id = instance.id;
      rec.method = options.method;
      rec.scenario = options.scenario;
      rec.dedup_keys = pipeline.options().dedup_keys;
      rec.parsed_table = instance.table.with_rows({});
      rec.parse_failures = 1;
      rec.failure_reasons.push_back(std::string("instance failed: ") + e.what());
      ++summary.failed_instances;
    }
    const std::string stem = safe_file_stem(instance.id);
    write_file_atomic(out_dir / "records" / (stem + ".json"),
                      dump_canonical(record_to_json(rec, options.record_timings)));
    write_file_atomic(out_dir / "tables" / (stem + ".json"), dump_canonical(predicted_table_to_json(rec)));

    ids.push_back(instance.id);
    input_tokens += rec.total_input_tokens;
    output_tokens += rec.total_output_tokens;
    requests += rec.responses.size();
    parse_failures += rec.parse_failures;
    for (const auto& r : rec.responses) {
      truncated += r.truncated ? 1 : 0;
      provider_responses += r.provider_reported ? 1 : 0;
    }
    summary.records.push_back(std::move(rec));
  }

  const std::string counter = requests == 0                      ? "none"
                              : provider_responses == requests ? "provider"
                              : provider_responses == 0        ? "approximate"
                                                               : "mixed";
  const json manifest{{"benchmark", benchmark_fingerprint(benchmark)},
                      {"config_hash", options.config_hash},
                      {"method", std::string(to_string(options.method))},
                      {"scenario", std::string(to_string(options.scenario))},
                      {"split", std::string(to_string(options.split))},
                      {"dedup_keys", pipeline.options().dedup_keys},
                      {"instances", std::move(ids)},
                      {"failed_instances", summary.failed_instances},
                      {"parse_failures", parse_failures},
                      {"truncated_responses", truncated},
                      {"token_counter", counter},
                      {"totals", {{"input_tokens", input_tokens}, {"output_tokens", output_tokens}, {"requests", requests}}}};
  write_file_atomic(out_dir / "run_manifest.json", dump_canonical(manifest));
  return summary;
}

}  // namespace tabgen
