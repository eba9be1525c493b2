#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <iostream>
#include <memory>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "tabgen/analysis.hpp"
#include "tabgen/curation.hpp"
#include "tabgen/gateway.hpp"
#include "tabgen/metrics.hpp"
#include "tabgen/pipeline.hpp"
#include "tabgen/util.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace tabgen;

namespace {

struct GenerateArgs {
  std::string benchmark;
  std::string method = "full-table";
  std::string scenario = "baseline";
  std::string client = "oracle";
  std::string out;
  std::string cache_dir;
  std::string transcript;
  std::string split = "eval";
  std::string api_style = "chat";
  double corruption_rate = 0.0;
  std::size_t parallelism = 4;
  bool no_dedup = false;
  bool record_timings = false;
  std::int64_t timeout_ms = 120'000;
  ModelConfig model;
};

struct EvaluateArgs {
  std::string predictions;
  std::string benchmark;
  std::string report;
  std::string format;
  double tolerance = 0.001;
  bool exact_key_cells = false;
};

struct AnalyzeArgs {
  std::string report;
  std::string property = "num_cells";
  std::vector<double> edges;
  std::vector<std::string> runs;
  std::string out;
  std::string cost_out;
  std::string format;
};

struct CurateArgs {
  std::string candidates;
  std::string descriptions;
  std::string pageviews;
  std::string pageviews_url;
  std::string out;
  std::string log;
  std::string window_first = "2023-01";
  std::string window_last = "2023-12";
  double fill_threshold = 1.0;
  double max_median_tokens = 10.0;
};

struct CostArgs {
  std::vector<std::string> runs;
  std::string out;
  std::string format;
};

struct StatsArgs {
  std::string benchmark;
  std::string out;
};

ReportFormat pick_format(const std::string& flag, const fs::path& path) {
  if (flag == "csv") return ReportFormat::csv;
  if (flag == "json") return ReportFormat::json;
  if (!flag.empty()) throw ConfigError("unknown format '" + flag + "' (csv, json)");
  return path.extension() == ".csv" ? ReportFormat::csv : ReportFormat::json;
}

void ensure_parent(const fs::path& p) {
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
}

Benchmark read_benchmark(const std::string& path) {
  if (!fs::exists(path)) throw IoError("benchmark file '" + path + "' does not exist");
  return load_benchmark(path);
}

std::shared_ptr<LlmClient> wrap(std::shared_ptr<LlmClient> inner, const std::string& cache_dir,
                                const std::shared_ptr<UsageLedger>& ledger) {
  if (!cache_dir.empty()) inner = std::make_shared<CachingClient>(std::move(inner), cache_dir);
  return std::make_shared<MeteredClient>(std::move(inner), ledger);
}

int cmd_generate(GenerateArgs a, std::uint64_t seed) {
  const Method method = parse_method(a.method);
  const Scenario scenario = parse_scenario(a.scenario);
  validate_combination(method, scenario);
  if (a.out.empty()) throw ConfigError("--out is required");
  if (a.corruption_rate < 0.0 || a.corruption_rate > 1.0) throw ConfigError("--corruption-rate must be in [0, 1]");
  if (a.api_style == "chat") {
    a.model.api_style = ApiStyle::chat;
  } else if (a.api_style == "completion") {
    a.model.api_style = ApiStyle::completion;
  } else {
    throw ConfigError("--api-style must be chat or completion");
  }
  a.model.request_timeout = std::chrono::milliseconds(a.timeout_ms);

  const Benchmark benchmark = read_benchmark(a.benchmark);
  auto templates = PromptTemplates::load(PromptTemplates::default_dir());
  PipelineOptions popts;
  popts.parallelism = a.parallelism;
  popts.dedup_keys = !a.no_dedup;
  if (!a.model.family.empty()) {
    if (auto w = templates.wrapper(a.model.family)) popts.wrapper = *w;
  }

  json client_json{{"kind", a.client}};
  if (a.client == "oracle") {
    client_json["corruption_rate"] = a.corruption_rate;
  } else if (a.client == "scripted") {
    client_json["transcript"] = sha256_hex(read_text_file(a.transcript));
  } else if (a.client == "openai") {
    client_json["model"] = a.model.to_json();
  } else {
    throw ConfigError("unknown client '" + a.client + "' (oracle, scripted, openai)");
  }

  const json run_config{{"benchmark", benchmark_fingerprint(benchmark)},
                        {"method", a.method},
                        {"scenario", a.scenario},
                        {"split", a.split},
                        {"client", client_json},
                        {"parallelism", a.parallelism},
                        {"dedup_keys", popts.dedup_keys},
                        {"wrapper", !popts.wrapper.empty()},
                        {"seed", seed}};

  auto ledger = std::make_shared<UsageLedger>();
  ClientFactory factory;
  if (a.client == "oracle") {
    const double rate = a.corruption_rate;
    const std::string cache = a.cache_dir;
    factory = [rate, seed, cache, ledger](const BenchmarkInstance& inst) {
      return wrap(std::make_shared<OracleClient>(OracleSpec{inst.table, rate, seed}), cache, ledger);
    };
  } else {
    std::shared_ptr<LlmClient> shared;
    if (a.client == "scripted") {
      shared = std::make_shared<ScriptedClient>(ScriptedClient::load(a.transcript));
    } else {
      shared = std::make_shared<OpenAiClient>(a.model);
    }
    shared = wrap(std::move(shared), a.cache_dir, ledger);
    factory = [shared](const BenchmarkInstance&) { return shared; };
  }

  Pipeline pipeline(std::move(templates), popts);
  RunOptions ropts;
  ropts.method = method;
  ropts.scenario = scenario;
  ropts.config_hash = sha256_hex(run_config.dump());
  ropts.record_timings = a.record_timings;
  ropts.split = parse_split(a.split);

  const fs::path out(a.out);
  fs::create_directories(out);
  write_file_atomic(out / "run_config.json", dump_canonical(run_config));
  const auto summary = run_benchmark(benchmark, factory, pipeline, ropts, out);
  ledger->write_jsonl(out / "ledger.jsonl");

  std::size_t failures = 0;
  for (const auto& r : summary.records) failures += r.parse_failures;
  fmt::print("{} instances, {} failed, {} parse failures, {} requests -> {}\n", summary.records.size(),
             summary.failed_instances, failures, ledger->request_count(), out.string());
  return 0;
}

std::vector<PredictedTable> read_predictions(const fs::path& dir_arg) {
  fs::path dir = dir_arg;
  if (fs::is_directory(dir / "tables")) dir /= "tables";
  if (!fs::is_directory(dir)) throw IoError("predictions directory '" + dir_arg.string() + "' does not exist");
  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(dir)) {
    if (e.path().extension() == ".json") files.push_back(e.path());
  }
  std::sort(files.begin(), files.end());
  if (files.empty()) throw IoError("no prediction files in '" + dir.string() + "'");
  std::vector<PredictedTable> preds;
  for (const auto& f : files) {
    json j = json::parse(read_text_file(f), nullptr, false);
    if (j.is_discarded()) throw ValidationError("", f.string() + ": not valid JSON");
    if (j.contains("prompts")) {
      auto rec = record_from_json(j);
      preds.push_back(PredictedTable{rec.instance_id, rec.method, rec.scenario, rec.parsed_table});
    } else {
      preds.push_back(predicted_table_from_json(j));
    }
  }
  return preds;
}

int cmd_evaluate(const EvaluateArgs& a) {
  if (a.report.empty()) throw ConfigError("--report is required");
  MatchRule rule;
  rule.numeric_rel_tolerance = a.tolerance;
  rule.fuzzy_key_cells = !a.exact_key_cells;
  rule.validate();
  const ReportFormat format = pick_format(a.format, a.report);

  const Benchmark benchmark = read_benchmark(a.benchmark);
  const auto preds = read_predictions(a.predictions);
  std::vector<EvaluationJob> jobs;
  for (const auto& p : preds) {
    const BenchmarkInstance* inst = benchmark.find(p.instance_id);
    if (!inst) throw ValidationError(p.instance_id, "prediction has no gold instance in the benchmark");
    EvaluationJob job{inst, &p.table, std::nullopt};
    if (p.scenario == Scenario::example_row) job.exclude_key = example_row_key(*inst);
    jobs.push_back(std::move(job));
  }
  auto per_table = evaluate_jobs_parallel(jobs, rule);
  std::vector<ReportRow> rows;
  for (const auto& job : jobs) {
    const auto& inst = *job.instance;
    rows.push_back(ReportRow{inst.id, per_table.at(inst.id), table_stats(inst.table, inst.description),
                             inst.popularity});
  }
  const auto macro = aggregate(std::move(per_table));

  const fs::path report(a.report);
  ensure_parent(report);
  write_file_atomic(report, format == ReportFormat::csv ? evaluation_report_csv(rows, macro)
                                                        : dump_canonical(evaluation_report_json(rows, macro)));
  fmt::print("{} tables  keys F1 {:.3f}  non-keys F1 {:.3f}  overall F1 {:.3f}\n", rows.size(), macro.macro_keys.f1,
             macro.macro_non_keys.f1, macro.macro_overall.f1);
  return 0;
}

CostReport cost_for(const std::vector<std::string>& run_dirs) {
  std::vector<RunRecords> runs;
  for (const auto& d : run_dirs) runs.push_back(load_run(d));
  return cost_report(runs);
}

int cmd_analyze(const AnalyzeArgs& a) {
  const TableProperty property = parse_property(a.property);
  if (a.out.empty()) throw ConfigError("--out is required");
  json j = json::parse(read_text_file(a.report), nullptr, false);
  if (j.is_discarded()) throw ValidationError("", a.report + ": evaluation report is not valid JSON");
  std::vector<PropertySample> samples;
  for (const auto& row : report_rows_from_json(j)) {
    samples.push_back({row.evaluation, property_value(property, row.stats, row.popularity)});
  }
  const auto series = bucket_metrics(samples, property, a.edges.empty() ? default_edges(property) : a.edges);
  ensure_parent(a.out);
  emit_report(series, a.out, pick_format(a.format, a.out));
  if (!a.runs.empty()) {
    const fs::path cost_out = a.cost_out.empty() ? fs::path(a.out).replace_filename("cost_report.json") : fs::path(a.cost_out);
    ensure_parent(cost_out);
    emit_report(cost_for(a.runs), cost_out, pick_format(a.format, cost_out));
  }
  return 0;
}

int cmd_cost(const CostArgs& a) {
  if (a.out.empty()) throw ConfigError("--out is required");
  const auto report = cost_for(a.runs);
  ensure_parent(a.out);
  emit_report(report, a.out, pick_format(a.format, a.out));
  for (const auto& [m, t] : report.per_method) {
    fmt::print("{:<28} in {:>9}  out {:>9}  requests {:>6}  ({})\n", m, t.input_tokens, t.output_tokens, t.requests,
               t.counter);
  }
  return 0;
}

int cmd_curate(const CurateArgs& a) {
  if (a.out.empty()) throw ConfigError("--out is required");
  CurationOptions opts;
  opts.prune.fill_threshold = a.fill_threshold;
  opts.prune.max_median_tokens = a.max_median_tokens;
  opts.window = {a.window_first, a.window_last};

  std::unique_ptr<PageviewsClient> pageviews;
  if (!a.pageviews.empty()) {
    pageviews = std::make_unique<FixturePageviewsClient>(FixturePageviewsClient::load(a.pageviews));
  } else if (!a.pageviews_url.empty()) {
    pageviews = std::make_unique<WikimediaPageviewsClient>(a.pageviews_url);
  } else {
    throw ConfigError("one of --pageviews or --pageviews-url is required");
  }
  const auto candidates = load_candidates(a.candidates);
  const auto descriptions = read_descriptions_csv(a.descriptions);
  const auto result = curate(candidates, descriptions, *pageviews, opts);

  ensure_parent(a.out);
  save_benchmark(result.benchmark, a.out);
  const fs::path log = a.log.empty() ? fs::path(a.out).replace_extension(".rejections.json") : fs::path(a.log);
  ensure_parent(log);
  write_file_atomic(log, dump_canonical(curation_log_json(result, opts)));
  fmt::print("{} accepted, {} rejected\n", result.benchmark.instances.size(), result.rejections.size());
  for (const auto& r : result.rejections) fmt::print("  {}: {} ({})\n", r.id, to_string(r.reason.code), r.reason.detail);
  return 0;
}

int cmd_stats(const StatsArgs& a) {
  const Benchmark benchmark = read_benchmark(a.benchmark);
  std::size_t rows = 0, cells = 0, non_key_cells = 0, tokens = 0;
  double popularity = 0.0, numeric = 0.0;
  json per = json::object();
  for (const auto& inst : benchmark.instances) {
    const auto s = table_stats(inst.table, inst.description);
    rows += s.num_rows;
    cells += s.num_cells;
    non_key_cells += s.num_rows * inst.table.non_key_indices().size();
    tokens += s.token_estimate;
    popularity += inst.popularity;
    numeric += s.numeric_ratio;
    per[inst.id] = {{"num_rows", s.num_rows},
                    {"num_cols", s.num_cols},
                    {"num_cells", s.num_cells},
                    {"numeric_ratio", s.numeric_ratio},
                    {"token_estimate", s.token_estimate}};
  }
  const double n = benchmark.instances.empty() ? 1.0 : static_cast<double>(benchmark.instances.size());
  const json out{{"fingerprint", benchmark_fingerprint(benchmark)},
                 {"tables", benchmark.instances.size()},
                 {"total_rows", rows},
                 {"total_cells", cells},
                 {"total_non_key_cells", non_key_cells},
                 {"mean_cells", static_cast<double>(cells) / n},
                 {"mean_numeric_ratio", numeric / n},
                 {"mean_popularity", popularity / n},
                 {"mean_token_estimate", static_cast<double>(tokens) / n},
                 {"per_table", per}};
  if (a.out.empty()) {
    std::cout << dump_canonical(out);
  } else {
    ensure_parent(a.out);
    write_file_atomic(a.out, dump_canonical(out));
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Relational table generation and evaluation harness"};
  app.set_config("--config", "", "Read options from a TOML/INI file");
  app.require_subcommand(1);
  std::uint64_t seed = 0;
  app.add_option("--seed", seed, "Seed for all randomness (oracle corruption)");

  const std::vector<std::string> methods{"full-table", "row-by-row", "cell-by-cell"};
  const std::vector<std::string> scenarios{"baseline", "example-row", "oracle-keys"};
  const std::vector<std::string> formats{"csv", "json"};

  GenerateArgs ga;
  auto* gen = app.add_subcommand("generate", "Generate tables for every benchmark instance");
  gen->add_option("--benchmark", ga.benchmark, "Benchmark JSON file")->required();
  gen->add_option("--method", ga.method)->check(CLI::IsMember(methods));
  gen->add_option("--scenario", ga.scenario)->check(CLI::IsMember(scenarios));
  gen->add_option("--client", ga.client)->check(CLI::IsMember({"oracle", "scripted", "openai"}));
  gen->add_option("--out", ga.out, "Run output directory")->required();
  gen->add_option("--cache-dir", ga.cache_dir, "Response cache directory");
  gen->add_option("--transcript", ga.transcript, "Prompt/response transcript for the scripted client");
  gen->add_option("--split", ga.split)->check(CLI::IsMember({"eval", "dev"}));
  gen->add_option("--corruption-rate", ga.corruption_rate, "Oracle client corruption probability");
  gen->add_option("--parallelism", ga.parallelism)->check(CLI::PositiveNumber);
  gen->add_flag("--no-dedup", ga.no_dedup, "Keep repeated generated keys");
  gen->add_flag("--record-timings", ga.record_timings, "Store latencies in records");
  gen->add_option("--endpoint", ga.model.endpoint_url);
  gen->add_option("--model", ga.model.model_name);
  gen->add_option("--credential-env", ga.model.credential_env, "Environment variable holding the API key");
  gen->add_option("--family", ga.model.family, "Model family; selects a prompt wrapper if one exists");
  gen->add_option("--api-style", ga.api_style)->check(CLI::IsMember({"chat", "completion"}));
  gen->add_option("--temperature", ga.model.temperature);
  gen->add_option("--max-output-tokens", ga.model.max_output_tokens);
  gen->add_option("--timeout-ms", ga.timeout_ms);
  gen->add_option("--max-retries", ga.model.max_retries);
  gen->add_option("--rate-limit-rpm", ga.model.rate_limit_rpm);
  gen->add_option("--max-concurrency", ga.model.max_concurrency);

  EvaluateArgs ea;
  auto* ev = app.add_subcommand("evaluate", "Score predicted tables against the gold benchmark");
  ev->add_option("--predictions", ea.predictions, "Run directory or tables directory")->required();
  ev->add_option("--benchmark", ea.benchmark)->required();
  ev->add_option("--report", ea.report)->required();
  ev->add_option("--format", ea.format)->check(CLI::IsMember(formats));
  ev->add_option("--tolerance", ea.tolerance, "Relative tolerance for numeric cells");
  ev->add_flag("--exact-key-cells", ea.exact_key_cells, "Count key cells by normalized text only");

  AnalyzeArgs aa;
  auto* an = app.add_subcommand("analyze", "Bucket F1 by a table property");
  an->add_option("--report", aa.report, "Evaluation report (JSON)")->required();
  an->add_option("--property", aa.property);
  an->add_option("--edges", aa.edges, "Bucket edges, ascending");
  an->add_option("--runs", aa.runs, "Run directories for a cost report");
  an->add_option("--out", aa.out)->required();
  an->add_option("--cost-out", aa.cost_out);
  an->add_option("--format", aa.format)->check(CLI::IsMember(formats));

  CurateArgs ca;
  auto* cu = app.add_subcommand("curate", "Filter candidate tables into a benchmark");
  cu->add_option("--candidates", ca.candidates)->required()->check(CLI::ExistingFile);
  cu->add_option("--descriptions", ca.descriptions, "CSV of id,description")->required()->check(CLI::ExistingFile);
  cu->add_option("--pageviews", ca.pageviews, "Pageviews fixture JSON");
  cu->add_option("--pageviews-url", ca.pageviews_url, "Wikimedia REST base URL");
  cu->add_option("--out", ca.out, "Benchmark file to write")->required();
  cu->add_option("--log", ca.log, "Rejection log (JSON)");
  cu->add_option("--window-first", ca.window_first);
  cu->add_option("--window-last", ca.window_last);
  cu->add_option("--fill-threshold", ca.fill_threshold);
  cu->add_option("--max-median-tokens", ca.max_median_tokens);

  CostArgs co;
  auto* cost = app.add_subcommand("cost-report", "Token totals per method");
  cost->add_option("--runs", co.runs)->required();
  cost->add_option("--out", co.out)->required();
  cost->add_option("--format", co.format)->check(CLI::IsMember(formats));

  StatsArgs sa;
  auto* st = app.add_subcommand("stats", "Aggregate statistics of a benchmark file");
  st->add_option("--benchmark", sa.benchmark)->required();
  st->add_option("--out", sa.out);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*gen) return cmd_generate(ga, seed);
    if (*ev) return cmd_evaluate(ea);
    if (*an) return cmd_analyze(aa);
    if (*cu) return cmd_curate(ca);
    if (*cost) return cmd_cost(co);
    if (*st) return cmd_stats(sa);
  } catch (const ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return 2;
  } catch (const GatewayError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return e.kind() == GatewayErrorKind::missing_credential ? 2 : 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
