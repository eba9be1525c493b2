#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "tabgen/metrics.hpp"
#include "tabgen/pipeline.hpp"

namespace tabgen {

enum class TableProperty { num_cells, numeric_ratio, popularity };

std::string_view to_string(TableProperty p);
// Throws ConfigError for unknown names.
TableProperty parse_property(std::string_view text);

// num_cells {0,100,250,500,1000,inf}; numeric_ratio {0,0.25,0.5,0.75,1};
// popularity {0,10,100,...,1e7,inf}.
std::vector<double> default_edges(TableProperty p);

struct BucketPoint {
  double lo = 0.0;
  double hi = 0.0;
  std::size_t count = 0;
  // Absent when no table fell into the bucket.
  std::optional<double> keys_f1;
  std::optional<double> non_keys_f1;
  std::optional<double> overall_f1;

  bool operator==(const BucketPoint&) const = default;
};

struct BucketSeries {
  TableProperty property = TableProperty::num_cells;
  std::vector<double> edges;
  std::vector<BucketPoint> points;

  bool operator==(const BucketSeries&) const = default;
};

struct PropertySample {
  TableEvaluation evaluation;
  double value = 0.0;
};

// Buckets are [e_i, e_{i+1}); the last one also includes its upper edge.
// Values outside [e_0, e_n] raise Error, as do fewer than two or
// non-ascending edges. No samples yields a series with no points.
BucketSeries bucket_metrics(const std::vector<PropertySample>& samples, TableProperty property,
                            const std::vector<double>& edges);

double property_value(TableProperty p, const TableStats& stats, double popularity);

struct RunRecords {
  Method method = Method::full_table;
  Scenario scenario = Scenario::baseline;
  std::string benchmark;
  std::vector<GenerationRecord> records;
};

// Reads run_manifest.json and records/*.json from a run directory.
RunRecords load_run(const std::filesystem::path& run_dir);

struct CostTotals {
  std::size_t input_tokens = 0;
  std::size_t output_tokens = 0;
  std::size_t requests = 0;
  // "provider", "approximate", "mixed" or "none".
  std::string counter = "none";

  bool operator==(const CostTotals&) const = default;
};

struct CostReport {
  // Keyed by "<method>" or "<method>/<scenario>" for non-baseline runs.
  std::map<std::string, CostTotals> per_method;
  std::map<std::string, std::map<std::string, CostTotals>> per_instance;

  bool operator==(const CostReport&) const = default;
};

// Throws Error when runs come from different benchmarks.
CostReport cost_report(const std::vector<RunRecords>& runs);

enum class ReportFormat { csv, json };

nlohmann::json series_to_json(const BucketSeries& series);
BucketSeries series_from_json(const nlohmann::json& j);
std::string series_to_csv(const BucketSeries& series);

nlohmann::json cost_to_json(const CostReport& report);
CostReport cost_from_json(const nlohmann::json& j);
std::string cost_to_csv(const CostReport& report);

void emit_report(const BucketSeries& series, const std::filesystem::path& path, ReportFormat format);
void emit_report(const CostReport& report, const std::filesystem::path& path, ReportFormat format);

// Evaluation report (per-table nine metrics, counts, stats; macro row).
struct ReportRow {
  std::string id;
  TableEvaluation evaluation;
  TableStats stats;
  double popularity = 0.0;
};

nlohmann::json evaluation_report_json(const std::vector<ReportRow>& rows, const BenchmarkEvaluation& macro);
std::string evaluation_report_csv(const std::vector<ReportRow>& rows, const BenchmarkEvaluation& macro);
// Per-table rows parsed back from evaluation_report_json output.
std::vector<ReportRow> report_rows_from_json(const nlohmann::json& j);

}  // namespace tabgen
