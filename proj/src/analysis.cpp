#include "tabgen/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <fmt/format.h>

#include "tabgen/util.hpp"

namespace tabgen {

using nlohmann::json;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

json edge_to_json(double v) {
  if (std::isinf(v)) return v > 0 ? json("inf") : json("-inf");
  return json(v);
}

double edge_from_json(const json& j) {
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "inf") return kInf;
    if (s == "-inf") return -kInf;
    throw Error("bad bucket edge '" + s + "'");
  }
  return j.get<double>();
}

json optional_number(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

std::optional<double> optional_from_json(const json& j) {
  if (j.is_null()) return std::nullopt;
  return j.get<double>();
}

std::string fmt_edge(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return fmt::format("{}", v);
}

std::string fmt_optional(const std::optional<double>& v) { return v ? fmt::format("{}", *v) : std::string{}; }

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string merge_counter(const std::string& a, const std::string& b) {
  if (a == "none") return b;
  if (b == "none") return a;
  return a == b ? a : "mixed";
}

void add_record(CostTotals& t, const GenerationRecord& r) {
  t.input_tokens += r.total_input_tokens;
  t.output_tokens += r.total_output_tokens;
  t.requests += r.responses.size();
  t.counter = merge_counter(t.counter, r.token_counter());
}

json totals_to_json(const CostTotals& t) {
  return json{{"input_tokens", t.input_tokens},
              {"output_tokens", t.output_tokens},
              {"requests", t.requests},
              {"counter", t.counter}};
}

CostTotals totals_from_json(const json& j) {
  return CostTotals{j.at("input_tokens").get<std::size_t>(), j.at("output_tokens").get<std::size_t>(),
                    j.at("requests").get<std::size_t>(), j.at("counter").get<std::string>()};
}

json triple_json(const MetricTriple& m) {
  return json{{"precision", m.precision}, {"recall", m.recall}, {"f1", m.f1}};
}

MetricTriple triple_from_json(const json& j) {
  return MetricTriple{j.at("precision").get<double>(), j.at("recall").get<double>(), j.at("f1").get<double>()};
}

std::string metric(double v) { return fmt::format("{:.6f}", v); }

void write_text(const std::filesystem::path& path, const std::string& text) {
  try {
    write_file_atomic(path, text);
  } catch (const std::filesystem::filesystem_error& e) {
    throw IoError(e.what());
  }
}

}  // namespace

std::string_view to_string(TableProperty p) {
  switch (p) {
    case TableProperty::num_cells: return "num_cells";
    case TableProperty::numeric_ratio: return "numeric_ratio";
    case TableProperty::popularity: return "popularity";
  }
  return "num_cells";
}

TableProperty parse_property(std::string_view text) {
  for (auto p : {TableProperty::num_cells, TableProperty::numeric_ratio, TableProperty::popularity}) {
    if (to_string(p) == text) return p;
  }
  throw ConfigError("unknown property '" + std::string(text) + "' (num_cells, numeric_ratio, popularity)");
}

std::vector<double> default_edges(TableProperty p) {
  switch (p) {
    case TableProperty::num_cells: return {0, 100, 250, 500, 1000, kInf};
    case TableProperty::numeric_ratio: return {0, 0.25, 0.5, 0.75, 1.0};
    case TableProperty::popularity: {
      std::vector<double> e{0};
      for (double d = 10; d <= 1e7; d *= 10) e.push_back(d);
      e.push_back(kInf);
      return e;
    }
  }
  return {};
}

double property_value(TableProperty p, const TableStats& stats, double popularity) {
  switch (p) {
    case TableProperty::num_cells: return static_cast<double>(stats.num_cells);
    case TableProperty::numeric_ratio: return stats.numeric_ratio;
    case TableProperty::popularity: return popularity;
  }
  return 0.0;
}

BucketSeries bucket_metrics(const std::vector<PropertySample>& samples, TableProperty property,
                            const std::vector<double>& edges) {
  if (edges.size() < 2) throw Error("need at least two bucket edges");
  for (std::size_t i = 1; i < edges.size(); ++i) {
    if (!(edges[i] > edges[i - 1])) throw Error("bucket edges must be strictly ascending");
  }
  BucketSeries series;
  series.property = property;
  series.edges = edges;
  if (samples.empty()) return series;

  const std::size_t n = edges.size() - 1;
  std::vector<std::vector<const TableEvaluation*>> members(n);
  for (const auto& s : samples) {
    if (!(s.value >= edges.front()) || s.value > edges.back()) {
      throw Error(fmt::format("{} value {} is outside the bucket range", to_string(property), s.value));
    }
    auto it = std::upper_bound(edges.begin(), edges.end(), s.value);
    std::size_t b = static_cast<std::size_t>(it - edges.begin()) - 1;
    if (b >= n) b = n - 1;  // value equals the top edge
    members[b].push_back(&s.evaluation);
  }
  for (std::size_t b = 0; b < n; ++b) {
    BucketPoint pt;
    pt.lo = edges[b];
    pt.hi = edges[b + 1];
    pt.count = members[b].size();
    if (pt.count > 0) {
      double k = 0, nk = 0, o = 0;
      for (const auto* e : members[b]) {
        k += e->keys.f1;
        nk += e->non_keys.f1;
        o += e->overall.f1;
      }
      const auto c = static_cast<double>(pt.count);
      pt.keys_f1 = k / c;
      pt.non_keys_f1 = nk / c;
      pt.overall_f1 = o / c;
    }
    series.points.push_back(pt);
  }
  return series;
}

RunRecords load_run(const std::filesystem::path& run_dir) {
  RunRecords run;
  json manifest;
  try {
    manifest = json::parse(read_text_file(run_dir / "run_manifest.json"));
    run.method = parse_method(manifest.at("method").get<std::string>());
    run.scenario = parse_scenario(manifest.at("scenario").get<std::string>());
    run.benchmark = manifest.at("benchmark").get<std::string>();
  } catch (const json::exception& e) {
    throw ValidationError("", run_dir.string() + ": malformed run manifest: " + e.what());
  }
  std::vector<std::filesystem::path> files;
  const auto records_dir = run_dir / "records";
  if (std::filesystem::is_directory(records_dir)) {
    for (const auto& entry : std::filesystem::directory_iterator(records_dir)) {
      if (entry.path().extension() == ".json") files.push_back(entry.path());
    }
  }
  std::sort(files.begin(), files.end());
  for (const auto& f : files) {
    json j;
    try {
      j = json::parse(read_text_file(f));
    } catch (const json::parse_error& e) {
      throw ValidationError("", f.string() + ": " + e.what());
    }
    run.records.push_back(record_from_json(j));
  }
  return run;
}

CostReport cost_report(const std::vector<RunRecords>& runs) {
  CostReport report;
  for (const auto& run : runs) {
    if (run.benchmark != runs.front().benchmark) throw Error("cost report mixes runs over different benchmarks");
    std::string label(to_string(run.method));
    if (run.scenario != Scenario::baseline) label += "/" + std::string(to_string(run.scenario));
    auto& totals = report.per_method[label];
    for (const auto& r : run.records) {
      add_record(totals, r);
      add_record(report.per_instance[label][r.instance_id], r);
    }
  }
  return report;
}

json series_to_json(const BucketSeries& series) {
  json edges = json::array();
  for (double e : series.edges) edges.push_back(edge_to_json(e));
  json points = json::array();
  for (const auto& p : series.points) {
    points.push_back({{"bucket_lo", edge_to_json(p.lo)},
                      {"bucket_hi", edge_to_json(p.hi)},
                      {"keys_f1", optional_number(p.keys_f1)},
                      {"nonkeys_f1", optional_number(p.non_keys_f1)},
                      {"overall_f1", optional_number(p.overall_f1)},
                      {"n", p.count}});
  }
  return json{{"property", std::string(to_string(series.property))}, {"edges", edges}, {"points", points}};
}

BucketSeries series_from_json(const json& j) {
  BucketSeries s;
  s.property = parse_property(j.at("property").get<std::string>());
  for (const auto& e : j.at("edges")) s.edges.push_back(edge_from_json(e));
  for (const auto& p : j.at("points")) {
    BucketPoint pt;
    pt.lo = edge_from_json(p.at("bucket_lo"));
    pt.hi = edge_from_json(p.at("bucket_hi"));
    pt.keys_f1 = optional_from_json(p.at("keys_f1"));
    pt.non_keys_f1 = optional_from_json(p.at("nonkeys_f1"));
    pt.overall_f1 = optional_from_json(p.at("overall_f1"));
    pt.count = p.at("n").get<std::size_t>();
    s.points.push_back(pt);
  }
  return s;
}

std::string series_to_csv(const BucketSeries& series) {
  std::string out = "bucket_lo,bucket_hi,keys_f1,nonkeys_f1,overall_f1,n\n";
  for (const auto& p : series.points) {
    out += fmt::format("{},{},{},{},{},{}\n", fmt_edge(p.lo), fmt_edge(p.hi), fmt_optional(p.keys_f1),
                       fmt_optional(p.non_keys_f1), fmt_optional(p.overall_f1), p.count);
  }
  return out;
}

json cost_to_json(const CostReport& report) {
  json methods = json::object();
  for (const auto& [m, t] : report.per_method) methods[m] = totals_to_json(t);
  json instances = json::object();
  for (const auto& [m, per] : report.per_instance) {
    json inner = json::object();
    for (const auto& [id, t] : per) inner[id] = totals_to_json(t);
    instances[m] = std::move(inner);
  }
  return json{{"per_method", methods}, {"per_instance", instances}};
}

CostReport cost_from_json(const json& j) {
  CostReport r;
  for (const auto& [m, t] : j.at("per_method").items()) r.per_method[m] = totals_from_json(t);
  for (const auto& [m, per] : j.at("per_instance").items()) {
    for (const auto& [id, t] : per.items()) r.per_instance[m][id] = totals_from_json(t);
  }
  return r;
}

std::string cost_to_csv(const CostReport& report) {
  std::string out = "method,input_tokens,output_tokens,requests,counter\n";
  for (const auto& [m, t] : report.per_method) {
    out += fmt::format("{},{},{},{},{}\n", csv_field(m), t.input_tokens, t.output_tokens, t.requests, t.counter);
  }
  return out;
}

void emit_report(const BucketSeries& series, const std::filesystem::path& path, ReportFormat format) {
  write_text(path, format == ReportFormat::csv ? series_to_csv(series) : dump_canonical(series_to_json(series)));
}

void emit_report(const CostReport& report, const std::filesystem::path& path, ReportFormat format) {
  write_text(path, format == ReportFormat::csv ? cost_to_csv(report) : dump_canonical(cost_to_json(report)));
}

json evaluation_report_json(const std::vector<ReportRow>& rows, const BenchmarkEvaluation& macro) {
  json tables = json::array();
  for (const auto& r : rows) {
    const auto& e = r.evaluation;
    tables.push_back(
        {{"id", r.id},
         {"keys", triple_json(e.keys)},
         {"non_keys", triple_json(e.non_keys)},
         {"overall", triple_json(e.overall)},
         {"counts",
          {{"phi", e.phi},
           {"psi", e.psi},
           {"tau", e.tau},
           {"generated_rows", e.generated_rows},
           {"gold_rows", e.gold_rows},
           {"generated_non_key_cells", e.generated_non_key_cells},
           {"gold_non_key_cells", e.gold_non_key_cells},
           {"generated_cells", e.generated_cells},
           {"gold_cells", e.gold_cells}}},
         {"stats",
          {{"num_rows", r.stats.num_rows},
           {"num_cols", r.stats.num_cols},
           {"num_cells", r.stats.num_cells},
           {"numeric_ratio", r.stats.numeric_ratio},
           {"token_estimate", r.stats.token_estimate}}},
         {"popularity", r.popularity}});
  }
  return json{{"tables", tables},
              {"macro",
               {{"keys", triple_json(macro.macro_keys)},
                {"non_keys", triple_json(macro.macro_non_keys)},
                {"overall", triple_json(macro.macro_overall)},
                {"tables", macro.per_table.size()}}}};
}

std::vector<ReportRow> report_rows_from_json(const json& j) {
  std::vector<ReportRow> rows;
  try {
    for (const auto& t : j.at("tables")) {
      ReportRow r;
      r.id = t.at("id").get<std::string>();
      auto& e = r.evaluation;
      e.keys = triple_from_json(t.at("keys"));
      e.non_keys = triple_from_json(t.at("non_keys"));
      e.overall = triple_from_json(t.at("overall"));
      const auto& c = t.at("counts");
      e.phi = c.at("phi").get<std::size_t>();
      e.psi = c.at("psi").get<std::size_t>();
      e.tau = c.at("tau").get<std::size_t>();
      e.generated_rows = c.at("generated_rows").get<std::size_t>();
      e.gold_rows = c.at("gold_rows").get<std::size_t>();
      e.generated_non_key_cells = c.at("generated_non_key_cells").get<std::size_t>();
      e.gold_non_key_cells = c.at("gold_non_key_cells").get<std::size_t>();
      e.generated_cells = c.at("generated_cells").get<std::size_t>();
      e.gold_cells = c.at("gold_cells").get<std::size_t>();
      const auto& s = t.at("stats");
      r.stats.num_rows = s.at("num_rows").get<std::size_t>();
      r.stats.num_cols = s.at("num_cols").get<std::size_t>();
      r.stats.num_cells = s.at("num_cells").get<std::size_t>();
      r.stats.numeric_ratio = s.at("numeric_ratio").get<double>();
      r.stats.token_estimate = s.at("token_estimate").get<std::size_t>();
      r.popularity = t.at("popularity").get<double>();
      rows.push_back(std::move(r));
    }
  } catch (const json::exception& e) {
    throw ValidationError("", std::string("malformed evaluation report: ") + e.what());
  }
  return rows;
}

std::string evaluation_report_csv(const std::vector<ReportRow>& rows, const BenchmarkEvaluation& macro) {
  std::string out =
      "id,keys_recall,keys_precision,keys_f1,nonkeys_recall,nonkeys_precision,nonkeys_f1,"
      "overall_recall,overall_precision,overall_f1,phi,psi,tau,generated_rows,gold_rows,"
      "generated_nonkey_cells,gold_nonkey_cells,generated_cells,gold_cells\n";
  auto triple = [](const MetricTriple& m) {
    return metric(m.recall) + "," + metric(m.precision) + "," + metric(m.f1);
  };
  for (const auto& r : rows) {
    const auto& e = r.evaluation;
    out += fmt::format("{},{},{},{},{},{},{},{},{},{},{},{},{}\n", csv_field(r.id), triple(e.keys),
                       triple(e.non_keys), triple(e.overall), e.phi, e.psi, e.tau, e.generated_rows, e.gold_rows,
                       e.generated_non_key_cells, e.gold_non_key_cells, e.generated_cells, e.gold_cells);
  }
  out += fmt::format("macro,{},{},{},,,,,,,,,\n", triple(macro.macro_keys), triple(macro.macro_non_keys),
                     triple(macro.macro_overall));
  return out;
}

}  // namespace tabgen
