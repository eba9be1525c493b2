#include "tabgen/table.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <unordered_set>

#include "tabgen/error.hpp"
#include "tabgen/matching.hpp"
#include "tabgen/tokens.hpp"

namespace tabgen {

using nlohmann::json;

RelationalTable::RelationalTable(std::vector<ColumnSpec> columns, std::vector<Row> rows)
    : columns_(std::move(columns)), rows_(std::move(rows)) {
  std::unordered_set<std::string> seen;
  for (std::size_t i = 0; i < columns_.size(); ++i) {
    const auto& c = columns_[i];
    if (c.name.empty()) throw ValidationError("", "column " + std::to_string(i) + " has an empty name");
    if (!seen.insert(c.name).second) throw ValidationError("", "duplicate column name '" + c.name + "'");
    (c.is_key ? key_indices_ : non_key_indices_).push_back(i);
  }
  for (std::size_t r = 0; r < rows_.size(); ++r) {
    if (rows_[r].size() != columns_.size()) {
      throw ValidationError("", "row " + std::to_string(r) + " has " + std::to_string(rows_[r].size()) +
                                    " cells, expected " + std::to_string(columns_.size()));
    }
  }
}

std::vector<std::string> RelationalTable::column_names() const {
  std::vector<std::string> names;
  names.reserve(columns_.size());
  for (const auto& c : columns_) names.push_back(c.name);
  return names;
}

std::vector<std::string> RelationalTable::key_column_names() const {
  std::vector<std::string> names;
  for (auto i : key_indices_) names.push_back(columns_[i].name);
  return names;
}

std::optional<std::size_t> RelationalTable::column_index(std::string_view name) const {
  for (std::size_t i = 0; i < columns_.size(); ++i) {
    if (columns_[i].name == name) return i;
  }
  return std::nullopt;
}

RelationalTable RelationalTable::with_rows(std::vector<Row> rows) const {
  return RelationalTable(columns_, std::move(rows));
}

void RelationalTable::validate_gold(const std::string& instance_id) const {
  if (key_indices_.empty()) throw ValidationError(instance_id, "gold table has no key column");
  std::unordered_set<KeyTuple, KeyTupleHash> seen;
  for (std::size_t r = 0; r < rows_.size(); ++r) {
    KeyTuple k;
    try {
      k = key_tuple(rows_[r], key_indices_, RowOrigin::gold);
    } catch (const ValidationError& e) {
      throw ValidationError(instance_id, "row " + std::to_string(r) + ": " + e.what());
    }
    if (!seen.insert(k).second) {
      std::string shown;
      for (auto i : key_indices_) {
        if (!shown.empty()) shown += ", ";
        shown += *rows_[r][i];
      }
      throw ValidationError(instance_id, "duplicate gold key tuple (" + shown + ") at row " + std::to_string(r));
    }
  }
}

std::size_t KeyTupleHash::operator()(const KeyTuple& k) const noexcept {
  std::size_t h = k.matchable ? 0x9e3779b97f4a7c15ULL : 0;
  for (const auto& p : k.parts) h ^= std::hash<std::string>{}(p) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
  return h;
}

bool is_null_key_cell(const CellValue& cell) { return is_nullish(cell, MatchRule{}); }

KeyTuple key_tuple(const Row& row, std::span<const std::size_t> key_indices, RowOrigin origin) {
  KeyTuple k;
  k.parts.reserve(key_indices.size());
  for (auto i : key_indices) {
    const auto& cell = row.at(i);
    if (is_null_key_cell(cell)) {
      if (origin == RowOrigin::gold) throw ValidationError("", "null key cell in gold row");
      k.matchable = false;
      k.parts.emplace_back();
      continue;
    }
    k.parts.push_back(normalize_for_key(*cell));
  }
  return k;
}

std::string_view to_string(Split split) { return split == Split::eval ? "eval" : "dev"; }

Split parse_split(std::string_view text) {
  if (text == "eval") return Split::eval;
  if (text == "dev") return Split::dev;
  throw ValidationError("", "unknown split '" + std::string(text) + "'");
}

const BenchmarkInstance* Benchmark::find(std::string_view id) const {
  for (const auto& inst : instances) {
    if (inst.id == id) return &inst;
  }
  return nullptr;
}

void validate_instance(const BenchmarkInstance& instance) {
  if (instance.id.empty()) throw ValidationError("", "instance id is empty");
  if (instance.description.empty()) throw ValidationError(instance.id, "description is empty");
  if (!(instance.popularity >= 0.0) || !std::isfinite(instance.popularity)) {
    throw ValidationError(instance.id, "popularity must be a non-negative number");
  }
  instance.table.validate_gold(instance.id);
}

json columns_to_json(const std::vector<ColumnSpec>& columns) {
  json out = json::array();
  for (const auto& c : columns) out.push_back({{"name", c.name}, {"is_key", c.is_key}, {"is_numeric", c.is_numeric}});
  return out;
}

std::vector<ColumnSpec> columns_from_json(const json& j) {
  if (!j.is_array()) throw ValidationError("", "'columns' must be an array");
  std::vector<ColumnSpec> columns;
  for (const auto& c : j) {
    if (!c.is_object() || !c.contains("name") || !c["name"].is_string()) {
      throw ValidationError("", "column entries need a string 'name'");
    }
    ColumnSpec spec{c["name"].get<std::string>()};
    if (c.contains("is_key")) {
      if (!c["is_key"].is_boolean()) throw ValidationError("", "'is_key' must be a boolean");
      spec.is_key = c["is_key"].get<bool>();
    }
    if (c.contains("is_numeric")) {
      if (!c["is_numeric"].is_boolean()) throw ValidationError("", "'is_numeric' must be a boolean");
      spec.is_numeric = c["is_numeric"].get<bool>();
    }
    columns.push_back(std::move(spec));
  }
  return columns;
}

json rows_to_json(const RelationalTable& table) {
  json rows = json::array();
  for (const auto& row : table.rows()) {
    json r = json::array();
    for (const auto& cell : row) r.push_back(cell ? json(*cell) : json(nullptr));
    rows.push_back(std::move(r));
  }
  return rows;
}

RelationalTable table_from_json(const json& columns, const json& rows) {
  auto specs = columns_from_json(columns);
  if (!rows.is_array()) throw ValidationError("", "'rows' must be an array");
  std::vector<Row> out;
  out.reserve(rows.size());
  for (const auto& r : rows) {
    if (!r.is_array()) throw ValidationError("", "each row must be an array");
    Row row;
    row.reserve(r.size());
    for (const auto& cell : r) {
      if (cell.is_null()) {
        row.emplace_back(std::nullopt);
      } else if (cell.is_string()) {
        row.emplace_back(cell.get<std::string>());
      } else {
        throw ValidationError("", "cells must be strings or null");
      }
    }
    out.push_back(std::move(row));
  }
  return RelationalTable(std::move(specs), std::move(out));
}

namespace {

// Integral popularity values are written without a fractional part so that
// 8449 stays 8449 across a round trip.
json number_to_json(double v) {
  if (std::floor(v) == v && std::fabs(v) < 9.0e15) return json(static_cast<std::int64_t>(v));
  return json(v);
}

std::string field_string(const json& j, const char* key, const std::string& id) {
  if (!j.contains(key) || !j[key].is_string()) throw ValidationError(id, std::string("missing string field '") + key + "'");
  return j[key].get<std::string>();
}

}  // namespace

json instance_to_json(const BenchmarkInstance& instance) {
  json j;
  j["id"] = instance.id;
  j["description"] = instance.description;
  j["split"] = std::string(to_string(instance.split));
  j["popularity"] = number_to_json(instance.popularity);
  j["source_page"] = instance.source_page ? json(*instance.source_page) : json(nullptr);
  j["columns"] = columns_to_json(instance.table.columns());
  j["rows"] = rows_to_json(instance.table);
  return j;
}

BenchmarkInstance instance_from_json(const json& j) {
  if (!j.is_object()) throw ValidationError("", "instance must be an object");
  const std::string id = j.contains("id") && j["id"].is_string() ? j["id"].get<std::string>() : std::string{};
  BenchmarkInstance inst;
  inst.id = field_string(j, "id", id);
  inst.description = field_string(j, "description", id);
  try {
    inst.split = parse_split(field_string(j, "split", id));
    if (!j.contains("popularity") || !j["popularity"].is_number()) throw ValidationError("", "missing numeric 'popularity'");
    inst.popularity = j["popularity"].get<double>();
    if (j.contains("source_page") && !j["source_page"].is_null()) {
      if (!j["source_page"].is_string()) throw ValidationError("", "'source_page' must be a string or null");
      inst.source_page = j["source_page"].get<std::string>();
    }
    if (!j.contains("columns") || !j.contains("rows")) throw ValidationError("", "missing 'columns' or 'rows'");
    inst.table = table_from_json(j["columns"], j["rows"]);
  } catch (const ValidationError& e) {
    if (!e.instance_id().empty()) throw;
    throw ValidationError(id, e.what());
  }
  validate_instance(inst);
  return inst;
}

json benchmark_to_json(const Benchmark& benchmark) {
  json instances = json::array();
  for (const auto& inst : benchmark.instances) instances.push_back(instance_to_json(inst));
  return json{{"instances", std::move(instances)}};
}

Benchmark benchmark_from_json(const json& j) {
  if (!j.is_object() || !j.contains("instances") || !j["instances"].is_array()) {
    throw ValidationError("", "top level must be an object with an 'instances' array");
  }
  Benchmark b;
  std::unordered_set<std::string> ids;
  for (const auto& item : j["instances"]) {
    auto inst = instance_from_json(item);
    if (!ids.insert(inst.id).second) throw ValidationError(inst.id, "duplicate instance id");
    b.instances.push_back(std::move(inst));
  }
  return b;
}

std::string dump_canonical(const json& j) { return j.dump(2) + "\n"; }

Benchmark load_benchmark(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read benchmark file " + path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ValidationError("", path.string() + ": " + e.what());
  }
  return benchmark_from_json(j);
}

void save_benchmark(const Benchmark& benchmark, const std::filesystem::path& path) {
  const std::string text = dump_canonical(benchmark_to_json(benchmark));
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write benchmark file " + path.string());
  out << text;
  if (!out) throw IoError("write failed for " + path.string());
}

TableStats table_stats(const RelationalTable& table, std::string_view description) {
  TableStats s;
  s.num_rows = table.num_rows();
  s.num_cols = table.num_cols();
  s.num_cells = s.num_rows * s.num_cols;
  std::size_t numeric = 0;
  for (const auto& c : table.columns()) numeric += c.is_numeric ? 1 : 0;
  s.numeric_ratio = s.num_cols == 0 ? 0.0 : static_cast<double>(numeric) / static_cast<double>(s.num_cols);
  const json compact{{"columns", table.column_names()}, {"rows", rows_to_json(table)}};
  s.token_estimate = count_tokens(description) + count_tokens(compact.dump());
  return s;
}

}  // namespace tabgen
