#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

namespace tabgen {

// Raw cell text as read, or std::nullopt for an explicit null. Normalization
// is the matching module's job; nothing here rewrites cell text.
using CellValue = std::optional<std::string>;

// One row, aligned with the owning table's column order.
using Row = std::vector<CellValue>;

struct ColumnSpec {
  std::string name;
  bool is_key = false;
  // Column holds numbers or dates.
  bool is_numeric = false;

  bool operator==(const ColumnSpec&) const = default;
};

class RelationalTable {
 public:
  RelationalTable() = default;

  // Throws ValidationError on empty/duplicate column names or ragged rows.
  explicit RelationalTable(std::vector<ColumnSpec> columns, std::vector<Row> rows = {});

  const std::vector<ColumnSpec>& columns() const noexcept { return columns_; }
  const std::vector<Row>& rows() const noexcept { return rows_; }
  std::size_t num_rows() const noexcept { return rows_.size(); }
  std::size_t num_cols() const noexcept { return columns_.size(); }

  // Indices in schema order.
  const std::vector<std::size_t>& key_indices() const noexcept { return key_indices_; }
  const std::vector<std::size_t>& non_key_indices() const noexcept { return non_key_indices_; }
  std::vector<std::string> column_names() const;
  std::vector<std::string> key_column_names() const;
  std::optional<std::size_t> column_index(std::string_view name) const;

  // Same column names, order and flags.
  bool same_schema(const RelationalTable& other) const { return columns_ == other.columns_; }

  // Copy of this table with a different row set and the same schema.
  RelationalTable with_rows(std::vector<Row> rows) const;

  // Gold invariants: at least one key column, no null key cell, unique key
  // tuples. Throws ValidationError tagged with instance_id.
  void validate_gold(const std::string& instance_id) const;

  bool operator==(const RelationalTable&) const = default;

 private:
  std::vector<ColumnSpec> columns_;
  std::vector<Row> rows_;
  std::vector<std::size_t> key_indices_;
  std::vector<std::size_t> non_key_indices_;
};

enum class RowOrigin { gold, generated };

// Normalized key-cell texts in schema order. A generated row with a null key
// cell yields an unmatchable tuple that never compares equal to anything.
struct KeyTuple {
  std::vector<std::string> parts;
  bool matchable = true;

  bool operator==(const KeyTuple& other) const {
    return matchable && other.matchable && parts == other.parts;
  }
};

struct KeyTupleHash {
  std::size_t operator()(const KeyTuple& k) const noexcept;
};

// Throws ValidationError for a null key cell in a gold row.
KeyTuple key_tuple(const Row& row, std::span<const std::size_t> key_indices, RowOrigin origin);

// Key cells count as null when they are the null marker or a nullish alias
// under the default match rule ("", "n/a", ...).
bool is_null_key_cell(const CellValue& cell);

enum class Split { eval, dev };

std::string_view to_string(Split split);
Split parse_split(std::string_view text);

struct BenchmarkInstance {
  std::string id;
  std::string description;
  RelationalTable table;
  double popularity = 0.0;
  std::optional<std::string> source_page;
  Split split = Split::eval;

  bool operator==(const BenchmarkInstance&) const = default;
};

struct Benchmark {
  std::vector<BenchmarkInstance> instances;

  const BenchmarkInstance* find(std::string_view id) const;
  bool operator==(const Benchmark&) const = default;
};

// Instance-level checks: non-empty id and description, non-negative
// popularity, gold table invariants.
void validate_instance(const BenchmarkInstance& instance);

// JSON codecs for the benchmark file format. Object keys are emitted sorted
// and rows in column order so serialization is canonical.
nlohmann::json columns_to_json(const std::vector<ColumnSpec>& columns);
std::vector<ColumnSpec> columns_from_json(const nlohmann::json& j);
nlohmann::json rows_to_json(const RelationalTable& table);
RelationalTable table_from_json(const nlohmann::json& columns, const nlohmann::json& rows);

nlohmann::json instance_to_json(const BenchmarkInstance& instance);
BenchmarkInstance instance_from_json(const nlohmann::json& j);
nlohmann::json benchmark_to_json(const Benchmark& benchmark);
// Validates every instance and rejects duplicate ids.
Benchmark benchmark_from_json(const nlohmann::json& j);

Benchmark load_benchmark(const std::filesystem::path& path);
void save_benchmark(const Benchmark& benchmark, const std::filesystem::path& path);

// Canonical text used for both files and fingerprints.
std::string dump_canonical(const nlohmann::json& j);

struct TableStats {
  std::size_t num_rows = 0;
  std::size_t num_cols = 0;
  std::size_t num_cells = 0;
  double numeric_ratio = 0.0;
  std::size_t token_estimate = 0;
};

// token_estimate counts tokens of the description plus the compact JSON
// rendering of the table (column names and rows) with the local counter.
TableStats table_stats(const RelationalTable& table, std::string_view description);

}  // namespace tabgen
