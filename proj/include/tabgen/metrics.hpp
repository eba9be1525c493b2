#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "tabgen/matching.hpp"
#include "tabgen/table.hpp"

namespace tabgen {

// Generated-row index -> gold-row index, injective in both directions.
struct Alignment {
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  std::vector<std::size_t> unmatched_pred;
  std::vector<std::size_t> unmatched_gold;
};

struct MetricTriple {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;

  // Ratios with a zero denominator are 0; F1 is 0 when P + R = 0.
  static MetricTriple from_counts(std::size_t correct, std::size_t generated, std::size_t gold);
  bool operator==(const MetricTriple&) const = default;
};

struct CountedTriple {
  MetricTriple metrics;
  std::size_t correct = 0;
  std::size_t generated = 0;
  std::size_t gold = 0;
};

struct TableEvaluation {
  MetricTriple keys;
  MetricTriple non_keys;
  MetricTriple overall;
  std::size_t phi = 0;
  std::size_t psi = 0;
  std::size_t tau = 0;
  std::size_t generated_rows = 0;
  std::size_t gold_rows = 0;
  std::size_t generated_non_key_cells = 0;
  std::size_t gold_non_key_cells = 0;
  std::size_t generated_cells = 0;
  std::size_t gold_cells = 0;

  bool operator==(const TableEvaluation&) const = default;
};

struct BenchmarkEvaluation {
  // Keyed by instance id; std::map keeps report order deterministic.
  std::map<std::string, TableEvaluation> per_table;
  MetricTriple macro_keys;
  MetricTriple macro_non_keys;
  MetricTriple macro_overall;
};

// Throws ValidationError when the schemas differ.
Alignment align_rows(const RelationalTable& pred, const RelationalTable& gold);

CountedTriple evaluate_keys(const Alignment& alignment, const RelationalTable& pred, const RelationalTable& gold);
CountedTriple evaluate_non_keys(const Alignment& alignment, const RelationalTable& pred, const RelationalTable& gold,
                                const MatchRule& rule);
CountedTriple evaluate_table(const Alignment& alignment, const RelationalTable& pred, const RelationalTable& gold,
                             const MatchRule& rule);

// Aligns and scores one table. When exclude_key is set, the gold row with that
// key tuple and every generated row carrying it are dropped first.
TableEvaluation evaluate(const RelationalTable& pred, const RelationalTable& gold, const MatchRule& rule,
                         const std::optional<KeyTuple>& exclude_key = std::nullopt);

TableEvaluation evaluate_instance(const RelationalTable& pred, const BenchmarkInstance& instance,
                                  const MatchRule& rule, const std::optional<KeyTuple>& exclude_key = std::nullopt);

// Key tuple of the first gold row, the row shown to the model in the
// example-row scenario.
KeyTuple example_row_key(const BenchmarkInstance& instance);

// Unweighted mean over tables. Throws Error on an empty input.
BenchmarkEvaluation aggregate(std::map<std::string, TableEvaluation> per_table);

struct EvaluationJob {
  const BenchmarkInstance* instance = nullptr;
  const RelationalTable* prediction = nullptr;
  std::optional<KeyTuple> exclude_key;
};

// Reference path: one job after another.
std::map<std::string, TableEvaluation> evaluate_jobs_serial(const std::vector<EvaluationJob>& jobs,
                                                            const MatchRule& rule);
// OpenMP path over jobs; returns exactly what the serial path would.
std::map<std::string, TableEvaluation> evaluate_jobs_parallel(const std::vector<EvaluationJob>& jobs,
                                                              const MatchRule& rule);

}  // namespace tabgen
