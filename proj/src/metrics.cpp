#include "tabgen/metrics.hpp"

#include <exception>
#include <unordered_map>

#include "tabgen/error.hpp"

namespace tabgen {

MetricTriple MetricTriple::from_counts(std::size_t correct, std::size_t generated, std::size_t gold) {
  MetricTriple m;
  m.precision = generated == 0 ? 0.0 : static_cast<double>(correct) / static_cast<double>(generated);
  m.recall = gold == 0 ? 0.0 : static_cast<double>(correct) / static_cast<double>(gold);
  const double sum = m.precision + m.recall;
  m.f1 = sum > 0.0 ? 2.0 * m.precision * m.recall / sum : 0.0;
  return m;
}

Alignment align_rows(const RelationalTable& pred, const RelationalTable& gold) {
  if (!pred.same_schema(gold)) throw ValidationError("", "generated table schema differs from the gold schema");

  std::unordered_map<KeyTuple, std::size_t, KeyTupleHash> gold_by_key;
  gold_by_key.reserve(gold.num_rows());
  for (std::size_t g = 0; g < gold.num_rows(); ++g) {
    gold_by_key.emplace(key_tuple(gold.rows()[g], gold.key_indices(), RowOrigin::gold), g);
  }

  Alignment a;
  std::vector<bool> gold_used(gold.num_rows(), false);
  for (std::size_t p = 0; p < pred.num_rows(); ++p) {
    const KeyTuple k = key_tuple(pred.rows()[p], pred.key_indices(), RowOrigin::generated);
    auto it = k.matchable ? gold_by_key.find(k) : gold_by_key.end();
    // First occurrence of a duplicated generated key wins.
    if (it != gold_by_key.end() && !gold_used[it->second]) {
      gold_used[it->second] = true;
      a.pairs.emplace_back(p, it->second);
    } else {
      a.unmatched_pred.push_back(p);
    }
  }
  for (std::size_t g = 0; g < gold.num_rows(); ++g) {
    if (!gold_used[g]) a.unmatched_gold.push_back(g);
  }
  return a;
}

CountedTriple evaluate_keys(const Alignment& alignment, const RelationalTable& pred, const RelationalTable& gold) {
  CountedTriple t;
  t.correct = alignment.pairs.size();
  t.generated = pred.num_rows();
  t.gold = gold.num_rows();
  t.metrics = MetricTriple::from_counts(t.correct, t.generated, t.gold);
  return t;
}

CountedTriple evaluate_non_keys(const Alignment& alignment, const RelationalTable& pred, const RelationalTable& gold,
                                const MatchRule& rule) {
  CountedTriple t;
  const auto& cols = gold.non_key_indices();
  for (const auto& [p, g] : alignment.pairs) {
    const auto& pr = pred.rows()[p];
    const auto& gr = gold.rows()[g];
    for (auto c : cols) t.correct += cells_match(pr[c], gr[c], rule) ? 1 : 0;
  }
  t.generated = pred.num_rows() * cols.size();
  t.gold = gold.num_rows() * cols.size();
  t.metrics = MetricTriple::from_counts(t.correct, t.generated, t.gold);
  return t;
}

CountedTriple evaluate_table(const Alignment& alignment, const RelationalTable& pred, const RelationalTable& gold,
                             const MatchRule& rule) {
  CountedTriple t;
  const std::size_t ncols = gold.num_cols();
  for (const auto& [p, g] : alignment.pairs) {
    const auto& pr = pred.rows()[p];
    const auto& gr = gold.rows()[g];
    for (std::size_t c = 0; c < ncols; ++c) {
      bool ok;
      if (gold.columns()[c].is_key && !rule.fuzzy_key_cells) {
        ok = pr[c] && gr[c] && normalize_for_key(*pr[c]) == normalize_for_key(*gr[c]);
      } else {
        ok = cells_match(pr[c], gr[c], rule);
      }
      t.correct += ok ? 1 : 0;
    }
  }
  t.generated = pred.num_rows() * ncols;
  t.gold = gold.num_rows() * ncols;
  t.metrics = MetricTriple::from_counts(t.correct, t.generated, t.gold);
  return t;
}

namespace {

RelationalTable drop_key(const RelationalTable& table, const KeyTuple& key, RowOrigin origin) {
  std::vector<Row> kept;
  kept.reserve(table.num_rows());
  for (const auto& row : table.rows()) {
    if (!(key_tuple(row, table.key_indices(), origin) == key)) kept.push_back(row);
  }
  return table.with_rows(std::move(kept));
}

}  // namespace

TableEvaluation evaluate(const RelationalTable& pred, const RelationalTable& gold, const MatchRule& rule,
                         const std::optional<KeyTuple>& exclude_key) {
  if (!pred.same_schema(gold)) throw ValidationError("", "generated table schema differs from the gold schema");
  if (exclude_key) {
    return evaluate(drop_key(pred, *exclude_key, RowOrigin::generated), drop_key(gold, *exclude_key, RowOrigin::gold),
                    rule);
  }
  const Alignment a = align_rows(pred, gold);
  const auto keys = evaluate_keys(a, pred, gold);
  const auto non_keys = evaluate_non_keys(a, pred, gold, rule);
  const auto overall = evaluate_table(a, pred, gold, rule);

  TableEvaluation e;
  e.keys = keys.metrics;
  e.non_keys = non_keys.metrics;
  e.overall = overall.metrics;
  e.phi = keys.correct;
  e.psi = non_keys.correct;
  e.tau = overall.correct;
  e.generated_rows = keys.generated;
  e.gold_rows = keys.gold;
  e.generated_non_key_cells = non_keys.generated;
  e.gold_non_key_cells = non_keys.gold;
  e.generated_cells = overall.generated;
  e.gold_cells = overall.gold;
  return e;
}

TableEvaluation evaluate_instance(const RelationalTable& pred, const BenchmarkInstance& instance,
                                  const MatchRule& rule, const std::optional<KeyTuple>& exclude_key) {
  return evaluate(pred, instance.table, rule, exclude_key);
}

KeyTuple example_row_key(const BenchmarkInstance& instance) {
  const auto& t = instance.table;
  if (t.num_rows() == 0) throw ValidationError(instance.id, "example-row scenario needs a non-empty gold table");
  return key_tuple(t.rows().front(), t.key_indices(), RowOrigin::gold);
}

namespace {

void accumulate(MetricTriple& sum, const MetricTriple& m) {
  sum.precision += m.precision;
  sum.recall += m.recall;
  sum.f1 += m.f1;
}

MetricTriple divided(MetricTriple m, double n) { return {m.precision / n, m.recall / n, m.f1 / n}; }

}  // namespace

BenchmarkEvaluation aggregate(std::map<std::string, TableEvaluation> per_table) {
  if (per_table.empty()) throw Error("cannot aggregate an empty set of evaluations");
  BenchmarkEvaluation b;
  for (const auto& [id, e] : per_table) {
    accumulate(b.macro_keys, e.keys);
    accumulate(b.macro_non_keys, e.non_keys);
    accumulate(b.macro_overall, e.overall);
  }
  const auto n = static_cast<double>(per_table.size());
  b.macro_keys = divided(b.macro_keys, n);
  b.macro_non_keys = divided(b.macro_non_keys, n);
  b.macro_overall = divided(b.macro_overall, n);
  b.per_table = std::move(per_table);
  return b;
}

std::map<std::string, TableEvaluation> evaluate_jobs_serial(const std::vector<EvaluationJob>& jobs,
                                                            const MatchRule& rule) {
  std::map<std::string, TableEvaluation> out;
  for (const auto& job : jobs) {
    out.emplace(job.instance->id, evaluate_instance(*job.prediction, *job.instance, rule, job.exclude_key));
  }
  return out;
}

std::map<std::string, TableEvaluation> evaluate_jobs_parallel(const std::vector<EvaluationJob>& jobs,
                                                              const MatchRule& rule) {
  std::vector<TableEvaluation> results(jobs.size());
  std::exception_ptr failure;
  const auto n = static_cast<std::ptrdiff_t>(jobs.size());

#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    try {
      const auto& job = jobs[static_cast<std::size_t>(i)];
      results[static_cast<std::size_t>(i)] =
          evaluate_instance(*job.prediction, *job.instance, rule, job.exclude_key);
    } catch (...) {
#pragma omp critical(tabgen_eval_failure)
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);

  std::map<std::string, TableEvaluation> out;
  for (std::size_t i = 0; i < jobs.size(); ++i) out.emplace(jobs[i].instance->id, results[i]);
  return out;
}

}  // namespace tabgen
