#include <doctest.h>

#include <random>

#include "oracle/metrics_oracle.hpp"
#include "support.hpp"
#include "tabgen/metrics.hpp"

using namespace tabgen;

namespace {

RelationalTable three_col(std::vector<Row> rows) {
  return RelationalTable({{"k", true, false}, {"a", false, false}, {"b", false, false}}, std::move(rows));
}

const RelationalTable& gold3() {
  static const auto g = three_col({{"k1", "x", "1"}, {"k2", "y", "2"}, {"k3", "z", "3"}});
  return g;
}

}  // namespace

TEST_CASE("alignment by key") {
  const auto pred = three_col({{"k1", "x", "1"}, {"k2", "y", "2"}, {"k4", "w", "4"}});
  const auto a = align_rows(pred, gold3());
  CHECK(a.pairs == std::vector<std::pair<std::size_t, std::size_t>>{{0, 0}, {1, 1}});
  CHECK(a.unmatched_pred == std::vector<std::size_t>{2});
  CHECK(a.unmatched_gold == std::vector<std::size_t>{2});
}

TEST_CASE("duplicate generated keys: first occurrence aligns") {
  const auto pred = three_col({{"K1", "wrong", "9"}, {"k1", "x", "1"}});
  const auto a = align_rows(pred, gold3());
  CHECK(a.pairs == std::vector<std::pair<std::size_t, std::size_t>>{{0, 0}});
  CHECK(a.unmatched_pred == std::vector<std::size_t>{1});
  const auto e = evaluate(pred, gold3(), {});
  CHECK(e.psi == 0);
}

TEST_CASE("null generated keys never align") {
  const auto pred = three_col({{std::nullopt, "x", "1"}, {"n/a", "y", "2"}});
  const auto a = align_rows(pred, gold3());
  CHECK(a.pairs.empty());
  CHECK(a.unmatched_pred.size() == 2);
}

TEST_CASE("schema mismatch is rejected") {
  const RelationalTable other({{"k", true, false}, {"a", false, false}}, {});
  CHECK_THROWS_AS(align_rows(other, gold3()), ValidationError);
  CHECK_THROWS_AS(evaluate(other, gold3(), {}), ValidationError);
}

TEST_CASE("keys metrics: two of three aligned") {
  const auto pred = three_col({{"k1", "x", "1"}, {"k2", "y", "2"}, {"k4", "w", "4"}});
  const auto e = evaluate(pred, gold3(), {});
  CHECK(e.phi == 2);
  CHECK(e.keys.precision == doctest::Approx(2.0 / 3));
  CHECK(e.keys.recall == doctest::Approx(2.0 / 3));
  CHECK(e.keys.f1 == doctest::Approx(2.0 / 3));
}

TEST_CASE("non-key and overall counts by hand") {
  // k1 fully correct, k2 one of two non-key cells correct, k4 unaligned.
  const auto pred = three_col({{"k1", "x", "1"}, {"k2", "y", "5"}, {"k4", "w", "4"}});
  const auto e = evaluate(pred, gold3(), {});
  CHECK(e.psi == 3);
  CHECK(e.generated_non_key_cells == 6);
  CHECK(e.gold_non_key_cells == 6);
  CHECK(e.non_keys.precision == doctest::Approx(0.5));
  CHECK(e.non_keys.recall == doctest::Approx(0.5));
  CHECK(e.tau == 5);
  CHECK(e.overall.precision == doctest::Approx(5.0 / 9));
  CHECK(e.overall.recall == doctest::Approx(5.0 / 9));
}

TEST_CASE("zero and identity cases") {
  const auto empty = gold3().with_rows({});
  const auto z = evaluate(empty, gold3(), {});
  CHECK(z.keys == MetricTriple{});
  CHECK(z.non_keys == MetricTriple{});
  CHECK(z.overall == MetricTriple{});

  const auto id = evaluate(gold3(), gold3(), {});
  CHECK(id.keys == MetricTriple{1, 1, 1});
  CHECK(id.non_keys == MetricTriple{1, 1, 1});
  CHECK(id.overall == MetricTriple{1, 1, 1});

  const auto wrong = three_col({{"k1", "q", "7"}, {"k2", "q", "7"}, {"k3", "q", "7"}});
  const auto w = evaluate(wrong, gold3(), {});
  CHECK(w.psi == 0);
  CHECK(w.non_keys == MetricTriple{});
  CHECK(w.keys.f1 == 1.0);

  CHECK(MetricTriple::from_counts(0, 0, 0) == MetricTriple{});
}

TEST_CASE("key cells in tau: fuzzy or exact") {
  const RelationalTable gold({{"year", true, true}, {"v", false, false}}, {{"1,000", "a"}});
  const RelationalTable pred({{"year", true, true}, {"v", false, false}}, {{"1000", "a"}});
  // Normalized "1000" aligns with "1,000"; both rules count the key cell.
  CHECK(evaluate(pred, gold, {}).tau == 2);
  MatchRule exact;
  exact.fuzzy_key_cells = false;
  CHECK(evaluate(pred, gold, exact).tau == 2);
}

TEST_CASE("example-row exclusion") {
  const auto key = key_tuple(gold3().rows()[0], gold3().key_indices(), RowOrigin::gold);
  const auto rest = gold3().with_rows({gold3().rows()[1], gold3().rows()[2]});
  const auto e = evaluate(rest, gold3(), {}, key);
  CHECK(e.overall.f1 == 1.0);
  CHECK(e.gold_rows == 2);
  const auto all = evaluate(gold3(), gold3(), {}, key);
  CHECK(all.overall.f1 == 1.0);
  CHECK(all.generated_rows == 2);
  CHECK(all.gold_cells == 6);

  const auto& st = *testing_support::fixtures().find("susen_tiedtke");
  CHECK(example_row_key(st).parts == std::vector<std::string>{"1987", "europeanjunior"});
}

TEST_CASE("macro aggregation") {
  std::map<std::string, TableEvaluation> m;
  m["a"].overall.f1 = 1.0;
  m["b"].overall.f1 = 0.0;
  CHECK(aggregate(m).macro_overall.f1 == 0.5);
  std::map<std::string, TableEvaluation> one{{"x", evaluate(gold3(), gold3(), {})}};
  CHECK(aggregate(one).macro_non_keys == MetricTriple{1, 1, 1});
  CHECK_THROWS_AS(aggregate({}), Error);
}

TEST_CASE("reference scorer agrees on randomized pairs") {
  std::mt19937_64 rng(77);
  std::size_t aligned = 0, duplicate_or_null = 0, empty_gold = 0;
  for (int i = 0; i < 3000; ++i) {
    const auto [pp, gp] = oracle::random_pair(rng);
    const auto ref = oracle::brute_force(pp, gp);
    const auto e = evaluate(oracle::to_relational(pp), oracle::to_relational(gp), {});
    REQUIRE(e.phi == ref.phi);
    REQUIRE(e.psi == ref.psi);
    REQUIRE(e.tau == ref.tau);
    REQUIRE(e.keys.f1 == ref.keys_f1);
    REQUIRE(e.non_keys.precision == ref.non_keys_p);
    REQUIRE(e.overall.recall == ref.overall_r);
    aligned += ref.phi > 0 ? 1 : 0;
    duplicate_or_null += ref.phi < pp.rows.size() ? 1 : 0;
    empty_gold += gp.rows.empty() ? 1 : 0;
  }
  // The generator must actually exercise the interesting cases.
  CHECK(aligned > 1500);
  CHECK(duplicate_or_null > 500);
  CHECK(empty_gold > 50);
}

TEST_CASE("serial and OpenMP evaluation paths agree") {
  const auto& b = testing_support::fixtures();
  std::vector<RelationalTable> preds;
  std::mt19937_64 rng(3);
  for (const auto& inst : b.instances) {
    auto rows = inst.table.rows();
    std::shuffle(rows.begin(), rows.end(), rng);
    rows.pop_back();
    for (auto& r : rows) r.back() = "changed";
    preds.push_back(inst.table.with_rows(rows));
  }
  std::vector<EvaluationJob> jobs;
  for (std::size_t i = 0; i < b.instances.size(); ++i) jobs.push_back({&b.instances[i], &preds[i], std::nullopt});
  jobs[0].exclude_key = example_row_key(b.instances[0]);
  const auto serial = evaluate_jobs_serial(jobs, {});
  const auto parallel = evaluate_jobs_parallel(jobs, {});
  CHECK(serial == parallel);
  CHECK(serial.size() == b.instances.size());

  const RelationalTable wrong({{"x", true, false}}, {});
  jobs.push_back({&b.instances[0], &wrong, std::nullopt});
  CHECK_THROWS_AS(evaluate_jobs_parallel(jobs, {}), ValidationError);
}
