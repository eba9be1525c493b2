#include <doctest.h>

#include <fstream>

#include "support.hpp"
#include "tabgen/table.hpp"
#include "tabgen/tokens.hpp"

using namespace tabgen;
using testing_support::fixtures;

namespace {

RelationalTable athletics_table(std::vector<Row> rows) {
  return RelationalTable({{"year", true, true}, {"competition", true, false}, {"venue", false, false},
                          {"position", false, false}},
                         std::move(rows));
}

}  // namespace

TEST_CASE("table construction rejects malformed schemas") {
  CHECK_THROWS_AS(RelationalTable({{"a", true, false}, {"a", false, false}}, {}), ValidationError);
  CHECK_THROWS_AS(RelationalTable({{"", true, false}}, {}), ValidationError);
  CHECK_THROWS_AS(RelationalTable({{"a", true, false}, {"b", false, false}}, {{"x"}}), ValidationError);
}

TEST_CASE("key tuples follow schema order and normalize") {
  const auto t = athletics_table({{"1987", "European Junior", "Birmingham", "3rd"}});
  const auto k = key_tuple(t.rows()[0], t.key_indices(), RowOrigin::gold);
  CHECK(k.parts == std::vector<std::string>{"1987", "europeanjunior"});

  const RelationalTable swapped({{"competition", true, false}, {"year", true, true}, {"venue", false, false}},
                               {{"European Junior", "1987", "Birmingham"}});
  CHECK(key_tuple(swapped.rows()[0], swapped.key_indices(), RowOrigin::gold).parts ==
        std::vector<std::string>{"europeanjunior", "1987"});
}

TEST_CASE("null key cells") {
  const auto t = athletics_table({{std::nullopt, "European Junior", "Birmingham", "3rd"}});
  CHECK_THROWS_AS(key_tuple(t.rows()[0], t.key_indices(), RowOrigin::gold), ValidationError);
  CHECK_FALSE(key_tuple(t.rows()[0], t.key_indices(), RowOrigin::generated).matchable);
  const auto n = athletics_table({{"N/A", "European Junior", "Birmingham", "3rd"}});
  CHECK_FALSE(key_tuple(n.rows()[0], n.key_indices(), RowOrigin::generated).matchable);
  KeyTuple a{{"x"}, false};
  CHECK_FALSE(a == a);
}

TEST_CASE("gold invariants") {
  CHECK_NOTHROW(athletics_table({{"1987", "A", "x", "1st"}, {"1988", "A", "y", "2nd"}}).validate_gold("t"));
  CHECK_THROWS_AS(athletics_table({{"1987", "A", "x", "1st"}, {"1987", "a!", "y", "2nd"}}).validate_gold("t"), ValidationError);
  CHECK_THROWS_AS(athletics_table({{"1987", std::nullopt, "x", "1st"}}).validate_gold("t"), ValidationError);
  CHECK_THROWS_AS(RelationalTable({{"a", false, false}}, {{"x"}}).validate_gold("t"), ValidationError);
  try {
    athletics_table({{"1987", "", "x", "1st"}}).validate_gold("bad_table");
    FAIL("expected a validation error");
  } catch (const ValidationError& e) {
    CHECK(e.instance_id() == "bad_table");
  }
}

TEST_CASE("benchmark JSON round trip keeps popularity and splits") {
  BenchmarkInstance inst{"st", "achievements of Susen Tiedtke from 1987 to 2000",
                         athletics_table({{"1987", "European Junior", "Birmingham", "3rd"},
                               {"1987", "World Championships", "Rome", std::nullopt}}),
                         8449, std::nullopt, Split::dev};
  Benchmark b{{inst}};
  const auto j = benchmark_to_json(b);
  CHECK(j["instances"][0]["popularity"].dump() == "8449");
  CHECK(j["instances"][0]["source_page"].is_null());
  CHECK(j["instances"][0]["rows"][1][3].is_null());
  const auto back = benchmark_from_json(j);
  REQUIRE(back.instances.size() == 1);
  CHECK(back.instances[0] == inst);

  testing_support::TempDir tmp("table");
  save_benchmark(b, tmp / "b.json");
  CHECK(load_benchmark(tmp / "b.json").instances[0] == inst);
}

TEST_CASE("benchmark loading rejects bad input") {
  auto j = benchmark_to_json(fixtures());
  j["instances"].push_back(j["instances"][0]);
  CHECK_THROWS_AS(benchmark_from_json(j), ValidationError);

  auto k = benchmark_to_json(fixtures());
  k["instances"][0]["description"] = "";
  CHECK_THROWS_AS(benchmark_from_json(k), ValidationError);

  auto m = benchmark_to_json(fixtures());
  m["instances"][0]["rows"][0][0] = nullptr;
  CHECK_THROWS_AS(benchmark_from_json(m), ValidationError);

  CHECK_THROWS_AS(load_benchmark("/nonexistent/benchmark.json"), IoError);
  testing_support::TempDir tmp("table-bad");
  std::ofstream(tmp / "bad.json") << "{not json";
  CHECK_THROWS_AS(load_benchmark(tmp / "bad.json"), ValidationError);
}

TEST_CASE("Susen Tiedtke fixture") {
  const auto* st = fixtures().find("susen_tiedtke");
  REQUIRE(st);
  CHECK(st->description == "achievements of Susen Tiedtke from 1987 to 2000");
  CHECK(st->table.key_column_names() == std::vector<std::string>{"year", "competition"});
  CHECK(st->popularity == 8449);
  const auto s = table_stats(st->table, st->description);
  CHECK(s.numeric_ratio == doctest::Approx(0.25));
  CHECK(s.num_cells == st->table.num_rows() * 4);
}

TEST_CASE("fixture aggregates agree with the manifest") {
  const auto manifest = nlohmann::json::parse(read_text_file(testing_support::fixture("manifest.json")));
  const auto& b = fixtures();
  std::size_t rows = 0, cells = 0, non_key = 0;
  double numeric = 0;
  for (const auto& inst : b.instances) {
    const auto s = table_stats(inst.table, inst.description);
    rows += s.num_rows;
    cells += s.num_cells;
    non_key += s.num_rows * inst.table.non_key_indices().size();
    numeric += s.numeric_ratio;
    CHECK(manifest["per_table"][inst.id]["token_estimate"].get<std::size_t>() == s.token_estimate);
  }
  CHECK(manifest["tables"].get<std::size_t>() == b.instances.size());
  CHECK(manifest["total_rows"].get<std::size_t>() == rows);
  CHECK(manifest["total_cells"].get<std::size_t>() == cells);
  CHECK(manifest["total_non_key_cells"].get<std::size_t>() == non_key);
  CHECK(manifest["mean_numeric_ratio"].get<double>() == doctest::Approx(numeric / b.instances.size()));
  CHECK(manifest["fingerprint"].get<std::string>() == benchmark_fingerprint(b));
}

TEST_CASE("token approximation") {
  CHECK(count_tokens("hello world") == 2);
  CHECK(count_tokens("") == 0);
  CHECK(count_tokens("a,b") == 3);
  CHECK(count_tokens("  2014-05-16 ") == 5);
}
