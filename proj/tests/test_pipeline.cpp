#include <doctest.h>

#include <functional>
#include <mutex>

#include "support.hpp"
#include "tabgen/pipeline.hpp"

using namespace tabgen;
using nlohmann::json;

namespace {

// Dispatches on the prompt kind by looking at the instruction line. Full-table
// prompts go to the cell handler.
class FnClient final : public LlmClient {
 public:
  using Fn = std::function<std::string(const std::string&)>;
  FnClient(Fn keys, Fn row, Fn cell = {}) : keys_(std::move(keys)), row_(std::move(row)), cell_(std::move(cell)) {}

  LlmResponse complete(const LlmRequest& r) override {
    {
      std::lock_guard lock(mutex_);
      seen.push_back(r.user_message);
    }
    LlmResponse out;
    const auto& m = r.user_message;
    if (m.find("Each element of the response") != std::string::npos) {
      out.text = cell_(m);
    } else if (m.find("List all") != std::string::npos) {
      out.text = keys_(m);
    } else if (m.find("Retrieve a single row") != std::string::npos) {
      out.text = row_(m);
    } else {
      out.text = cell_(m);
    }
    out.input_tokens = 1;
    out.output_tokens = 1;
    return out;
  }
  std::string identity() const override { return "fn"; }

  std::mutex mutex_;
  std::vector<std::string> seen;

 private:
  Fn keys_, row_, cell_;
};

BenchmarkInstance small_instance(std::size_t rows, std::size_t non_keys) {
  std::vector<ColumnSpec> cols{{"k", true, false}};
  for (std::size_t c = 0; c < non_keys; ++c) cols.push_back({"v" + std::to_string(c), false, false});
  std::vector<Row> data;
  for (std::size_t r = 0; r < rows; ++r) {
    Row row{"key" + std::to_string(r)};
    for (std::size_t c = 0; c < non_keys; ++c) row.push_back("x" + std::to_string(r) + std::to_string(c));
    data.push_back(std::move(row));
  }
  return {"small", "small things", RelationalTable(cols, data), 1.0, std::nullopt, Split::eval};
}

std::string keys_json(std::size_t n) {
  json a = json::array();
  for (std::size_t i = 0; i < n; ++i) a.push_back({{"k", "key" + std::to_string(i)}});
  return a.dump();
}

}  // namespace

TEST_CASE("prompt counts follow the method") {
  const Pipeline p(testing_support::templates());
  SUBCASE("row-by-row: one keys prompt plus one per key") {
    const auto inst = small_instance(10, 2);
    FnClient c([](auto&) { return keys_json(10); }, [](auto&) { return R"({"v0": "a", "v1": "b"})"; });
    const auto rec = p.run_row_by_row(inst, c);
    CHECK(rec.prompts.size() == 11);
    CHECK(rec.responses.size() == 11);
    CHECK(rec.parsed_table.num_rows() == 10);
    CHECK(rec.parse_failures == 0);
  }
  SUBCASE("cell-by-cell: one keys prompt plus one per key and non-key column") {
    const auto inst = small_instance(10, 2);
    FnClient c([](auto&) { return keys_json(10); }, {}, [](const std::string& m) {
      return m.find("attribute v0") != std::string::npos ? R"({"v0": "a"})" : R"({"v1": "b"})";
    });
    const auto rec = p.run_cell_by_cell(inst, c);
    CHECK(rec.prompts.size() == 21);
    CHECK(rec.parsed_table.rows()[3][1] == "a");
    CHECK(rec.parsed_table.rows()[3][2] == "b");
  }
  SUBCASE("oracle keys skip the keys prompt") {
    const auto inst = small_instance(20, 1);
    FnClient c([](auto&) -> std::string { FAIL("keys prompt issued"); return ""; },
               [](auto&) { return R"({"v0": "a"})"; });
    const auto rec = p.run_scenario(inst, c, Method::row_by_row, Scenario::oracle_keys);
    CHECK(rec.prompts.size() == 20);
    CHECK(rec.raw_keys.size() == 20);
  }
  SUBCASE("full table is a single prompt") {
    const auto inst = small_instance(5, 1);
    FnClient c({}, {}, [](auto&) { return R"([{"k": "key0", "v0": "x00"}])"; });
    const auto rec = p.run_full_table(inst, c);
    CHECK(rec.prompts.size() == 1);
    CHECK(rec.parsed_table.num_rows() == 1);
  }
}

TEST_CASE("null and duplicate keys") {
  const auto inst = small_instance(3, 1);
  auto keys = [](auto&) {
    return R"([{"k": "key0"}, {"k": null}, {"k": "N/A"}, {"k": "key1"}, {"k": " KEY0 "}])";
  };
  auto row = [](auto&) { return R"({"v0": "a"})"; };
  {
    const Pipeline p(testing_support::templates());
    FnClient c(keys, row);
    const auto rec = p.run_row_by_row(inst, c);
    CHECK(rec.raw_keys.size() == 5);
    CHECK(rec.parsed_table.num_rows() == 2);
    CHECK(rec.parsed_table.rows()[0][0] == "key0");
    CHECK(rec.parsed_table.rows()[1][0] == "key1");
  }
  {
    const Pipeline p(testing_support::templates(), {.parallelism = 2, .dedup_keys = false, .wrapper = ""});
    FnClient c(keys, row);
    const auto rec = p.run_row_by_row(inst, c);
    CHECK_FALSE(rec.dedup_keys);
    CHECK(rec.parsed_table.num_rows() == 3);
  }
}

TEST_CASE("parse failures are recorded, not thrown") {
  const auto inst = small_instance(3, 1);
  const Pipeline p(testing_support::templates());
  SUBCASE("bad row reply leaves the non-key cells null") {
    FnClient c([](auto&) { return keys_json(3); },
               [](const std::string& m) { return m.find("key1") != std::string::npos ? "no idea" : R"({"v0": "a"})"; });
    const auto rec = p.run_row_by_row(inst, c);
    CHECK(rec.parse_failures == 1);
    REQUIRE(rec.failure_reasons.size() == 1);
    CHECK(rec.failure_reasons[0].find("key1") != std::string::npos);
    CHECK(rec.parsed_table.num_rows() == 3);
    CHECK_FALSE(rec.parsed_table.rows()[1][1].has_value());
  }
  SUBCASE("bad keys reply yields an empty table") {
    FnClient c([](auto&) { return "sorry"; }, [](auto&) { return "{}"; });
    const auto rec = p.run_row_by_row(inst, c);
    CHECK(rec.parse_failures == 1);
    CHECK(rec.prompts.size() == 1);
    CHECK(rec.parsed_table.num_rows() == 0);
  }
  SUBCASE("gateway errors become failures") {
    ScriptedClient c(std::map<std::string, std::string>{});
    const auto rec = p.run_full_table(inst, c);
    CHECK(rec.parse_failures == 1);
    REQUIRE(rec.responses.size() == 1);
    CHECK(rec.responses[0].error.has_value());
  }
}

TEST_CASE("method and scenario validation") {
  CHECK_THROWS_AS(validate_combination(Method::full_table, Scenario::oracle_keys), ConfigError);
  CHECK_NOTHROW(validate_combination(Method::cell_by_cell, Scenario::oracle_keys));
  CHECK_NOTHROW(validate_combination(Method::full_table, Scenario::example_row));
  CHECK_THROWS_AS(parse_method("column-by-column"), ConfigError);
  CHECK_THROWS_AS(parse_scenario("few-shot"), ConfigError);
  for (auto m : {Method::full_table, Method::row_by_row, Method::cell_by_cell}) CHECK(parse_method(to_string(m)) == m);
  for (auto s : {Scenario::baseline, Scenario::example_row, Scenario::oracle_keys}) {
    CHECK(parse_scenario(to_string(s)) == s);
  }
  const Pipeline p(testing_support::templates());
  ScriptedClient c(std::map<std::string, std::string>{});
  CHECK_THROWS_AS(p.run_scenario(small_instance(2, 1), c, Method::full_table, Scenario::oracle_keys), ConfigError);
}

TEST_CASE("parallel_for runs everything and rethrows") {
  std::vector<int> hit(100, 0);
  parallel_for(hit.size(), 4, [&](std::size_t i) { hit[i] = 1; });
  CHECK(std::count(hit.begin(), hit.end(), 1) == 100);
  std::atomic<int> ran{0};
  CHECK_THROWS_WITH(parallel_for(50, 3,
                                 [&](std::size_t i) {
                                   ++ran;
                                   if (i == 7) throw std::runtime_error("boom");
                                 }),
                    "boom");
  CHECK(ran.load() >= 8);
  CHECK_NOTHROW(parallel_for(0, 4, [](std::size_t) { FAIL("called"); }));
}

TEST_CASE("example-row and wrapper shape every prompt") {
  const auto& st = *testing_support::fixtures().find("susen_tiedtke");
  const Pipeline p(testing_support::templates(), {.parallelism = 4, .dedup_keys = true, .wrapper = "<s>[INST] {prompt} [/INST]"});
  OracleClient c({st.table, 0.0, 1});
  const auto rec = p.run_scenario(st, c, Method::row_by_row, Scenario::example_row);
  REQUIRE(rec.excluded_key.has_value());
  CHECK(*rec.excluded_key == std::vector<std::string>{"1987", "European Junior"});
  for (const auto& pr : rec.prompts) {
    CHECK(pr.has_example);
    CHECK(pr.text.rfind("<s>[INST] ", 0) == 0);
    CHECK(pr.text.find("European Junior") != std::string::npos);
    if (pr.kind == PromptKind::row) CHECK(pr.text.find("Birmingham") != std::string::npos);
  }
  CHECK(rec.parse_failures == 0);
}

TEST_CASE("record and predicted table codecs round trip") {
  const auto& st = *testing_support::fixtures().find("susen_tiedtke");
  const Pipeline p(testing_support::templates());
  OracleClient c({st.table, 0.3, 2});
  const auto rec = p.run_scenario(st, c, Method::cell_by_cell, Scenario::baseline);
  const auto back = record_from_json(record_to_json(rec));
  CHECK(back.instance_id == rec.instance_id);
  CHECK(back.method == rec.method);
  CHECK(back.parsed_table == rec.parsed_table);
  CHECK(back.raw_keys == rec.raw_keys);
  CHECK(back.prompts.size() == rec.prompts.size());
  CHECK(back.total_input_tokens == rec.total_input_tokens);
  CHECK(dump_canonical(record_to_json(back)) == dump_canonical(record_to_json(rec)));
  CHECK_FALSE(record_to_json(rec).dump().find("wall_time") != std::string::npos);
  CHECK(record_to_json(rec, true).dump().find("wall_time") != std::string::npos);

  const auto t = predicted_table_from_json(predicted_table_to_json(rec));
  CHECK(t.instance_id == "susen_tiedtke");
  CHECK(t.method == Method::cell_by_cell);
  CHECK(t.table == rec.parsed_table);
  CHECK_THROWS_AS(predicted_table_from_json(json{{"instance_id", "x"}}), Error);
}

TEST_CASE("run_benchmark writes one file per instance and a manifest") {
  testing_support::TempDir tmp("run");
  const auto& b = testing_support::fixtures();
  const Pipeline p(testing_support::templates());
  RunOptions opts;
  opts.method = Method::row_by_row;
  opts.config_hash = "abc123";
  const auto summary = run_benchmark(
      b, [](const BenchmarkInstance& i) { return std::make_shared<OracleClient>(OracleSpec{i.table, 0.0, 1}); }, p, opts,
      tmp.path());
  std::size_t eval = 0;
  for (const auto& i : b.instances) eval += i.split == Split::eval ? 1 : 0;
  CHECK(summary.records.size() == eval);
  CHECK(summary.failed_instances == 0);
  const auto manifest = json::parse(read_text_file(tmp / "run_manifest.json"));
  CHECK(manifest["config_hash"] == "abc123");
  CHECK(manifest["benchmark"] == benchmark_fingerprint(b));
  CHECK(manifest["instances"].size() == eval);
  CHECK(std::filesystem::exists(tmp / "records" / "susen_tiedtke.json"));
  CHECK(std::filesystem::exists(tmp / "tables" / "susen_tiedtke.json"));
  CHECK_FALSE(std::filesystem::exists(tmp / "tables" / "eurovision_winners.json"));
}
