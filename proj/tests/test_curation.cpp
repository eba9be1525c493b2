#include <doctest.h>

#include "support.hpp"
#include "tabgen/curation.hpp"

using namespace tabgen;
using nlohmann::json;

namespace {

RelationalTable grid(std::size_t rows, std::size_t cols) {
  std::vector<ColumnSpec> spec{{"c0", true, false}};
  for (std::size_t c = 1; c < cols; ++c) spec.push_back({"c" + std::to_string(c), false, false});
  std::vector<Row> data;
  for (std::size_t r = 0; r < rows; ++r) {
    Row row;
    for (std::size_t c = 0; c < cols; ++c) row.push_back("r" + std::to_string(r) + "c" + std::to_string(c));
    data.push_back(std::move(row));
  }
  return RelationalTable(spec, data);
}

CandidateTable candidate(RelationalTable t, StructuralFlags flags = {}) {
  return make_candidate("cand", std::move(t), flags, "Some Page");
}

FixturePageviewsClient pageviews() { return FixturePageviewsClient::load(testing_support::fixture("curation/pageviews.json")); }

const MonthWindow kQ1{"2023-01", "2023-03"};

}  // namespace

TEST_CASE("size and structure filters") {
  CHECK(filter_candidate(candidate(grid(9, 2)))->code == RejectionCode::too_small);
  CHECK(filter_candidate(candidate(grid(10, 1)))->code == RejectionCode::too_small);
  CHECK_FALSE(filter_candidate(candidate(grid(10, 2))).has_value());
  CHECK(filter_candidate(candidate(grid(30, 3), {.nested = true}))->code == RejectionCode::non_relational);
  CHECK(filter_candidate(candidate(grid(30, 3), {.composite_header = true}))->code == RejectionCode::non_relational);
  CHECK(filter_candidate(candidate(grid(30, 3), {.inverted = true}))->code == RejectionCode::non_relational);
  // Structure is reported even when the table is also too small.
  CHECK(filter_candidate(candidate(grid(3, 3), {.nested = true}))->code == RejectionCode::non_relational);
  CHECK(to_string(RejectionCode::too_small) == "too_small");
}

TEST_CASE("adding rows or columns never turns an accepted table into a rejection") {
  for (std::size_t r = 10; r < 14; ++r) {
    for (std::size_t c = 2; c < 5; ++c) {
      CHECK_FALSE(filter_candidate(candidate(grid(r, c))).has_value());
      CHECK_FALSE(filter_candidate(candidate(grid(r + 1, c))).has_value());
      CHECK_FALSE(filter_candidate(candidate(grid(r, c + 1))).has_value());
    }
  }
}

TEST_CASE("column profile") {
  auto t = grid(10, 3);
  auto rows = t.rows();
  rows[0][2] = std::nullopt;
  rows[1][2] = "N/A";
  const auto c = candidate(t.with_rows(rows));
  REQUIRE(c.column_fill_rates.size() == 3);
  CHECK(c.column_fill_rates[0] == 1.0);
  CHECK(c.column_fill_rates[2] == doctest::Approx(0.8));
  CHECK(c.column_median_token_len[1] == 1);
}

TEST_CASE("pruning") {
  SUBCASE("a column with missing entries is dropped") {
    auto t = grid(10, 3);
    auto rows = t.rows();
    rows[0][2] = std::nullopt;
    rows[5][2] = "";
    const auto r = prune_columns(candidate(t.with_rows(rows)));
    REQUIRE(r.table.has_value());
    CHECK(r.table->column_names() == std::vector<std::string>{"c0", "c1"});
    CHECK(r.dropped_columns == std::vector<std::string>{"c2"});
    // A looser threshold keeps it.
    CHECK(prune_columns(candidate(t.with_rows(rows)), {.fill_threshold = 0.8}).table->num_cols() == 3);
  }
  SUBCASE("fully filled table is unchanged") {
    const auto t = grid(12, 4);
    const auto r = prune_columns(candidate(t));
    CHECK(*r.table == t);
    CHECK(r.dropped_columns.empty());
  }
  SUBCASE("long text columns are dropped") {
    auto t = grid(10, 3);
    auto rows = t.rows();
    for (auto& row : rows) row[1] = "a long free text note that goes on and on well past ten tokens";
    const auto r = prune_columns(candidate(t.with_rows(rows)));
    CHECK(r.dropped_columns == std::vector<std::string>{"c1"});
  }
  SUBCASE("a key column with a null rejects the table") {
    auto t = grid(10, 3);
    auto rows = t.rows();
    rows[4][0] = std::nullopt;
    const auto r = prune_columns(candidate(t.with_rows(rows)));
    CHECK_FALSE(r.table.has_value());
    REQUIRE(r.rejection.has_value());
    CHECK(r.rejection->detail.find("c0") != std::string::npos);
  }
  SUBCASE("pruning twice changes nothing more") {
    auto t = grid(10, 4);
    auto rows = t.rows();
    rows[2][3] = std::nullopt;
    const auto once = prune_columns(candidate(t.with_rows(rows)));
    const auto twice = prune_columns(candidate(*once.table));
    CHECK(*twice.table == *once.table);
    CHECK(twice.dropped_columns.empty());
  }
  SUBCASE("bad thresholds") {
    CHECK_THROWS_AS((PruneOptions{.fill_threshold = 1.5}.validate()), Error);
    CHECK_THROWS_AS((PruneOptions{.fill_threshold = 1.0, .max_median_tokens = -1}.validate()), Error);
    CHECK_NOTHROW(PruneOptions{}.validate());
  }
}

TEST_CASE("popularity") {
  auto pv = pageviews();
  CHECK(popularity("Three Months", pv, kQ1) == doctest::Approx(200.0));
  CHECK(popularity("Gap Month", pv, kQ1) == doctest::Approx(200.0));
  CHECK_THROWS_AS(popularity("No Such Page", pv, kQ1), PageNotFound);
  CHECK_THROWS_AS(popularity("Three Months", pv, {"2019-01", "2019-02"}), Error);
  CHECK(kQ1.months() == std::vector<std::string>{"2023-01", "2023-02", "2023-03"});
  CHECK(MonthWindow{"2022-11", "2023-02"}.months().size() == 4);
  CHECK_THROWS_AS((MonthWindow{"2023-05", "2023-01"}.months()), Error);
  CHECK_THROWS_AS((MonthWindow{"2023-13", "2023-14"}.months()), Error);
}

TEST_CASE("wikimedia request path") {
  WikimediaPageviewsClient w;
  CHECK(w.request_path("Susen Tiedtke", {"2023-01", "2023-12"}) ==
        "/metrics/pageviews/per-article/en.wikipedia/all-access/all-agents/Susen_Tiedtke/monthly/2023010100/2023120100");
  CHECK(w.request_path("AC/DC", kQ1).find("AC%2FDC") != std::string::npos);
}

TEST_CASE("packaging an instance") {
  const auto& st = *testing_support::fixtures().find("susen_tiedtke");
  const auto inst = package_instance(st.table, st.description, 8449, "susen_tiedtke", Split::eval, "Susen Tiedtke");
  CHECK(inst.table == st.table);
  CHECK(inst.description == st.description);
  CHECK(inst.popularity == 8449);
  CHECK(package_instance(st.table, "d", 1, "x", Split::dev).split == Split::dev);
  CHECK_THROWS_AS(package_instance(st.table, "", 1, "x", Split::eval), Error);
  CHECK_THROWS_AS(package_instance(grid(9, 2), "d", 1, "x", Split::eval), ValidationError);
}

TEST_CASE("descriptions csv") {
  const auto d = parse_descriptions_csv("id,description\r\na,\"one, two\"\nb,\"say \"\"hi\"\"\"\nc,\"multi\nline\"\n");
  CHECK(d.at("a") == "one, two");
  CHECK(d.at("b") == "say \"hi\"");
  CHECK(d.at("c") == "multi\nline");
  CHECK_THROWS_AS(parse_descriptions_csv("name,text\na,b\n"), Error);
  CHECK_THROWS_AS(parse_descriptions_csv("id,description\na,\"open\n"), Error);
}

TEST_CASE("curation over the fixture candidates") {
  const auto candidates = load_candidates(testing_support::fixture("curation/candidates.json"));
  const auto descriptions = read_descriptions_csv(testing_support::fixture("curation/descriptions.csv"));
  auto pv = pageviews();
  const CurationOptions opts;
  const auto result = curate(candidates, descriptions, pv, opts);

  REQUIRE(result.benchmark.instances.size() == 2);
  const auto* marathon = result.benchmark.find("marathon_winners");
  REQUIRE(marathon != nullptr);
  CHECK(marathon->table.column_names() == std::vector<std::string>{"year", "winner", "time"});
  CHECK(result.dropped_columns.at("marathon_winners") == std::vector<std::string>{"nationality", "notes"});
  CHECK(result.benchmark.find("ten_rows")->split == Split::dev);

  std::map<std::string, RejectionCode> codes;
  for (const auto& r : result.rejections) codes[r.id] = r.reason.code;
  CHECK(codes.at("nine_rows") == RejectionCode::too_small);
  CHECK(codes.at("nested_medals") == RejectionCode::non_relational);
  CHECK(codes.at("stacked_header") == RejectionCode::non_relational);
  CHECK(codes.at("missing_key") == RejectionCode::other);
  CHECK(codes.at("one_column_left") == RejectionCode::too_small);
  CHECK(codes.at("unknown_page") == RejectionCode::other);
  CHECK(codes.size() + result.benchmark.instances.size() == candidates.size());

  const auto log = curation_log_json(result, opts);
  CHECK(log["accepted"].size() == 2);
  CHECK(log["rejections"].size() == 6);
  CHECK(log["pageview_window"]["first"] == "2023-01");
  CHECK(log["fill_threshold"] == 1.0);

  // Curating the curated output again accepts everything unchanged.
  std::vector<CandidateTable> again;
  std::map<std::string, std::string> again_desc;
  for (const auto& inst : result.benchmark.instances) {
    again.push_back(make_candidate(inst.id, inst.table, {}, *inst.source_page, inst.split));
    again_desc[inst.id] = inst.description;
  }
  const auto second = curate(again, again_desc, pv, opts);
  CHECK(second.rejections.empty());
  CHECK(second.benchmark == result.benchmark);
}

TEST_CASE("missing description is a rejection") {
  auto candidates = load_candidates(testing_support::fixture("curation/candidates.json"));
  auto pv = pageviews();
  const auto result = curate(candidates, {}, pv);
  CHECK(result.benchmark.instances.empty());
  CHECK(result.rejections.size() == candidates.size());
}
