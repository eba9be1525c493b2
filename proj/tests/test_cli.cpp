#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <fstream>

#include "support.hpp"

using nlohmann::json;

namespace {

// Runs the CLI with output discarded and returns its exit status.
int run_cli(const std::string& args) {
  const std::string cmd = std::string("\"") + TABGEN_CLI_PATH + "\" " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string q(const std::filesystem::path& p) { return "\"" + p.string() + "\""; }

const std::string kBench = q(testing_support::fixture("benchmark.json"));

}  // namespace

TEST_CASE("generate then evaluate with the oracle client") {
  testing_support::TempDir tmp("cli");
  REQUIRE(run_cli("generate --benchmark " + kBench + " --method row-by-row --client oracle --out " + q(tmp / "run")) == 0);
  CHECK(std::filesystem::exists(tmp / "run" / "run_config.json"));
  CHECK(std::filesystem::exists(tmp / "run" / "ledger.jsonl"));
  const auto manifest = json::parse(tabgen::read_text_file(tmp / "run" / "run_manifest.json"));
  CHECK_FALSE(manifest["config_hash"].get<std::string>().empty());

  REQUIRE(run_cli("evaluate --predictions " + q(tmp / "run") + " --benchmark " + kBench + " --report " +
                  q(tmp / "report.json") + " --format json") == 0);
  const auto report = json::parse(tabgen::read_text_file(tmp / "report.json"));
  CHECK(report["macro"]["overall"]["f1"].get<double>() == doctest::Approx(1.0));
  CHECK(report["tables"].size() == 10);

  REQUIRE(run_cli("evaluate --predictions " + q(tmp / "run" / "tables") + " --benchmark " + kBench + " --report " +
                  q(tmp / "report.csv") + " --format csv") == 0);
  const auto csv = tabgen::read_text_file(tmp / "report.csv");
  CHECK(csv.rfind("id,keys_recall,keys_precision,keys_f1,", 0) == 0);

  REQUIRE(run_cli("analyze --report " + q(tmp / "report.json") + " --property num_cells --out " + q(tmp / "series.csv") +
                  " --runs " + q(tmp / "run") + " --cost-out " + q(tmp / "cost.csv")) == 0);
  CHECK(tabgen::read_text_file(tmp / "series.csv").rfind("bucket_lo,bucket_hi,", 0) == 0);
  CHECK(tabgen::read_text_file(tmp / "cost.csv").find("row-by-row,") != std::string::npos);

  REQUIRE(run_cli("cost-report --runs " + q(tmp / "run") + " --out " + q(tmp / "cost.json") + " --format json") == 0);
  const auto cost = json::parse(tabgen::read_text_file(tmp / "cost.json"));
  CHECK(cost.dump().find("row-by-row") != std::string::npos);
}

TEST_CASE("configuration errors exit with status 2") {
  testing_support::TempDir tmp("cli-bad");
  CHECK(run_cli("generate --benchmark " + kBench + " --method column-by-column --out " + q(tmp / "r")) == 2);
  CHECK(run_cli("generate --benchmark " + kBench + " --method full-table --scenario oracle-keys --out " + q(tmp / "r")) ==
        2);
  CHECK(run_cli("frobnicate") == 2);
  CHECK(run_cli("--help") == 0);
  CHECK(run_cli("generate --benchmark " + kBench + " --client openai --credential-env TABGEN_TEST_NEVER_SET --out " +
                q(tmp / "r")) == 2);
}

TEST_CASE("runtime failures exit with status 1") {
  testing_support::TempDir tmp("cli-fail");
  std::filesystem::create_directories(tmp / "empty");
  CHECK(run_cli("evaluate --predictions " + q(tmp / "empty") + " --benchmark " + kBench + " --report " +
                q(tmp / "r.json")) == 1);
  CHECK(run_cli("evaluate --predictions " + q(tmp / "empty") + " --benchmark " + q(tmp / "missing.json") +
                " --report " + q(tmp / "r.json")) == 1);
}

TEST_CASE("curate writes a benchmark and a rejection log") {
  testing_support::TempDir tmp("cli-curate");
  const auto cur = testing_support::fixture("curation");
  REQUIRE(run_cli("curate --candidates " + q(cur / "candidates.json") + " --descriptions " +
                  q(cur / "descriptions.csv") + " --pageviews " + q(cur / "pageviews.json") + " --out " +
                  q(tmp / "b.json") + " --log " + q(tmp / "log.json")) == 0);
  const auto b = tabgen::load_benchmark(tmp / "b.json");
  CHECK(b.instances.size() == 2);
  const auto log = tabgen::read_text_file(tmp / "log.json");
  CHECK(log.find("nine_rows") != std::string::npos);
  CHECK(log.find("too_small") != std::string::npos);
}

TEST_CASE("options can come from a config file") {
  testing_support::TempDir tmp("cli-config");
  std::ofstream(tmp / "gen.toml") << "[generate]\nmethod = \"cell-by-cell\"\nscenario = \"oracle-keys\"\n";
  REQUIRE(run_cli("--config " + q(tmp / "gen.toml") + " generate --benchmark " + kBench + " --out " + q(tmp / "run")) ==
          0);
  const auto manifest = json::parse(tabgen::read_text_file(tmp / "run" / "run_manifest.json"));
  CHECK(manifest["method"] == "cell-by-cell");
  CHECK(manifest["scenario"] == "oracle-keys");
}
