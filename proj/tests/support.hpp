#pragma once

#include <atomic>
#include <filesystem>
#include <map>
#include <memory>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "tabgen/gateway.hpp"
#include "tabgen/metrics.hpp"
#include "tabgen/pipeline.hpp"
#include "tabgen/table.hpp"
#include "tabgen/util.hpp"

namespace testing_support {

inline std::filesystem::path fixture(const std::string& name) { return std::filesystem::path(TABGEN_FIXTURE_DIR) / name; }

inline const tabgen::Benchmark& fixtures() {
  static const tabgen::Benchmark b = tabgen::load_benchmark(fixture("benchmark.json"));
  return b;
}

inline tabgen::PromptTemplates templates() { return tabgen::PromptTemplates::load(tabgen::PromptTemplates::default_dir()); }

// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    std::random_device rd;
    path_ = std::filesystem::temp_directory_path() /
            ("tabgen-" + tag + "-" + std::to_string(rd()) + std::to_string(rd()));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& s) const { return path_ / s; }

 private:
  std::filesystem::path path_;
};

struct OracleRun {
  std::vector<tabgen::GenerationRecord> records;
  std::map<std::string, tabgen::TableEvaluation> evaluations;
  tabgen::BenchmarkEvaluation macro;
};

// Runs every fixture instance (both splits) through the pipeline against a
// per-instance oracle client and scores the result.
inline OracleRun run_oracle(const tabgen::Benchmark& benchmark, tabgen::Method method, tabgen::Scenario scenario,
                            double corruption = 0.0, std::uint64_t seed = 7) {
  tabgen::Pipeline pipeline(templates());
  OracleRun run;
  for (const auto& inst : benchmark.instances) {
    tabgen::OracleClient client({inst.table, corruption, seed});
    auto rec = pipeline.run_scenario(inst, client, method, scenario);
    std::optional<tabgen::KeyTuple> exclude;
    if (scenario == tabgen::Scenario::example_row) exclude = tabgen::example_row_key(inst);
    run.evaluations.emplace(inst.id, tabgen::evaluate_instance(rec.parsed_table, inst, {}, exclude));
    run.records.push_back(std::move(rec));
  }
  run.macro = tabgen::aggregate(run.evaluations);
  return run;
}

// Passes requests through until `budget` calls have gone by, then throws a
// non-library exception, standing in for a killed process.
class CrashingClient final : public tabgen::LlmClient {
 public:
  CrashingClient(std::shared_ptr<tabgen::LlmClient> inner, std::shared_ptr<std::atomic<long>> budget)
      : inner_(std::move(inner)), budget_(std::move(budget)) {}

  tabgen::LlmResponse complete(const tabgen::LlmRequest& request) override {
    if (budget_->fetch_sub(1) <= 0) throw std::runtime_error("simulated crash");
    return inner_->complete(request);
  }
  std::string identity() const override { return inner_->identity(); }

 private:
  std::shared_ptr<tabgen::LlmClient> inner_;
  std::shared_ptr<std::atomic<long>> budget_;
};

}  // namespace testing_support
