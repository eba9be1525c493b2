#include <benchmark/benchmark.h>

#include <algorithm>
#include <filesystem>
#include <map>
#include <random>
#include <string>
#include <vector>

#include "tabgen/metrics.hpp"
#include "tabgen/table.hpp"

namespace {

using namespace tabgen;

// Fixture instances replicated `copies` times, each paired with a perturbed
// copy of its gold table (shuffled rows, some cells rewritten or dropped).
struct Workload {
  std::vector<BenchmarkInstance> instances;
  std::vector<RelationalTable> predictions;
  std::vector<EvaluationJob> jobs;

  explicit Workload(std::size_t copies) {
    const auto base = load_benchmark(std::filesystem::path(TABGEN_FIXTURE_DIR) / "benchmark.json");
    std::mt19937_64 rng(11);
    std::bernoulli_distribution edit(0.2);
    for (std::size_t c = 0; c < copies; ++c) {
      for (auto inst : base.instances) {
        inst.id += "#" + std::to_string(c);
        auto rows = inst.table.rows();
        std::shuffle(rows.begin(), rows.end(), rng);
        for (auto& row : rows) {
          for (auto i : inst.table.non_key_indices()) {
            if (edit(rng)) row[i] = row[i] ? std::optional<std::string>(*row[i] + "x") : std::nullopt;
          }
        }
        if (!rows.empty() && edit(rng)) rows.pop_back();
        predictions.push_back(inst.table.with_rows(std::move(rows)));
        instances.push_back(std::move(inst));
      }
    }
    for (std::size_t i = 0; i < instances.size(); ++i) jobs.push_back({&instances[i], &predictions[i], std::nullopt});
  }
};

const Workload& workload(std::size_t copies) {
  static std::map<std::size_t, Workload> cache;
  auto it = cache.find(copies);
  if (it == cache.end()) it = cache.emplace(copies, Workload(copies)).first;
  return it->second;
}

void BM_EvaluateSerial(benchmark::State& state) {
  const auto& w = workload(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(evaluate_jobs_serial(w.jobs, {}));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(w.jobs.size()));
}

void BM_EvaluateParallel(benchmark::State& state) {
  const auto& w = workload(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(evaluate_jobs_parallel(w.jobs, {}));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(w.jobs.size()));
}

BENCHMARK(BM_EvaluateSerial)->Arg(1)->Arg(16)->Arg(128)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_EvaluateParallel)->Arg(1)->Arg(16)->Arg(128)->Unit(benchmark::kMicrosecond);

}  // namespace

BENCHMARK_MAIN();
