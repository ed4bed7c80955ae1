// Serial reference kernels vs the OpenMP ones on the default synthetic cohort.

#include <random>
#include <vector>

#include <benchmark/benchmark.h>

#include "gaitkb/analysis.hpp"
#include "gaitkb/cohort.hpp"

namespace {

using namespace gaitkb;

const KnowledgeStore& cohort() {
  static const KnowledgeStore store = synthesize_store(default_cohort_config());
  return store;
}

std::vector<StpVector> probes(std::size_t n) {
  const auto config = default_cohort_config();
  std::mt19937_64 rng(99);
  std::vector<StpVector> out;
  for (std::size_t i = 0; i < n; ++i) {
    const auto& profile = i % 5 == 0 ? config.norm : config.pathologies[i % 4];
    out.push_back(stps_from_parameters(sample_parameters(rng, profile)));
  }
  return out;
}

DemographicFilter female_30_60() {
  DemographicFilter f;
  f.gender = std::set{Gender::Female};
  f.age = Interval{30, 60};
  return f;
}

void BM_CategoryViews_Reference(benchmark::State& state) {
  const auto filter = female_30_60();
  for (auto _ : state) benchmark::DoNotOptimize(reference::category_views(cohort(), filter));
}

void BM_CategoryViews_OpenMP(benchmark::State& state) {
  const auto filter = female_30_60();
  for (auto _ : state) benchmark::DoNotOptimize(category_views(cohort(), filter));
}

void BM_RankBatch_Reference(benchmark::State& state) {
  const auto batch = probes(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(reference::rank_batch(batch, cohort()));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_RankBatch_OpenMP(benchmark::State& state) {
  const auto batch = probes(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(rank_batch(batch, cohort()));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

}  // namespace

BENCHMARK(BM_CategoryViews_Reference)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_CategoryViews_OpenMP)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_RankBatch_Reference)->Arg(100)->Arg(2000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_RankBatch_OpenMP)->Arg(100)->Arg(2000)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
