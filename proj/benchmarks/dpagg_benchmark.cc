// Copyright 2026 The dpagg Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <vector>

#include "benchmark/benchmark.h"
#include "dpagg/accountant.h"
#include "dpagg/bounding.h"
#include "dpagg/noise.h"
#include "dpagg/pipeline.h"
#include "dpagg/synthetic.h"

namespace dpagg {
namespace {

struct Corpus {
  RegionRegistry registry;
  std::vector<SearchEvent> events;
};

const Corpus& SharedCorpus() {
  static const Corpus* corpus = [] {
    auto registry = GenerateSyntheticRegistry({});
    SyntheticCorpusParams params;
    params.weeks = 4;
    params.users_per_capita = 0.002;
    params.travel_rate = 0.05;
    auto events = GenerateSyntheticEvents(*registry, params);
    return new Corpus{*std::move(registry), *std::move(events)};
  }();
  return *corpus;
}

void BM_Certify(benchmark::State& state) {
  const SigmaTable sigmas = SigmaTable::Default();
  for (auto _ : state) {
    benchmark::DoNotOptimize(Certify(sigmas, 1e-5));
  }
}
BENCHMARK(BM_Certify);

void BM_EpsilonForDelta(benchmark::State& state) {
  for (auto _ : state) {
    benchmark::DoNotOptimize(EpsilonForDeltaAtSigma(1.8413, 1e-5));
  }
}
BENCHMARK(BM_EpsilonForDelta);

void BM_BoundAndAggregate(benchmark::State& state) {
  const Corpus& corpus = SharedCorpus();
  for (auto _ : state) {
    benchmark::DoNotOptimize(BoundAndAggregate(corpus.events, corpus.registry));
  }
  state.SetItemsProcessed(state.iterations() *
                          static_cast<int64_t>(corpus.events.size()));
}
BENCHMARK(BM_BoundAndAggregate)->Unit(benchmark::kMillisecond);

void BM_NoiseAll(benchmark::State& state) {
  const Corpus& corpus = SharedCorpus();
  auto bounded = BoundAndAggregate(corpus.events, corpus.registry);
  const SigmaTable sigmas = SigmaTable::Default();
  NoiseOptions options;
  options.seed = 1;
  for (auto _ : state) {
    benchmark::DoNotOptimize(NoiseAll(bounded->table, sigmas, corpus.registry, options));
  }
  state.SetItemsProcessed(state.iterations() *
                          static_cast<int64_t>(bounded->table.size()));
}
BENCHMARK(BM_NoiseAll);

void BM_RunPipeline(benchmark::State& state) {
  const Corpus& corpus = SharedCorpus();
  PipelineConfig config;
  config.seed = 1;
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        RunPipeline(config, corpus.registry, corpus.events, SigmaTable::Default()));
  }
  state.SetItemsProcessed(state.iterations() *
                          static_cast<int64_t>(corpus.events.size()));
}
BENCHMARK(BM_RunPipeline)->Unit(benchmark::kMillisecond);

}  // namespace
}  // namespace dpagg

BENCHMARK_MAIN();
