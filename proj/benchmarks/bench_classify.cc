#include <benchmark/benchmark.h>

#include "xrouter/benchctl/corpus_io.h"
#include "xrouter/benchctl/train.h"
#include "xrouter/common/rng.h"
#include "xrouter/loadgen/workload.h"

namespace {

using namespace xrouter;

struct Fixture {
  CorpusBundle corpus = benchctl::ingest_corpus(XROUTER_DATA_DIR "/corpus.jsonl");
  clusterkit::ClusterPipeline pipeline = benchctl::train(corpus, 8, 1).pipeline;
  loadgen::PromptSource source{corpus};
};

Fixture& fixture() {
  static Fixture f;
  return f;
}

void BM_Classify(benchmark::State& state) {
  auto& f = fixture();
  Rng rng(7);
  std::vector<std::string> prompts;
  for (int i = 0; i < 64; ++i) prompts.push_back(f.source.build_prompt(i % 8, state.range(0), rng));
  size_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(f.pipeline.classify(prompts[i++ % prompts.size()]));
  }
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_Classify)->Arg(64)->Arg(500)->Arg(2048);

void BM_Train(benchmark::State& state) {
  auto& f = fixture();
  for (auto _ : state) benchmark::DoNotOptimize(benchctl::train(f.corpus, 8, 1));
}
BENCHMARK(BM_Train)->Unit(benchmark::kMillisecond)->Iterations(3);

}  // namespace

BENCHMARK_MAIN();
