#include <benchmark/benchmark.h>

#include "xrouter/simbackend/engine.h"

namespace {

using namespace xrouter;

simbackend::ModelProfile profile(int max_batch) {
  simbackend::ModelProfile p;
  p.name = "bench";
  p.max_batch = max_batch;
  p.kv_cache_gb = 100;
  p.kv_tokens_per_gb = 10000;
  p.prefill_coef_ns_per_token = 10e3;
  p.prefill_base_ns = 1e6;
  p.decode_base_ns = 10e6;
  p.decode_batch_coef_ns = 20e3;
  p.eos_prob = 0.005;
  return p;
}

// Steady-state steps with `batch` requests in flight; finished requests are
// replaced so the batch stays full.
void BM_EngineStep(benchmark::State& state) {
  const int batch = static_cast<int>(state.range(0));
  simbackend::BatchEngine engine(profile(batch), 1);
  int64_t next_id = 0;
  for (; next_id < batch; ++next_id) engine.admit("r" + std::to_string(next_id), 500, 1000, 0);
  for (auto _ : state) {
    const auto events = engine.step();
    for (const auto& e : events) {
      if (e.kind == simbackend::EventKind::kEnd) {
        engine.admit("r" + std::to_string(next_id++), 500, 1000, e.t_ns);
      }
    }
    benchmark::DoNotOptimize(events.size());
  }
}
BENCHMARK(BM_EngineStep)->Arg(20)->Arg(125)->Arg(600);

}  // namespace

BENCHMARK_MAIN();
