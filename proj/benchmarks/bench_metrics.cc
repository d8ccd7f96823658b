#include <benchmark/benchmark.h>

#include <random>

#include "xrouter/metricspipe/metrics.h"

namespace {

using namespace xrouter;

void BM_Percentile(benchmark::State& state) {
  std::mt19937_64 gen(1);
  std::uniform_real_distribution<double> u(0.0, 10.0);
  std::vector<double> v(static_cast<size_t>(state.range(0)));
  for (auto& x : v) x = u(gen);
  for (auto _ : state) benchmark::DoNotOptimize(metricspipe::percentile(v, 99.0));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Percentile)->Arg(1000)->Arg(100000);

void BM_WindowedThroughput(benchmark::State& state) {
  loadgen::TokenEventLog log;
  std::mt19937_64 gen(1);
  for (int s = 0; s < state.range(0); ++s) {
    loadgen::SessionRecord r;
    r.request_id = "u" + std::to_string(s);
    r.t_send_ns = static_cast<int64_t>(gen() % 1'000'000'000);
    int64_t t = r.t_send_ns;
    for (int i = 0; i < 200; ++i) r.stamps.push_back(t += 10'000'000 + static_cast<int64_t>(gen() % 1'000'000));
    r.t_end_ns = t;
    r.end_reason = "eos";
    log.records.push_back(std::move(r));
  }
  for (auto _ : state) benchmark::DoNotOptimize(metricspipe::windowed_throughput(log, 2.0));
}
BENCHMARK(BM_WindowedThroughput)->Arg(100)->Arg(1000);

}  // namespace

BENCHMARK_MAIN();
