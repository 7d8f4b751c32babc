#include <benchmark/benchmark.h>

#include "kbbm/simulator.hpp"

namespace {

void BM_SimulateDriftless(benchmark::State& state) {
  kbbm::SimConfig c;
  c.params = {0.0, 1.0, 2.0};
  c.start_x = 3.0;
  c.schedule = {static_cast<double>(state.range(0))};
  c.threads = static_cast<unsigned>(state.range(1));
  std::size_t particles = 0;
  for (auto _ : state) {
    ++c.seed;
    const kbbm::SimResult r = kbbm::simulate(c);
    particles += r.snapshots.back().size();
    benchmark::DoNotOptimize(r.snapshots.data());
  }
  state.counters["particles/s"] = benchmark::Counter(static_cast<double>(particles), benchmark::Counter::kIsRate);
}
BENCHMARK(BM_SimulateDriftless)->Args({6, 1})->Args({9, 1})->Args({9, 4})->Unit(benchmark::kMillisecond);

void BM_SimulateDrifted(benchmark::State& state) {
  kbbm::SimConfig c;
  c.params = {1.0, 1.0, 2.0};
  c.start_x = 1.0;
  for (int i = 1; i <= state.range(0); ++i) c.schedule.push_back(i);
  std::size_t particles = 0;
  for (auto _ : state) {
    ++c.seed;
    const kbbm::SimResult r = kbbm::simulate(c);
    particles += r.snapshots.back().size();
  }
  state.counters["particles/s"] = benchmark::Counter(static_cast<double>(particles), benchmark::Counter::kIsRate);
}
BENCHMARK(BM_SimulateDrifted)->Arg(15)->Arg(20)->Unit(benchmark::kMillisecond);

}  // namespace
