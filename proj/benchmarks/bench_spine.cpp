#include <benchmark/benchmark.h>

#include <cmath>
#include <vector>

#include "kbbm/estimate.hpp"
#include "kbbm/simulator.hpp"
#include "kbbm/spine.hpp"

// Same quantity, E_x Z_t(A), estimated two ways. The std_error counter is
// normalised to one replicate, so the two runs compare per-sample variance.
namespace {

const kbbm::Interval kWindow(0.5, 2.0);
constexpr double kX = 1.0;
constexpr double kT = 2.0;
const kbbm::DriftParams kParams{0.5, 1.0, 2.0};

void BM_SpineEstimate(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  std::uint64_t seed = 0;
  kbbm::Estimate e;
  for (auto _ : state) {
    e = kbbm::many_to_one_estimate(
        [](const kbbm::SpineSummary& s) { return s.survived && kWindow.contains(s.position) ? 1.0 : 0.0; }, kX, kT,
        kParams, n, ++seed);
  }
  state.counters["mean"] = e.value;
  state.counters["sd_per_sample"] = e.std_error * std::sqrt(static_cast<double>(n));
}
BENCHMARK(BM_SpineEstimate)->Arg(10000)->Unit(benchmark::kMillisecond);

void BM_DirectEstimate(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  kbbm::SimConfig c;
  c.params = kParams;
  c.start_x = kX;
  c.schedule = {kT};
  kbbm::Estimate e;
  for (auto _ : state) {
    ++c.seed;
    const auto rows = kbbm::replicate_statistics(c, n, 1, [](const kbbm::SimResult& r) {
      return std::vector<double>{static_cast<double>(kbbm::count_in(r.snapshots[0], kWindow))};
    });
    std::vector<double> v;
    for (const auto& row : rows) v.push_back(row[0]);
    e = kbbm::mean_and_error(v);
  }
  state.counters["mean"] = e.value;
  state.counters["sd_per_sample"] = e.std_error * std::sqrt(static_cast<double>(n));
}
BENCHMARK(BM_DirectEstimate)->Arg(10000)->Unit(benchmark::kMillisecond);

}  // namespace
