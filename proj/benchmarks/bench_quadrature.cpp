#include <benchmark/benchmark.h>

#include <cmath>

#include "kbbm/quadrature.hpp"
#include "kbbm/series.hpp"
#include "kbbm/special_math.hpp"

namespace {

void BM_KilledProbability(benchmark::State& state) {
  const kbbm::Interval a = kbbm::Interval::half_line(0.5);
  double t = 0.5;
  for (auto _ : state) {
    benchmark::DoNotOptimize(kbbm::killed_transition_prob(1.0, t, 0.7, a));
    t = t > 50.0 ? 0.5 : t * 1.1;
  }
}
BENCHMARK(BM_KilledProbability);

void BM_IntegrateGaussianTail(benchmark::State& state) {
  for (auto _ : state) {
    const auto r = kbbm::quad::integrate_to_infinity([](double y) { return std::exp(-0.5 * y * y); }, 0.0, 1.0);
    benchmark::DoNotOptimize(r.value);
  }
}
BENCHMARK(BM_IntegrateGaussianTail);

void BM_PolyExpIntegral(benchmark::State& state) {
  const kbbm::Interval a(1.0, 3.0);
  const int j = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(kbbm::poly_exp_integral(j, a, 0.3));
}
BENCHMARK(BM_PolyExpIntegral)->Arg(1)->Arg(5)->Arg(11);

void BM_WindowSupError(benchmark::State& state) {
  for (auto _ : state) {
    benchmark::DoNotOptimize(kbbm::window_sup_error(kbbm::WindowKind::kPdf, 3.0, 81.0, 0.5, 6, 301, 41));
  }
}
BENCHMARK(BM_WindowSupError)->Unit(benchmark::kMillisecond);

}  // namespace
