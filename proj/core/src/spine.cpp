#include "kbbm/spine.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "kbbm/errors.hpp"
#include "kbbm/parallel.hpp"
#include "kbbm/simulator.hpp"

namespace kbbm {
namespace {

// Endpoint of a drift -theta Brownian path over [0, t] from x, and whether
// it avoided (-inf, 0] (decided by the exact bridge-minimum law).
SpineSummary killed_endpoint(double x, double t, double theta, Stream& rng) {
  const double y = x - theta * t + std::sqrt(t) * rng.normal();
  const double u = rng.uniform();
  const bool survived = y > 0.0 && u < bridge_survival_prob(x, y, t);
  return {y, survived};
}

}  // namespace

int sample_size_biased(const OffspringLaw& law, Stream& rng) { return law.sample_size_biased(rng.uniform()); }

SpinePath sample_spine(double x, std::span<const double> times, const DriftParams& params, const OffspringLaw& law,
                       Stream& rng) {
  if (!(x > 0.0)) throw std::invalid_argument("sample_spine: x must be > 0");
  if (law.mean() <= 0.0) throw std::invalid_argument("sample_spine: offspring mean must be > 0");
  SpinePath path;
  double now = 0.0;
  double pos = x;
  bool alive = true;
  for (double t : times) {
    if (!(t > now)) throw std::invalid_argument("sample_spine: times must be increasing and positive");
    const SpineSummary step = killed_endpoint(pos, t - now, params.theta, rng);
    alive = alive && step.survived;
    pos = step.position;
    now = t;
    path.times.push_back(t);
    path.positions.push_back(pos);
    path.alive.push_back(alive);
  }
  // The splitting clock and offspring marks are independent of the motion.
  const double rate = params.beta * law.mean();
  if (rate > 0.0) {
    for (double s = rng.exponential(rate); s <= now; s += rng.exponential(rate)) {
      path.split_times.push_back(s);
      path.offspring.push_back(sample_size_biased(law, rng));
    }
  }
  return path;
}

Estimate many_to_one_estimate(const SpineFunctional& functional, double x, double t, const DriftParams& params,
                              std::size_t replicates, std::uint64_t seed, unsigned threads) {
  if (replicates < 2) throw std::invalid_argument("many_to_one_estimate: need at least 2 replicates");
  if (!(x > 0.0) || !(t > 0.0)) throw std::invalid_argument("many_to_one_estimate: x and t must be > 0");
  const double scale = std::exp(params.growth_rate() * t);
  std::vector<double> samples(replicates);
  parallel_for(replicates, threads, [&](std::size_t i) {
    Stream rng(stream_key(seed, i + 1));
    samples[i] = scale * functional(killed_endpoint(x, t, params.theta, rng));
  });
  return mean_and_error(samples);
}

GoodnessOfFit bessel3_sample_check(double x, double t, double theta, std::size_t replicates, std::uint64_t seed,
                                   double threshold, unsigned threads) {
  if (!(x > 0.0) || !(t > 0.0)) throw std::invalid_argument("bessel3_sample_check: x and t must be > 0");
  if (replicates < 1) throw std::invalid_argument("bessel3_sample_check: need replicates >= 1");
  std::vector<SpineSummary> draws(replicates);
  parallel_for(replicates, threads, [&](std::size_t i) {
    Stream rng(stream_key(seed, i + 1));
    draws[i] = killed_endpoint(x, t, theta, rng);
  });

  std::vector<std::pair<double, double>> weighted;  // (endpoint, weight)
  for (const SpineSummary& d : draws) {
    if (!d.survived) continue;
    const double w = d.position * std::exp(theta * (d.position - x) + 0.5 * theta * theta * t) / x;
    if (w > 0.0) weighted.emplace_back(d.position, w);
  }
  if (weighted.empty()) throw DegenerateWeights("bessel3_sample_check: every path was absorbed");
  std::sort(weighted.begin(), weighted.end());

  double total = 0.0;
  double total_sq = 0.0;
  for (const auto& [y, w] : weighted) {
    total += w;
    total_sq += w * w;
  }
  GoodnessOfFit fit;
  fit.survivors = weighted.size();
  fit.threshold = threshold;
  fit.effective_sample_size = total * total / total_sq;
  double cum = 0.0;
  for (const auto& [y, w] : weighted) {
    const double model = bessel3_cdf(t, x, y);
    const double before = cum / total;
    cum += w;
    const double after = cum / total;
    fit.ks_distance = std::max({fit.ks_distance, std::abs(before - model), std::abs(after - model)});
  }
  fit.statistic = fit.ks_distance * std::sqrt(fit.effective_sample_size);
  fit.passed = fit.statistic < threshold;
  return fit;
}

}  // namespace kbbm
