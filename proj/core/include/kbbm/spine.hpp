#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "kbbm/estimate.hpp"
#include "kbbm/offspring.hpp"
#include "kbbm/rng.hpp"
#include "kbbm/special_math.hpp"

namespace kbbm {

/// One realisation of the spine under the size-biased measure: a Brownian
/// motion with drift -theta that splits at rate beta * mu into a size-biased
/// number of children.
struct SpinePath {
  std::vector<double> times;
  std::vector<double> positions;
  /// Whether the path stayed > 0 on [0, times[i]].
  std::vector<bool> alive;
  std::vector<double> split_times;
  std::vector<int> offspring;
};

/// Draw k with probability k p_k / mu.
int sample_size_biased(const OffspringLaw& law, Stream& rng);

/// Samples the spine at the requested (increasing, positive) times with
/// exact bridge-minimum absorption between consecutive times.
SpinePath sample_spine(double x, std::span<const double> times, const DriftParams& params,
                       const OffspringLaw& law, Stream& rng);

/// What a v1 functional may look at: the spine endpoint and whether its
/// path stayed strictly positive up to t.
struct SpineSummary {
  double position;
  bool survived;
};

using SpineFunctional = std::function<double(const SpineSummary&)>;

/// Many-to-one estimate of E_x[sum_{u in N(t)} Gamma(u, t)] as the mean of
/// e^{beta (mu - 1) t} Gamma(spine) over independent spines. Replicate i
/// uses the stream keyed by (seed, i), so `threads` does not change the result.
Estimate many_to_one_estimate(const SpineFunctional& functional, double x, double t, const DriftParams& params,
                              std::size_t replicates, std::uint64_t seed, unsigned threads = 1);

struct GoodnessOfFit {
  /// sup_y |F_weighted(y) - F_bessel(y)|.
  double ks_distance = 0.0;
  /// (sum w)^2 / sum w^2.
  double effective_sample_size = 0.0;
  /// ks_distance * sqrt(effective_sample_size).
  double statistic = 0.0;
  double threshold = 0.0;
  std::size_t survivors = 0;
  bool passed = false;
};

/// Default rejection level for GoodnessOfFit::statistic (Kolmogorov 0.999 quantile).
inline constexpr double kDefaultKsThreshold = 1.95;

/// Draws killed Brownian endpoints with drift -theta, reweights survivors by
/// B_t e^{theta (B_t - x) + theta^2 t / 2} / x and compares the weighted
/// empirical law with the 3-d Bessel transition law. Throws
/// DegenerateWeights if every path is absorbed.
GoodnessOfFit bessel3_sample_check(double x, double t, double theta, std::size_t replicates, std::uint64_t seed,
                                   double threshold = kDefaultKsThreshold, unsigned threads = 1);

}  // namespace kbbm
