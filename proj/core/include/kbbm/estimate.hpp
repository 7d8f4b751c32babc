#pragma once

#include <cmath>
#include <cstddef>
#include <numeric>
#include <span>

namespace kbbm {

/// Monte Carlo mean with its standard error.
struct Estimate {
  double value = 0.0;
  double std_error = 0.0;
  std::size_t replicates = 0;
};

/// Sample mean and standard error; summation order is the input order, so
/// equal inputs give bit-identical results.
inline Estimate mean_and_error(std::span<const double> samples) {
  Estimate e;
  e.replicates = samples.size();
  if (samples.empty()) return e;
  const double n = static_cast<double>(samples.size());
  e.value = std::accumulate(samples.begin(), samples.end(), 0.0) / n;
  if (samples.size() > 1) {
    double ss = 0.0;
    for (double v : samples) ss += (v - e.value) * (v - e.value);
    e.std_error = std::sqrt(ss / (n - 1.0) / n);
  }
  return e;
}

/// |a - b| / sqrt(se_a^2 + se_b^2); an exact value has std_error 0.
inline double z_score(const Estimate& a, const Estimate& b) {
  const double se = std::sqrt(a.std_error * a.std_error + b.std_error * b.std_error);
  const double gap = std::abs(a.value - b.value);
  if (se == 0.0) return gap == 0.0 ? 0.0 : INFINITY;
  return gap / se;
}

}  // namespace kbbm
