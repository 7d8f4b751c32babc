#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "kbbm/estimate.hpp"
#include "kbbm/simulator.hpp"
#include "kbbm/special_math.hpp"

namespace kbbm {

/// M_t^{(2k+1, theta)} = e^{-(beta(mu-1) - theta^2/2) t} sum_u e^{theta X_u} t^{(2k+1)/2} H_{2k+1}(X_u / sqrt t)
/// over the snapshot's particles.
double martingale_value(const Snapshot& s, int k, const DriftParams& params);

/// e^{theta x} x^{2k+1}: the value at t = 0, hence the mean at every t.
double start_value(double x, int k, double theta);

/// Observation times r_n = n^{1/kappa}. With more than max_points integers
/// up to n_max the grid keeps every stride-th n (stride = ceil(n_max / max_points))
/// and always ends at n_max.
struct CheckpointGrid {
  double kappa = 4.0;
  std::vector<std::int64_t> n;
  std::vector<double> times;
};

CheckpointGrid make_checkpoint_grid(double kappa, std::int64_t n_max, std::size_t max_points = 256);
/// Grid whose last time is the largest r_n not exceeding `horizon`.
CheckpointGrid checkpoint_grid_to_horizon(double kappa, double horizon, std::size_t max_points = 256);

struct LimitEstimate {
  double value = 0.0;
  /// Sample standard deviation of the tail window.
  double dispersion = 0.0;
  std::size_t window = 0;
};

/// Mean of the last ceil(tail_fraction * size) values. Requires a window of
/// at least two points.
LimitEstimate limit_estimate(std::span<const double> values, double tail_fraction = 0.5);

struct MartingaleSeries {
  int k = 0;
  double theta = 0.0;
  double kappa = 4.0;
  std::vector<double> times;
  std::vector<double> values;
  LimitEstimate limit;
};

/// Evaluates M^{(2k+1)} for k = 0..k_max along a run of `config` with its
/// schedule replaced by `grid`, without retaining snapshots. On cap
/// exceedance the series hold the completed prefix and `status` reports it.
struct SeriesRun {
  std::vector<MartingaleSeries> series;
  std::vector<Snapshot> retained;  // snapshots at the requested keep_times
  SimStatus status = SimStatus::kCompleted;
  std::string message;
};

SeriesRun run_martingale_series(const SimConfig& config, const CheckpointGrid& grid, int k_max,
                                double tail_fraction = 0.5, std::span<const double> keep_times = {});

struct ConservationRow {
  int k = 0;
  double t = 0.0;
  Estimate mean;
  double expected = 0.0;
  double z = 0.0;
};

/// Monte Carlo mean of M_t^{(2k+1)} over independent replicates at every
/// time of config.schedule, against start_value(start_x, k, theta).
std::vector<ConservationRow> martingale_conservation(const SimConfig& config, int k_max, std::size_t replicates,
                                                     unsigned threads = 1);

}  // namespace kbbm
