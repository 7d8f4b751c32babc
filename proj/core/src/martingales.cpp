#include "kbbm/martingales.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace kbbm {

double martingale_value(const Snapshot& s, int k, const DriftParams& params) {
  if (!(s.time > 0.0)) throw std::invalid_argument("martingale_value: snapshot time must be > 0 (use start_value)");
  if (k < 0) throw std::invalid_argument("martingale_value: k must be >= 0");
  const double t = s.time;
  const double root = std::sqrt(t);
  const int order = 2 * k + 1;
  const double t_pow = std::pow(t, 0.5 * order);
  const double rate = params.compensated_rate();
  double sum = 0.0;
  for (double x : s.positions) {
    sum += std::exp(params.theta * x - rate * t) * t_pow * hermite(order, x / root);
  }
  return sum;
}

double start_value(double x, int k, double theta) {
  if (!(x > 0.0)) throw std::invalid_argument("start_value: x must be > 0");
  if (k < 0) throw std::invalid_argument("start_value: k must be >= 0");
  return std::exp(theta * x) * std::pow(x, 2 * k + 1);
}

CheckpointGrid make_checkpoint_grid(double kappa, std::int64_t n_max, std::size_t max_points) {
  if (!(kappa > 1.0)) throw std::invalid_argument("checkpoint grid: kappa must be > 1");
  if (n_max < 1) throw std::invalid_argument("checkpoint grid: n_max must be >= 1");
  if (max_points < 1) throw std::invalid_argument("checkpoint grid: max_points must be >= 1");
  CheckpointGrid g;
  g.kappa = kappa;
  const auto points = static_cast<std::int64_t>(max_points);
  const std::int64_t stride = (n_max + points - 1) / points;
  for (std::int64_t n = stride; n <= n_max; n += stride) g.n.push_back(n);
  if (g.n.empty() || g.n.back() != n_max) g.n.push_back(n_max);
  for (std::int64_t n : g.n) g.times.push_back(std::pow(static_cast<double>(n), 1.0 / kappa));
  return g;
}

CheckpointGrid checkpoint_grid_to_horizon(double kappa, double horizon, std::size_t max_points) {
  if (!(horizon >= 1.0)) throw std::invalid_argument("checkpoint grid: horizon must be >= 1");
  auto n_max = static_cast<std::int64_t>(std::floor(std::pow(horizon, kappa) * (1.0 + 1e-12)));
  while (n_max > 1 && std::pow(static_cast<double>(n_max), 1.0 / kappa) > horizon) --n_max;
  return make_checkpoint_grid(kappa, n_max, max_points);
}

LimitEstimate limit_estimate(std::span<const double> values, double tail_fraction) {
  if (!(tail_fraction > 0.0 && tail_fraction <= 1.0)) {
    throw std::invalid_argument("limit_estimate: tail_fraction must lie in (0, 1]");
  }
  const auto window = static_cast<std::size_t>(std::ceil(tail_fraction * static_cast<double>(values.size())));
  if (window < 2) throw std::invalid_argument("limit_estimate: tail window holds fewer than two checkpoints");
  const auto tail = values.subspan(values.size() - window);
  LimitEstimate est;
  est.window = window;
  est.value = std::accumulate(tail.begin(), tail.end(), 0.0) / static_cast<double>(window);
  double ss = 0.0;
  for (double v : tail) ss += (v - est.value) * (v - est.value);
  est.dispersion = std::sqrt(ss / static_cast<double>(window - 1));
  return est;
}

SeriesRun run_martingale_series(const SimConfig& config, const CheckpointGrid& grid, int k_max, double tail_fraction,
                                std::span<const double> keep_times) {
  if (k_max < 0) throw std::invalid_argument("run_martingale_series: k_max must be >= 0");
  SimConfig cfg = config;
  cfg.schedule = grid.times;
  SeriesRun out;
  out.series.resize(static_cast<std::size_t>(k_max) + 1);
  for (int k = 0; k <= k_max; ++k) {
    auto& s = out.series[static_cast<std::size_t>(k)];
    s.k = k;
    s.theta = config.params.theta;
    s.kappa = grid.kappa;
    s.times.reserve(grid.times.size());
    s.values.reserve(grid.times.size());
  }
  const SnapshotObserver observer = [&](const Snapshot& snap) {
    for (auto& s : out.series) {
      s.times.push_back(snap.time);
      s.values.push_back(martingale_value(snap, s.k, config.params));
    }
    if (std::find(keep_times.begin(), keep_times.end(), snap.time) != keep_times.end()) {
      out.retained.push_back(snap);
    }
  };
  const SimResult r = simulate(cfg, observer);
  out.status = r.status;
  out.message = r.message;
  for (auto& s : out.series) {
    if (std::ceil(tail_fraction * static_cast<double>(s.values.size())) >= 2.0) {
      s.limit = limit_estimate(s.values, tail_fraction);
    }
  }
  return out;
}

std::vector<ConservationRow> martingale_conservation(const SimConfig& config, int k_max, std::size_t replicates,
                                                     unsigned threads) {
  if (k_max < 0) throw std::invalid_argument("martingale_conservation: k_max must be >= 0");
  if (replicates < 2) throw std::invalid_argument("martingale_conservation: need at least 2 replicates");
  const std::size_t n_times = config.schedule.size();
  const auto per_run = replicate_statistics(config, replicates, threads, [&](const SimResult& r) {
    std::vector<double> v;
    v.reserve(n_times * static_cast<std::size_t>(k_max + 1));
    for (int k = 0; k <= k_max; ++k) {
      for (const Snapshot& s : r.snapshots) v.push_back(martingale_value(s, k, config.params));
    }
    return v;
  });
  std::vector<ConservationRow> rows;
  std::vector<double> column(replicates);
  for (int k = 0; k <= k_max; ++k) {
    for (std::size_t j = 0; j < n_times; ++j) {
      const std::size_t idx = static_cast<std::size_t>(k) * n_times + j;
      for (std::size_t i = 0; i < replicates; ++i) column[i] = per_run[i][idx];
      ConservationRow row;
      row.k = k;
      row.t = config.schedule[j];
      row.mean = mean_and_error(column);
      row.expected = start_value(config.start_x, k, config.params.theta);
      row.z = z_score(row.mean, Estimate{row.expected, 0.0, 0});
      rows.push_back(row);
    }
  }
  return rows;
}

}  // namespace kbbm
