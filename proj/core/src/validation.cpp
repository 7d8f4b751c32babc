#include "kbbm/validation.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "kbbm/martingales.hpp"
#include "kbbm/parallel.hpp"
#include "kbbm/rng.hpp"

namespace kbbm {
namespace {

double quantile(std::vector<double> v, double q) {
  if (v.empty()) return 0.0;
  std::sort(v.begin(), v.end());
  const double pos = q * static_cast<double>(v.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, v.size() - 1);
  return v[lo] + (pos - static_cast<double>(lo)) * (v[hi] - v[lo]);
}

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

std::vector<double> start_values(int m, double x, double theta) {
  std::vector<double> out;
  for (int k = 0; k <= m; ++k) out.push_back(start_value(x, k, theta));
  return out;
}

void require_grid(std::span<const double> t_grid) {
  if (t_grid.empty()) throw std::invalid_argument("t-grid must not be empty");
  double prev = 0.0;
  for (double t : t_grid) {
    if (!(t > prev)) throw std::invalid_argument("t-grid must be strictly increasing and positive");
    prev = t;
  }
}

}  // namespace

bool ExpansionReport::all_passed() const {
  return std::all_of(verdicts.begin(), verdicts.end(), [](const Verdict& v) { return v.passed; });
}

ExpansionReport expectation_level_check(int m, const DriftParams& params, double x, const Interval& a,
                                        std::span<const double> t_grid, std::optional<Regime> requested) {
  if (m < 0) throw std::invalid_argument("expectation_level_check: m must be >= 0");
  params.require_supercritical();
  require_grid(t_grid);
  const std::vector<double> limits = start_values(m, x, params.theta);

  ExpansionReport report;
  report.mode = "expectation";
  report.m = m;
  report.params = params;
  report.x = x;
  report.interval = a;
  report.regime = regime_for(params.theta, a);
  for (double t : t_grid) {
    const ExpansionPrediction pred = predict_expansion(m, params, a, limits, t, requested);
    ReportRow row;
    row.t = t;
    row.observed = normalize_count(expected_count(x, t, params, a), t, params, pred.regime);
    row.predicted = pred.total;
    row.residual = row.observed - row.predicted;
    row.scaled_residual = row.residual * std::pow(t, m);
    row.terms = pred.terms;
    report.rows.push_back(std::move(row));
  }

  const std::size_t n = report.rows.size();
  const std::size_t first = n - (n + 1) / 2;
  bool nonincreasing = true;
  for (std::size_t i = first + 1; i < n; ++i) {
    if (std::abs(report.rows[i].scaled_residual) > std::abs(report.rows[i - 1].scaled_residual)) nonincreasing = false;
  }
  report.verdicts.push_back({"scaled-residual-nonincreasing", nonincreasing,
                             "|residual| t^m over the upper half of the t-grid"});
  return report;
}

ExpansionReport pathwise_check(int m, const SimConfig& config, const Interval& a, const PathwiseOptions& opts) {
  if (m < 0) throw std::invalid_argument("pathwise_check: m must be >= 0");
  if (!(opts.kappa > 2.0 * m + 2.0)) throw std::invalid_argument("pathwise_check: kappa must exceed 2m + 2");
  if (opts.replicates < 1) throw std::invalid_argument("pathwise_check: need at least one replicate");
  config.validate();
  const Regime regime = regime_for(config.params.theta, a);
  const CheckpointGrid grid = checkpoint_grid_to_horizon(opts.kappa, opts.horizon, opts.max_checkpoints);
  if (grid.times.size() < 4) throw std::invalid_argument("pathwise_check: horizon too short for the checkpoint grid");
  const std::size_t half_index = (grid.times.size() - 1) / 2;
  const double t_half = grid.times[half_index];
  const double t_last = grid.times.back();
  const std::vector<double> keep = {t_half, t_last};

  std::vector<ReplicateOutcome> outcomes(opts.replicates);
  parallel_for(opts.replicates, opts.threads, [&](std::size_t i) {
    SimConfig cfg = config;
    cfg.threads = 1;
    cfg.seed = replicate_seed(config.seed, i);
    ReplicateOutcome& out = outcomes[i];
    out.seed = cfg.seed;
    const SeriesRun run = run_martingale_series(cfg, grid, m, opts.tail_fraction, keep);
    if (run.status != SimStatus::kCompleted) {
      out.cap_exceeded = true;
      return;
    }
    for (const auto& s : run.series) out.m_limits.push_back(s.limit.value);
    const Snapshot& half = run.retained.at(0);
    const Snapshot& last = run.retained.at(1);
    out.count_half = count_in(half, a);
    out.count_last = count_in(last, a);
    out.observed_half = normalize_count(static_cast<double>(out.count_half), t_half, config.params, regime);
    out.observed_last = normalize_count(static_cast<double>(out.count_last), t_last, config.params, regime);
    out.predicted_half = predict_expansion(m, config.params, a, out.m_limits, t_half).total;
    out.predicted_last = predict_expansion(m, config.params, a, out.m_limits, t_last).total;
    out.survived = last.size() > 0 && out.m_limits.front() > 0.0;
  });

  PathwiseSummary sum;
  sum.replicates = opts.replicates;
  sum.kappa = opts.kappa;
  sum.horizon = t_last;
  sum.half_time = t_half;
  sum.checkpoints = grid.times.size();
  sum.tolerance_multiple = opts.tolerance_multiple;
  std::vector<double> ratios;
  std::vector<double> scaled_half;
  std::vector<double> scaled_last;
  std::vector<double> obs_half, obs_last, pred_half, pred_last;
  const double tm_half = std::pow(t_half, m);
  const double tm_last = std::pow(t_last, m);
  for (const ReplicateOutcome& o : outcomes) {
    if (o.cap_exceeded) {
      ++sum.cap_exceeded;
      continue;
    }
    obs_half.push_back(o.observed_half);
    obs_last.push_back(o.observed_last);
    pred_half.push_back(o.predicted_half);
    pred_last.push_back(o.predicted_last);
    scaled_half.push_back(std::abs(o.observed_half - o.predicted_half) * tm_half);
    scaled_last.push_back(std::abs(o.observed_last - o.predicted_last) * tm_last);
    if (o.survived) {
      ++sum.survivors;
      if (o.predicted_last != 0.0) ratios.push_back(o.observed_last / o.predicted_last);
    } else {
      ++sum.extinct;
    }
  }
  const std::size_t completed = opts.replicates - sum.cap_exceeded;
  sum.survival_fraction = completed ? static_cast<double>(sum.survivors) / static_cast<double>(completed) : 0.0;
  sum.median_ratio = quantile(ratios, 0.5);
  sum.ratio_q25 = quantile(ratios, 0.25);
  sum.ratio_q75 = quantile(ratios, 0.75);
  if (!ratios.empty()) {
    // sd ~ IQR / 1.349; se(median) ~ 1.2533 sd / sqrt(n).
    sum.median_ratio_std_error =
        1.2533 * (sum.ratio_q75 - sum.ratio_q25) / 1.349 / std::sqrt(static_cast<double>(ratios.size()));
  }
  sum.median_abs_scaled_half = quantile(scaled_half, 0.5);
  sum.median_abs_scaled_last = quantile(scaled_last, 0.5);
  sum.outcomes = std::move(outcomes);

  ExpansionReport report;
  report.mode = "pathwise";
  report.regime = regime;
  report.m = m;
  report.params = config.params;
  report.x = config.start_x;
  report.interval = a;
  for (const auto& [t, obs, pred] : {std::tuple{t_half, &obs_half, &pred_half}, std::tuple{t_last, &obs_last, &pred_last}}) {
    ReportRow row;
    row.t = t;
    row.observed = quantile(*obs, 0.5);
    row.predicted = quantile(*pred, 0.5);
    row.residual = row.observed - row.predicted;
    row.scaled_residual = (t == t_half ? sum.median_abs_scaled_half : sum.median_abs_scaled_last);
    report.rows.push_back(std::move(row));
  }

  report.verdicts.push_back({"no-cap-exceedance", sum.cap_exceeded == 0,
                             std::to_string(sum.cap_exceeded) + " replicate(s) exceeded the population cap"});
  const bool decays = sum.median_abs_scaled_last <= opts.tolerance_multiple * sum.median_abs_scaled_half;
  report.verdicts.push_back({"scaled-residual-decay", decays,
                             "median |residual| t^m: " + fmt(sum.median_abs_scaled_half) + " at t=" + fmt(t_half) +
                                 ", " + fmt(sum.median_abs_scaled_last) + " at t=" + fmt(t_last)});
  const bool in_band = ratios.empty() || std::abs(sum.median_ratio - 1.0) <= opts.ratio_band;
  report.verdicts.push_back({"median-ratio-band", in_band,
                             ratios.empty() ? std::string("no surviving replicates")
                                            : "median observed/predicted " + fmt(sum.median_ratio) + " (band +-" +
                                                  fmt(opts.ratio_band) + ")"});
  report.pathwise = std::move(sum);
  return report;
}

double extrapolate_to_zero(std::span<const double> h, std::span<const double> v) {
  if (h.size() != v.size() || h.empty()) throw std::invalid_argument("extrapolate_to_zero: bad sample sizes");
  std::vector<double> p(v.begin(), v.end());
  const std::size_t n = p.size();
  for (std::size_t level = 1; level < n; ++level) {
    for (std::size_t i = 0; i + level < n; ++i) {
      // Neville: P_{i..i+level}(0)
      p[i] = (h[i + level] * p[i] - h[i] * p[i + 1]) / (h[i + level] - h[i]);
    }
  }
  return p[0];
}

KestenTable kesten_rate_check(const DriftParams& params, double x, std::span<const double> t_grid, const Interval& a) {
  params.require_supercritical();
  require_grid(t_grid);
  KestenTable table;
  table.regime = regime_for(params.theta, a);
  table.exponent = normalization_exponent(table.regime);
  const double rate = normalization_rate(table.regime, params);
  std::vector<double> inv_t;
  std::vector<double> normalised;
  for (double t : t_grid) {
    KestenRow row;
    row.t = t;
    row.expected = expected_count(x, t, params, a);
    row.compensated_log = std::log(row.expected) - rate * t + table.exponent * std::log(t);
    if (!table.rows.empty()) row.increment = row.compensated_log - table.rows.back().compensated_log;
    table.rows.push_back(row);
    inv_t.push_back(1.0 / t);
    normalised.push_back(std::exp(row.compensated_log));
  }
  table.fitted_constant = extrapolate_to_zero(inv_t, normalised);
  const double lead = std::sqrt(2.0 / std::numbers::pi) * x;
  table.leading_constant = table.regime == Regime::kDriftlessUnbounded
                               ? lead
                               : lead * std::exp(params.theta * x) * poly_exp_integral(1, a, params.theta);
  table.increments_shrinking = table.rows.size() >= 3;
  for (std::size_t i = 2; i < table.rows.size(); ++i) {
    if (!(std::abs(table.rows[i].increment) < std::abs(table.rows[i - 1].increment))) table.increments_shrinking = false;
  }
  return table;
}

}  // namespace kbbm
