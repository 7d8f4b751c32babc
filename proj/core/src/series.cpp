#include "kbbm/series.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "kbbm/errors.hpp"

namespace kbbm {
namespace {

int smallest_integer_above(double bound) { return static_cast<int>(std::floor(bound)) + 1; }

void require_window_r(double r, const char* who) {
  if (!(r > 1.0)) throw std::invalid_argument(std::string(who) + ": r must be > 1");
}

// sum_{k=0}^{J} r^{-(2k+1)/4} / (2k+1)! * H_{2k + z_shift}(z/sqrt r) * H_{2k+1}(y/r^{1/4})
double window_sum(double z, double y, double r, int j_max, int z_shift) {
  if (j_max < 0) throw std::invalid_argument("window expansion: J must be >= 0");
  const double zs = z / std::sqrt(r);
  const double ys = y / std::pow(r, 0.25);
  const int top = 2 * j_max + 1;
  const std::vector<double> hz = hermite_table(top, zs);
  const std::vector<double> hy = hermite_table(top, ys);
  const double log_r = std::log(r);
  double sum = 0.0;
  for (int k = 0; k <= j_max; ++k) {
    const int odd = 2 * k + 1;
    const double scale = std::exp(-log_factorial(odd) - 0.25 * odd * log_r);
    sum += scale * hz[2 * k + z_shift] * hy[odd];
  }
  return 2.0 * gauss_pdf(zs) * sum;
}

}  // namespace

int ExpansionOrder::default_cdf_j() const { return smallest_integer_above(cdf_bound()) + 2; }
int ExpansionOrder::default_pdf_j() const { return smallest_integer_above(pdf_bound()) + 2; }

double cdf_shift_expansion(double b, double x, double rho, int j_max) {
  if (!(rho > 0.0 && rho < 1.0)) throw std::invalid_argument("cdf_shift_expansion: rho must lie in (0, 1)");
  if (j_max < 0) throw std::invalid_argument("cdf_shift_expansion: J must be >= 0");
  const std::vector<double> hb = hermite_table(std::max(j_max, 1), b);
  const std::vector<double> hx = hermite_table(std::max(j_max, 1), x);
  double sum = 0.0;
  const double log_rho = std::log(rho);
  for (int k = 1; k <= j_max; ++k) {
    sum += std::exp(k * log_rho - log_factorial(k)) * hb[k - 1] * hx[k];
  }
  return gauss_cdf(b) - gauss_pdf(b) * sum;
}

double cdf_window_expansion(double z, double y, double r, int j_max) {
  require_window_r(r, "cdf_window_expansion");
  return window_sum(z, y, r, j_max, 0);
}

double cdf_window_target(double z, double y, double r) {
  require_window_r(r, "cdf_window_target");
  const double s = std::sqrt(r - std::sqrt(r));
  return gauss_cdf((z + y) / s) - gauss_cdf((z - y) / s);
}

double pdf_window_expansion(double z, double y, double r, int j_max) {
  require_window_r(r, "pdf_window_expansion");
  return window_sum(z, y, r, j_max, 1);
}

double pdf_window_target(double z, double y, double r) {
  require_window_r(r, "pdf_window_target");
  const double s = std::sqrt(r - std::sqrt(r));
  return std::sqrt(r) / s * (gauss_pdf((z - y) / s) - gauss_pdf((z + y) / s));
}

double window_sup_error(WindowKind kind, double r, double n, double window_k, int j_max, int z_points,
                        int y_points, double z_span) {
  require_window_r(r, "window_sup_error");
  if (!(n > 1.0)) throw std::invalid_argument("window_sup_error: n must be > 1");
  if (z_points < 2 || y_points < 2) throw std::invalid_argument("window_sup_error: grids need >= 2 points");
  const double y_max = std::sqrt(window_k * std::sqrt(r) * std::log(n));
  const double z_max = z_span * std::sqrt(r);
  double worst = 0.0;
  // Both sides are odd in y, so y >= 0 suffices.
  for (int i = 0; i < z_points; ++i) {
    const double z = -z_max + 2.0 * z_max * i / (z_points - 1);
    for (int j = 0; j < y_points; ++j) {
      const double y = y_max * j / (y_points - 1);
      const double err = kind == WindowKind::kCdf
                             ? cdf_window_target(z, y, r) - cdf_window_expansion(z, y, r, j_max)
                             : pdf_window_target(z, y, r) - pdf_window_expansion(z, y, r, j_max);
      worst = std::max(worst, std::abs(err));
    }
  }
  return worst;
}

Regime regime_for(double theta, const Interval& a) {
  if (theta < 0.0) throw std::invalid_argument("regime_for: negative theta is not supported");
  if (theta > 0.0) return Regime::kDrifted;
  return a.bounded() ? Regime::kDriftlessBounded : Regime::kDriftlessUnbounded;
}

std::string_view to_string(Regime r) {
  switch (r) {
    case Regime::kDrifted: return "drifted";
    case Regime::kDriftlessBounded: return "driftless-bounded";
    case Regime::kDriftlessUnbounded: return "driftless-unbounded";
  }
  return "unknown";
}

std::optional<Regime> regime_from_string(std::string_view s) {
  for (Regime r : {Regime::kDrifted, Regime::kDriftlessBounded, Regime::kDriftlessUnbounded}) {
    if (to_string(r) == s) return r;
  }
  return std::nullopt;
}

double normalization_exponent(Regime r) { return r == Regime::kDriftlessUnbounded ? 0.5 : 1.5; }

double normalization_rate(Regime r, const DriftParams& params) {
  return r == Regime::kDrifted ? params.compensated_rate() : params.growth_rate();
}

double normalize_count(double count, double t, const DriftParams& params, Regime r) {
  return count * std::exp(normalization_exponent(r) * std::log(t) - normalization_rate(r, params) * t);
}

ExpansionPrediction predict_expansion(int m, const DriftParams& params, const Interval& a,
                                      std::span<const double> m_limits, double t,
                                      std::optional<Regime> requested) {
  if (m < 0) throw std::invalid_argument("predict_expansion: m must be >= 0");
  if (!(t > 0.0)) throw std::invalid_argument("predict_expansion: t must be > 0");
  if (m_limits.size() < static_cast<std::size_t>(m) + 1) {
    throw std::invalid_argument("predict_expansion: need martingale limits for k = 0..m");
  }
  const Regime regime = regime_for(params.theta, a);
  if (requested && *requested != regime) {
    throw RegimeMismatch("predict_expansion: regime mismatch, requested " + std::string(to_string(*requested)) +
                         " branch but (theta, interval) selects " + std::string(to_string(regime)));
  }

  ExpansionPrediction out;
  out.m = m;
  out.regime = regime;
  out.t = t;
  out.norm_exponent = normalization_exponent(regime);
  out.growth_rate = normalization_rate(regime, params);
  out.terms.assign(static_cast<std::size_t>(m) + 1, 0.0);

  const double lead = std::sqrt(2.0 / std::numbers::pi);
  for (int l = 0; l <= m; ++l) {
    double inner = 0.0;
    double coeff = 0.0;
    if (regime == Regime::kDriftlessUnbounded) {
      coeff = lead * hermite_at_zero(2 * l);
      for (int k = 0; k <= l; ++k) {
        const int p = 2 * l - 2 * k;
        const double a_pow = p == 0 ? 1.0 : std::pow(a.lower(), p);
        inner += m_limits[k] / (factorial(2 * k + 1) * factorial(p)) * a_pow;
      }
    } else {
      coeff = -lead * hermite_at_zero(2 * l + 2);
      for (int k = 0; k <= l; ++k) {
        const int p = 2 * l - 2 * k + 1;
        inner += m_limits[k] / (factorial(2 * k + 1) * factorial(p)) * poly_exp_integral(p, a, params.theta);
      }
    }
    out.terms[l] = coeff * inner / std::pow(t, l);
    out.total += out.terms[l];
  }
  return out;
}

}  // namespace kbbm
