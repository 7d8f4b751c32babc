#pragma once

#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "kbbm/special_math.hpp"

namespace kbbm {

/// Order of an expansion together with the constants that fix its
/// truncation index: checkpoint exponent kappa (r_n = n^{1/kappa}) and the
/// window constant K (|y| <= sqrt(K sqrt(r_n) log n)).
struct ExpansionOrder {
  int m = 0;
  double kappa = 4.0;
  double window_k = 0.5;

  /// Lower bound the CDF-window truncation index must strictly exceed.
  double cdf_bound() const { return 2.0 * m + (window_k * kappa - 1.0) / 2.0; }
  /// Lower bound the density-window truncation index must strictly exceed.
  double pdf_bound() const { return 2.0 * m + (window_k * kappa + 1.0) / 2.0; }
  /// Smallest admissible index, plus two.
  int default_cdf_j() const;
  int default_pdf_j() const;
};

/// Phi(b) - phi(b) sum_{k=1}^{J} rho^k / k! H_{k-1}(b) H_k(x), the truncated
/// Hermite series of Phi((b - rho x) / sqrt(1 - rho^2)).
double cdf_shift_expansion(double b, double x, double rho, int j_max);

/// Truncated series for Phi((z+y)/s) - Phi((z-y)/s), s = sqrt(r - sqrt r).
double cdf_window_expansion(double z, double y, double r, int j_max);
double cdf_window_target(double z, double y, double r);

/// Truncated series for sqrt(r)/s (phi((z-y)/s) - phi((z+y)/s)).
double pdf_window_expansion(double z, double y, double r, int j_max);
double pdf_window_target(double z, double y, double r);

enum class WindowKind { kCdf, kPdf };

/// sup |target - series| over a z-grid spanning +-z_span sqrt(r) and the
/// y-window |y| <= sqrt(K sqrt(r) log n), unscaled.
double window_sup_error(WindowKind kind, double r, double n, double window_k, int j_max,
                        int z_points = 3001, int y_points = 401, double z_span = 15.0);

/// Which form of the expansion applies.
///  kDrifted:            theta > 0, any interval; normalisation t^{3/2} e^{-(beta(mu-1)-theta^2/2)t}
///  kDriftlessBounded:   theta = 0, bounded interval; t^{3/2} e^{-beta(mu-1)t}
///  kDriftlessUnbounded: theta = 0, (a, inf); t^{1/2} e^{-beta(mu-1)t}
enum class Regime { kDrifted, kDriftlessBounded, kDriftlessUnbounded };

Regime regime_for(double theta, const Interval& a);
std::string_view to_string(Regime r);
std::optional<Regime> regime_from_string(std::string_view s);

/// Power b of t in the normalisation (3/2 or 1/2).
double normalization_exponent(Regime r);
/// Exponential rate removed by the normalisation.
double normalization_rate(Regime r, const DriftParams& params);
/// count * t^b * e^{-rate t}.
double normalize_count(double count, double t, const DriftParams& params, Regime r);

struct ExpansionPrediction {
  int m = 0;
  Regime regime = Regime::kDrifted;
  double t = 0.0;
  /// terms[l] is the l-th summand, already divided by t^l.
  std::vector<double> terms;
  double total = 0.0;
  double norm_exponent = 1.5;
  double growth_rate = 0.0;
};

/// Evaluates the order-m expansion of the normalised count Z_t(A) given the
/// martingale limits m_limits[k] = M_inf^{(2k+1, theta)}, k = 0..m. If
/// `requested` is set it must match regime_for(theta, A).
ExpansionPrediction predict_expansion(int m, const DriftParams& params, const Interval& a,
                                      std::span<const double> m_limits, double t,
                                      std::optional<Regime> requested = std::nullopt);

}  // namespace kbbm
