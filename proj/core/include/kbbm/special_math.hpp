#pragma once

#include <limits>
#include <string>
#include <vector>

namespace kbbm {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

/// A subset (lower, upper] of the half-line, upper possibly +inf.
/// Endpoints carry zero mass for every continuous law used here, so the
/// half-open convention only matters when counting particles.
class Interval {
 public:
  Interval(double lower, double upper);

  static Interval half_line(double lower = 0.0) { return {lower, kInf}; }

  double lower() const { return lower_; }
  double upper() const { return upper_; }
  bool bounded() const { return upper_ != kInf; }
  bool contains(double y) const { return y > lower_ && y <= upper_; }

  /// "a,b" or "a,inf".
  static Interval parse(const std::string& text);
  std::string to_string() const;

  friend bool operator==(const Interval&, const Interval&) = default;

 private:
  double lower_;
  double upper_;
};

/// Drift magnitude (the motion has drift -theta), branching rate and mean
/// offspring number.
struct DriftParams {
  double theta = 0.0;
  double beta = 1.0;
  double mu = 2.0;

  /// Mean population growth rate beta * (mu - 1).
  double growth_rate() const { return beta * (mu - 1.0); }
  /// Exponent of the martingale compensator, beta * (mu - 1) - theta^2 / 2.
  double compensated_rate() const { return growth_rate() - 0.5 * theta * theta; }
  /// Throws unless 0 <= theta < sqrt(2 beta (mu - 1)), beta > 0 and mu > 1.
  void require_supercritical() const;

  friend bool operator==(const DriftParams&, const DriftParams&) = default;
};

// Hermite polynomials (probabilists' convention).

/// H_k(x) via H_{k+1} = x H_k - k H_{k-1}, H_0 = 1, H_1 = x.
double hermite(int k, double x);
/// H_0(x) ... H_kmax(x) in one pass.
std::vector<double> hermite_table(int kmax, double x);
/// H_k(0): zero for odd k, (-1)^{k/2} (k-1)!! for even k.
double hermite_at_zero(int k);

double gauss_pdf(double x);
double gauss_cdf(double x);

/// log(n!) through lgamma.
double log_factorial(int n);
/// n! in floating point (exp of log_factorial beyond the exact range).
double factorial(int n);

/// Density in y of a Brownian motion with drift -theta started at x,
/// killed on hitting 0, at time t: phi((y - x + theta t)/sqrt t)/sqrt t * (1 - e^{-2xy/t}).
double killed_transition_density(double x, double t, double theta, double y);

/// P_x(min_{s<=t} B_s > 0, B_t in A) for drift -theta, by adaptive quadrature
/// of killed_transition_density (relative tolerance 1e-10).
double killed_transition_prob(double x, double t, double theta, const Interval& a);

/// Transition density of the 3-dimensional Bessel process; 0 for y <= 0.
double bessel3_density(double t, double x, double y);
/// Closed-form distribution function of bessel3_density(t, x, .) at y.
double bessel3_cdf(double t, double x, double y);

/// E_x Z_t(A) = e^{beta (mu - 1) t} * killed_transition_prob(x, t, theta, A).
double expected_count(double x, double t, const DriftParams& params, const Interval& a);

/// Integral of z^j e^{-theta z} over A, from positive-term incomplete gamma
/// series, or the monomial antiderivative when theta == 0.
double poly_exp_integral(int j, const Interval& a, double theta);

}  // namespace kbbm
