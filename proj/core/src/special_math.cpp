#include "kbbm/special_math.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "kbbm/quadrature.hpp"

namespace kbbm {

Interval::Interval(double lower, double upper) : lower_(lower), upper_(upper) {
  if (!(lower >= 0.0) || std::isinf(lower)) {
    throw std::invalid_argument("Interval: lower endpoint must be finite and >= 0");
  }
  if (!(upper > lower)) throw std::invalid_argument("Interval: upper endpoint must exceed lower");
}

Interval Interval::parse(const std::string& text) {
  const auto comma = text.find(',');
  if (comma == std::string::npos) throw std::invalid_argument("interval '" + text + "': expected a,b");
  auto read = [&](const std::string& s) {
    if (s == "inf" || s == "+inf" || s == "infinity") return kInf;
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(s, &used);
    } catch (const std::exception&) {
      throw std::invalid_argument("interval '" + text + "': bad endpoint '" + s + "'");
    }
    if (used != s.size()) throw std::invalid_argument("interval '" + text + "': bad endpoint '" + s + "'");
    return v;
  };
  return {read(text.substr(0, comma)), read(text.substr(comma + 1))};
}

std::string Interval::to_string() const {
  std::ostringstream os;
  os.precision(17);
  os << lower_ << ',';
  if (bounded()) {
    os << upper_;
  } else {
    os << "inf";
  }
  return os.str();
}

void DriftParams::require_supercritical() const {
  if (!(beta > 0.0)) throw std::invalid_argument("DriftParams: beta must be > 0");
  if (!(mu > 1.0)) throw std::invalid_argument("DriftParams: mu must be > 1");
  if (!(theta >= 0.0) || !(theta * theta < 2.0 * growth_rate())) {
    throw std::invalid_argument("DriftParams: theta must lie in [0, sqrt(2 beta (mu - 1)))");
  }
}

double hermite(int k, double x) {
  if (k < 0) throw std::invalid_argument("hermite: k must be >= 0");
  if (k == 0) return 1.0;
  double prev = 1.0;
  double cur = x;
  for (int j = 1; j < k; ++j) {
    const double next = x * cur - j * prev;
    prev = cur;
    cur = next;
  }
  return cur;
}

std::vector<double> hermite_table(int kmax, double x) {
  if (kmax < 0) throw std::invalid_argument("hermite_table: kmax must be >= 0");
  std::vector<double> h(static_cast<std::size_t>(kmax) + 1);
  h[0] = 1.0;
  if (kmax >= 1) h[1] = x;
  for (int j = 1; j < kmax; ++j) h[j + 1] = x * h[j] - j * h[j - 1];
  return h;
}

double hermite_at_zero(int k) {
  if (k < 0) throw std::invalid_argument("hermite_at_zero: k must be >= 0");
  if (k % 2 == 1) return 0.0;
  // H_{k}(0) = -(k-1) H_{k-2}(0); same recurrence as hermite() at x = 0.
  double v = 1.0;
  for (int j = 2; j <= k; j += 2) v *= -(j - 1);
  return v;
}

double gauss_pdf(double x) { return std::exp(-0.5 * x * x) * (0.5 * std::numbers::inv_sqrtpi * std::numbers::sqrt2); }

double gauss_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

double log_factorial(int n) {
  if (n < 0) throw std::invalid_argument("log_factorial: n must be >= 0");
  return std::lgamma(static_cast<double>(n) + 1.0);
}

double factorial(int n) {
  if (n < 0) throw std::invalid_argument("factorial: n must be >= 0");
  if (n <= 20) {
    double v = 1.0;
    for (int j = 2; j <= n; ++j) v *= j;
    return v;
  }
  return std::exp(log_factorial(n));
}

namespace {

void require_positive(double v, const char* what) {
  if (!(v > 0.0)) throw std::invalid_argument(std::string(what) + " must be > 0");
}

}  // namespace

double killed_transition_density(double x, double t, double theta, double y) {
  if (y <= 0.0) return 0.0;
  const double s = std::sqrt(t);
  // e^{theta x - theta^2 t/2} e^{-theta y} phi((y-x)/s) = phi((y - x + theta t)/s)
  return gauss_pdf((y - x + theta * t) / s) / s * -std::expm1(-2.0 * x * y / t);
}

double killed_transition_prob(double x, double t, double theta, const Interval& a) {
  require_positive(x, "killed_transition_prob: x");
  require_positive(t, "killed_transition_prob: t");
  auto f = [=](double y) { return killed_transition_density(x, t, theta, y); };
  quad::Options opts;
  opts.rel_tol = 1e-10;
  const double s = std::sqrt(t);
  quad::Result r;
  if (a.bounded()) {
    // Split at the Gaussian centre when it falls inside the range.
    const double centre = x - theta * t;
    std::vector<double> pts{a.lower()};
    if (centre > a.lower() && centre < a.upper()) pts.push_back(centre);
    pts.push_back(a.upper());
    r = quad::integrate(f, pts, opts);
  } else {
    r = quad::integrate_to_infinity(f, a.lower(), s, opts);
  }
  return std::clamp(r.value, 0.0, 1.0);
}

double bessel3_density(double t, double x, double y) {
  require_positive(t, "bessel3_density: t");
  require_positive(x, "bessel3_density: x");
  if (y <= 0.0) return 0.0;
  const double s = std::sqrt(t);
  return y / (x * s) * gauss_pdf((y - x) / s) * -std::expm1(-2.0 * x * y / t);
}

double bessel3_cdf(double t, double x, double y) {
  require_positive(t, "bessel3_cdf: t");
  require_positive(x, "bessel3_cdf: x");
  if (y <= 0.0) return 0.0;
  const double s = std::sqrt(t);
  // Integrate u phi((u -/+ x)/s)/s over (0, y] term by term.
  const double minus = x * (gauss_cdf((y - x) / s) - gauss_cdf(-x / s)) -
                       s * (gauss_pdf((y - x) / s) - gauss_pdf(-x / s));
  const double plus = s * (gauss_pdf(x / s) - gauss_pdf((y + x) / s)) -
                      x * (gauss_cdf((y + x) / s) - gauss_cdf(x / s));
  return std::clamp((minus - plus) / x, 0.0, 1.0);
}

double expected_count(double x, double t, const DriftParams& params, const Interval& a) {
  return std::exp(params.growth_rate() * t) * killed_transition_prob(x, t, params.theta, a);
}

namespace {

// int_0^z u^j e^{-theta u} du = z^{j+1} e^{-theta z} sum_n (theta z)^n / ((j+1)...(j+1+n)).
double lower_gamma_scaled(int j, double z, double theta) {
  if (z == 0.0) return 0.0;
  const double x = theta * z;
  double term = 1.0 / (j + 1.0);
  double sum = term;
  for (int n = 1; n < 10000 && term > 1e-17 * sum; ++n) {
    term *= x / (j + 1.0 + n);
    sum += term;
  }
  return std::pow(z, j + 1) * std::exp(-x) * sum;
}

// int_z^inf u^j e^{-theta u} du = e^{-theta z} sum_{i<=j} j!/i! z^i / theta^{j+1-i}.
double upper_gamma_scaled(int j, double z, double theta) {
  if (z == 0.0) return std::exp(log_factorial(j) - (j + 1.0) * std::log(theta));
  double term = std::pow(z, j) / theta;
  double sum = term;
  for (int i = j; i >= 1; --i) {
    term *= i / (theta * z);
    sum += term;
  }
  return std::exp(-theta * z) * sum;
}

}  // namespace

double poly_exp_integral(int j, const Interval& a, double theta) {
  if (j < 0) throw std::invalid_argument("poly_exp_integral: j must be >= 0");
  if (theta < 0.0) throw std::invalid_argument("poly_exp_integral: theta must be >= 0");
  const double lo = a.lower();
  if (theta == 0.0) {
    if (!a.bounded()) throw std::invalid_argument("poly_exp_integral: divergent (theta = 0, unbounded interval)");
    const double hi = a.upper();
    return (std::pow(hi, j + 1) - std::pow(lo, j + 1)) / (j + 1);
  }
  const double s = j + 1.0;
  // Both series have positive terms. Forward integration by parts does not:
  // it cancels badly once theta * upper is small next to j.
  if (a.bounded() && theta * a.upper() < s) {
    return lower_gamma_scaled(j, a.upper(), theta) - lower_gamma_scaled(j, lo, theta);
  }
  const double tail = upper_gamma_scaled(j, lo, theta);
  return a.bounded() ? tail - upper_gamma_scaled(j, a.upper(), theta) : tail;
}

}  // namespace kbbm
