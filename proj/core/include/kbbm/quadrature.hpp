#pragma once

#include <functional>
#include <span>

namespace kbbm::quad {

struct Result {
  double value = 0.0;
  double abs_error = 0.0;
  int evaluations = 0;
  bool converged = false;
};

struct Options {
  double rel_tol = 1e-10;
  double abs_tol = 0.0;
  int max_intervals = 4000;
};

using Integrand = std::function<double(double)>;

/// Adaptive 21-point Gauss-Kronrod integration over [a, b] (Boost.Math).
/// max_intervals bounds the bisection depth at ceil(log2(max_intervals)).
Result integrate(const Integrand& f, double a, double b, const Options& opts = {});

/// Same, with the initial partition given by sorted breakpoints (at least two).
Result integrate(const Integrand& f, std::span<const double> breakpoints, const Options& opts = {});

/// Integral over [a, inf). The range is truncated at the first probe point
/// a + scale * 2^j past which |f| has dropped below 1e-16 of the largest
/// probed value; the probes double as initial breakpoints.
Result integrate_to_infinity(const Integrand& f, double a, double scale, const Options& opts = {});

/// Truncation point used by integrate_to_infinity (exposed for testing).
double tail_cutoff(const Integrand& f, double a, double scale);

}  // namespace kbbm::quad
