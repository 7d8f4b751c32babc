#include "kbbm/quadrature.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

namespace kbbm::quad {

Result integrate(const Integrand& f, std::span<const double> breakpoints, const Options& opts) {
  if (breakpoints.size() < 2) throw std::invalid_argument("integrate: need at least two breakpoints");
  if (!std::is_sorted(breakpoints.begin(), breakpoints.end())) {
    throw std::invalid_argument("integrate: breakpoints must be sorted");
  }
  using Rule = boost::math::quadrature::gauss_kronrod<double, 21>;
  // Boost bisects each piece until |Kronrod - Gauss| <= rel_tol * L1, to at
  // most 2^max_depth subintervals.
  const auto depth = static_cast<unsigned>(std::clamp(std::ceil(std::log2(std::max(opts.max_intervals, 1))), 1.0, 30.0));
  Result out;
  int calls = 0;
  auto counted = [&](double x) {
    ++calls;
    return f(x);
  };
  double l1 = 0.0;
  for (std::size_t i = 0; i + 1 < breakpoints.size(); ++i) {
    if (breakpoints[i + 1] == breakpoints[i]) continue;
    double err = 0.0;
    double piece_l1 = 0.0;
    out.value += Rule::integrate(counted, breakpoints[i], breakpoints[i + 1], depth, opts.rel_tol, &err, &piece_l1);
    out.abs_error += err;
    l1 += piece_l1;
  }
  out.evaluations = calls;
  out.converged = out.abs_error <= std::max({opts.abs_tol, opts.rel_tol * std::abs(out.value), opts.rel_tol * l1});
  return out;
}

Result integrate(const Integrand& f, double a, double b, const Options& opts) {
  if (a == b) return {0.0, 0.0, 0, true};
  if (a > b) {
    const std::array<double, 2> pts = {b, a};
    Result r = integrate(f, pts, opts);
    r.value = -r.value;
    return r;
  }
  const std::array<double, 2> pts = {a, b};
  return integrate(f, pts, opts);
}

namespace {

std::vector<double> tail_probes(const Integrand& f, double a, double scale) {
  if (!(scale > 0.0)) throw std::invalid_argument("integrate_to_infinity: scale must be positive");
  std::vector<double> probes{a};
  double peak = std::abs(f(a));
  double previous = peak;
  for (int j = -6; j <= 80; ++j) {
    const double p = a + scale * std::ldexp(1.0, j);
    const double v = std::abs(f(p));
    probes.push_back(p);
    peak = std::max(peak, v);
    if (j >= 0 && peak > 0.0 && v < 1e-16 * peak && v <= previous) break;
    previous = v;
  }
  return probes;
}

}  // namespace

double tail_cutoff(const Integrand& f, double a, double scale) { return tail_probes(f, a, scale).back(); }

Result integrate_to_infinity(const Integrand& f, double a, double scale, const Options& opts) {
  const std::vector<double> probes = tail_probes(f, a, scale);
  return integrate(f, probes, opts);
}

}  // namespace kbbm::quad
