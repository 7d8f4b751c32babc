#include <doctest.h>

#include <array>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "kbbm/quadrature.hpp"
#include "oracles.hpp"

using namespace kbbm;

TEST_CASE("quadrature integrates smooth functions to the requested tolerance") {
  const auto r = quad::integrate([](double x) { return std::sin(x); }, 0.0, std::numbers::pi);
  CHECK(r.converged);
  CHECK(r.value == doctest::Approx(2.0).epsilon(1e-13));

  const auto g = quad::integrate([](double x) { return std::exp(-x * x); }, -10.0, 10.0);
  CHECK(g.value == doctest::Approx(std::sqrt(std::numbers::pi)).epsilon(1e-12));
}

TEST_CASE("quadrature handles reversed and empty ranges") {
  auto f = [](double x) { return x * x; };
  CHECK(quad::integrate(f, 1.0, 0.0).value == doctest::Approx(-1.0 / 3.0).epsilon(1e-13));
  CHECK(quad::integrate(f, 2.0, 2.0).value == 0.0);
}

TEST_CASE("quadrature refines around a kink") {
  const std::array<double, 2> pts{-1.0, 2.0};
  const auto r = quad::integrate([](double x) { return std::abs(x); }, pts);
  CHECK(r.value == doctest::Approx(2.5).epsilon(1e-10));
}

TEST_CASE("semi-infinite integration truncates where the tail is negligible") {
  auto f = [](double y) { return std::exp(-y); };
  const auto r = quad::integrate_to_infinity(f, 0.0, 1.0);
  CHECK(r.value == doctest::Approx(1.0).epsilon(1e-12));
  const double cut = quad::tail_cutoff(f, 0.0, 1.0);
  CHECK(f(cut) < 1e-16);

  // Peak far from the start is still found.
  auto bump = [](double y) { return oracle::phi(y - 50.0); };
  CHECK(quad::integrate_to_infinity(bump, 0.0, 1.0).value == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("breakpoints must be sorted") {
  const std::array<double, 3> pts{0.0, 2.0, 1.0};
  CHECK_THROWS_AS(quad::integrate([](double) { return 1.0; }, pts), std::invalid_argument);
}
