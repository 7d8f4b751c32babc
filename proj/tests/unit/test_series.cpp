#include <stdexcept>
#include <doctest.h>

#include <array>
#include <cmath>
#include <numbers>

#include "kbbm/errors.hpp"
#include "kbbm/series.hpp"
#include "oracles.hpp"

using namespace kbbm;

TEST_CASE("cdf shift expansion at the origin is the plain CDF") {
  for (double b : {-1.0, 0.0, 0.4, 2.0}) {
    CHECK(cdf_shift_expansion(b, 0.0, 0.3, 1) == doctest::Approx(oracle::Phi(b)).epsilon(1e-15));
  }
}

TEST_CASE("cdf shift expansion converges to the shifted CDF") {
  // mpmath: ncdf(-0.5 / sqrt(0.75))
  CHECK(std::abs(cdf_shift_expansion(0.0, 1.0, 0.5, 40) - 0.281851430825386514366) <= 1e-10);
  for (double b : {-1.0, 0.0, 1.0}) {
    for (double x : {-0.5, 1.0}) {
      for (double rho : {0.2, 0.5}) {
        const double target = oracle::Phi((b - rho * x) / std::sqrt(1.0 - rho * rho));
        double prev = kInf;
        for (int j : {2, 6, 12, 24, 40}) {
          const double err = std::abs(cdf_shift_expansion(b, x, rho, j) - target);
          CHECK(err <= prev);
          prev = err;
        }
        CHECK(prev < 1e-10);
      }
    }
  }
  CHECK_THROWS_AS(cdf_shift_expansion(0.0, 1.0, 0.0, 5), std::invalid_argument);
  CHECK_THROWS_AS(cdf_shift_expansion(0.0, 1.0, 1.0, 5), std::invalid_argument);
}

TEST_CASE("window expansions reproduce their targets") {
  CHECK(cdf_window_expansion(0.7, 0.0, 9.0, 5) == 0.0);
  CHECK(pdf_window_expansion(0.7, 0.0, 9.0, 5) == 0.0);
  const double cdf_target = oracle::Phi(2.0 / std::sqrt(90.0)) - 0.5;
  CHECK(std::abs(cdf_window_target(1.0, 1.0, 100.0) - cdf_target) <= 1e-15);
  CHECK(std::abs(cdf_window_expansion(1.0, 1.0, 100.0, 20) - cdf_target) <= 1e-8);
  CHECK(std::abs(cdf_window_expansion(1.0, 1.0, 100.0, 20) - 0.0834855531402393276) <= 1e-8);

  const double s = std::sqrt(64.0 - 8.0);
  const double pdf_target = 8.0 / s * (oracle::phi(-1.0 / s) - oracle::phi(3.0 / s));
  CHECK(std::abs(pdf_window_target(1.0, 2.0, 64.0) - pdf_target) <= 1e-15);
  CHECK(std::abs(pdf_window_expansion(1.0, 2.0, 64.0, 20) - 0.0291395055147377958) <= 1e-8);

  CHECK_THROWS_AS(cdf_window_expansion(0.0, 1.0, 1.0, 3), std::invalid_argument);
  CHECK_THROWS_AS(pdf_window_expansion(0.0, 1.0, 0.5, 3), std::invalid_argument);
}

TEST_CASE("window expansions are odd in y") {
  for (double r : {2.0, 3.0, 16.0}) {
    for (double z : {-3.0, 0.0, 1.5}) {
      for (double y : {0.2, 0.9, 1.7}) {
        CHECK(cdf_window_expansion(z, -y, r, 7) == doctest::Approx(-cdf_window_expansion(z, y, r, 7)));
        CHECK(pdf_window_expansion(z, -y, r, 7) == doctest::Approx(-pdf_window_expansion(z, y, r, 7)));
        CHECK(cdf_window_target(z, -y, r) == doctest::Approx(-cdf_window_target(z, y, r)));
        CHECK(pdf_window_target(z, -y, r) == doctest::Approx(-pdf_window_target(z, y, r)));
      }
    }
  }
}

TEST_CASE("window partial sums settle in J") {
  // Successive terms shrink roughly like r^{-k/2}, so small r needs a larger J.
  auto settled = [](double r, int j) {
    const double n = std::pow(r, 4.0);
    const double y_max = std::sqrt(0.5 * std::sqrt(r) * std::log(n));
    for (double z : {-3.0 * std::sqrt(r), -1.0, 0.0, 0.5 * std::sqrt(r), 2.0 * std::sqrt(r)}) {
      for (double y : {0.25 * y_max, 0.5 * y_max, y_max}) {
        CHECK(std::abs(cdf_window_expansion(z, y, r, j + 5) - cdf_window_expansion(z, y, r, j)) <= 1e-8);
        CHECK(std::abs(pdf_window_expansion(z, y, r, j + 5) - pdf_window_expansion(z, y, r, j)) <= 1e-8);
      }
    }
  };
  for (double r : {2.0, 3.0, 4.0, 5.0}) settled(r, 60);
  for (double r : {16.0, 64.0, 100.0}) settled(r, 20);
}

TEST_CASE("default truncation indices exceed the bounds") {
  const ExpansionOrder o{1, 4.0, 0.5};
  CHECK(o.default_cdf_j() > o.cdf_bound());
  CHECK(o.default_pdf_j() > o.pdf_bound());
  CHECK(o.default_cdf_j() == 5);
  CHECK(o.default_pdf_j() == 6);
  const ExpansionOrder integral_bound{0, 2.0, 0.5};  // pdf bound is exactly 1
  CHECK(integral_bound.default_pdf_j() == 4);
}

TEST_CASE("scaled window sup errors decay along r = n^{1/4}") {
  const ExpansionOrder o{1, 4.0, 0.5};
  double prev_cdf = kInf, prev_pdf = kInf;
  for (double n : {16.0, 81.0, 256.0, 625.0}) {
    const double r = std::pow(n, 0.25);
    const double c = window_sup_error(WindowKind::kCdf, r, n, o.window_k, o.default_cdf_j(), 601, 81) * std::pow(r, 1.5);
    const double p = window_sup_error(WindowKind::kPdf, r, n, o.window_k, o.default_pdf_j(), 601, 81) * std::pow(r, 2.0);
    CHECK(c < prev_cdf);
    CHECK(p < prev_pdf);
    prev_cdf = c;
    prev_pdf = p;
  }
}

TEST_CASE("regime routing") {
  CHECK(regime_for(0.5, Interval::half_line()) == Regime::kDrifted);
  CHECK(regime_for(0.5, Interval(1, 2)) == Regime::kDrifted);
  CHECK(regime_for(0.0, Interval(1, 2)) == Regime::kDriftlessBounded);
  CHECK(regime_for(0.0, Interval::half_line(1)) == Regime::kDriftlessUnbounded);
  CHECK(normalization_exponent(Regime::kDriftlessUnbounded) == 0.5);
  CHECK(normalization_exponent(Regime::kDriftlessBounded) == 1.5);
  CHECK(normalization_exponent(Regime::kDrifted) == 1.5);
  for (Regime r : {Regime::kDrifted, Regime::kDriftlessBounded, Regime::kDriftlessUnbounded}) {
    CHECK(regime_from_string(to_string(r)) == r);
  }
  CHECK_FALSE(regime_from_string("bogus").has_value());

  const std::array<double, 1> m{1.0};
  const DriftParams drifted{1.0, 1.0, 2.0};
  const DriftParams flat{0.0, 1.0, 2.0};
  CHECK_THROWS_AS(predict_expansion(0, flat, Interval::half_line(), m, 5.0, Regime::kDrifted), RegimeMismatch);
  CHECK_THROWS_AS(predict_expansion(0, drifted, Interval::half_line(), m, 5.0, Regime::kDriftlessUnbounded),
                  RegimeMismatch);
  CHECK_THROWS_AS(predict_expansion(0, flat, Interval(0, 1), m, 5.0, Regime::kDriftlessUnbounded), RegimeMismatch);
  CHECK_NOTHROW(predict_expansion(0, flat, Interval(0, 1), m, 5.0, Regime::kDriftlessBounded));
}

TEST_CASE("order-zero predictions") {
  const std::array<double, 1> m{2.5};
  const double c = std::sqrt(2.0 / std::numbers::pi);
  const DriftParams p{0.8, 1.0, 2.0};
  const double a = 0.7;
  const double integral = std::exp(-p.theta * a) * (a / p.theta + 1.0 / (p.theta * p.theta));
  const auto drifted = predict_expansion(0, p, Interval::half_line(a), m, 9.0);
  CHECK(drifted.total == doctest::Approx(c * 2.5 * integral).epsilon(1e-13));
  CHECK(drifted.norm_exponent == 1.5);
  CHECK(drifted.growth_rate == doctest::Approx(1.0 - 0.32));

  const auto flat = predict_expansion(0, DriftParams{}, Interval::half_line(a), m, 9.0);
  CHECK(flat.total == doctest::Approx(c * 2.5).epsilon(1e-14));
  CHECK(flat.norm_exponent == 0.5);

  const std::array<double, 3> zeros{0.0, 0.0, 0.0};
  const auto z = predict_expansion(2, p, Interval(0.5, 3.0), zeros, 4.0);
  CHECK(z.total == 0.0);
  for (double term : z.terms) CHECK(term == 0.0);
}

TEST_CASE("predictions are linear in M and term l scales as t^{-l}") {
  const std::array<double, 3> u{1.0, -0.4, 2.0};
  const std::array<double, 3> v{0.3, 1.1, -0.7};
  std::array<double, 3> w{};
  for (int i = 0; i < 3; ++i) w[i] = 2.0 * u[i] - 3.0 * v[i];

  for (auto [theta, a, b] : {std::tuple{1.0, 1.0, kInf}, std::tuple{0.0, 1.0, 3.0}, std::tuple{0.0, 0.5, kInf}}) {
    const DriftParams p{theta, 1.0, 2.0};
    const Interval A(a, b);
    const auto pu = predict_expansion(2, p, A, u, 7.0);
    const auto pv = predict_expansion(2, p, A, v, 7.0);
    const auto pw = predict_expansion(2, p, A, w, 7.0);
    CHECK(pw.total == doctest::Approx(2.0 * pu.total - 3.0 * pv.total).epsilon(1e-12));

    const auto later = predict_expansion(2, p, A, u, 21.0);
    REQUIRE(pu.terms.size() == 3);
    for (int l = 0; l < 3; ++l) {
      CHECK(pu.terms[l] * std::pow(7.0, l) == doctest::Approx(later.terms[l] * std::pow(21.0, l)).epsilon(1e-12));
    }
  }
}

TEST_CASE("prediction requires one martingale limit per order") {
  const std::array<double, 1> m{1.0};
  CHECK_THROWS_AS(predict_expansion(2, DriftParams{1.0, 1.0, 2.0}, Interval::half_line(), m, 5.0),
                  std::invalid_argument);
}

TEST_CASE("normalize_count") {
  const DriftParams p{1.0, 1.0, 2.0};
  CHECK(normalize_count(3.0, 4.0, p, Regime::kDrifted) ==
        doctest::Approx(3.0 * 8.0 * std::exp(-0.5 * 4.0)));
  CHECK(normalize_count(3.0, 4.0, DriftParams{}, Regime::kDriftlessUnbounded) ==
        doctest::Approx(3.0 * 2.0 * std::exp(-4.0)));
}
