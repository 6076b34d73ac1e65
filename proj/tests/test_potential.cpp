#include "doctest.h"

#include "error.hpp"
#include "potential.hpp"

#include <cmath>
#include <numbers>

using namespace bgk;

namespace {

// Plain bisection on V' = x^3 - x + tilt, independent of the library root finder.
double bisect_tilted(double tilt, double lo, double hi) {
  auto f = [tilt](double x) { return x * x * x - x + tilt; };
  for (int it = 0; it < 200; ++it) {
    double mid = 0.5 * (lo + hi);
    if ((f(lo) < 0) == (f(mid) < 0)) lo = mid; else hi = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace

TEST_CASE("exact polynomial evaluation") {
  CHECK(evaluate(harmonic(), 2.0, 1) == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(evaluate(double_well(), 1.0, 1) == doctest::Approx(0.0));
  CHECK(evaluate(double_well(), 0.0, 2) == doctest::Approx(-1.0).epsilon(1e-15));
  // V''' = 6x for the double well
  CHECK(evaluate(double_well(), 0.7, 3) == doctest::Approx(4.2).epsilon(1e-14));
  CHECK_THROWS_AS(evaluate(harmonic(), 0.0, 4), Error);
  CHECK_THROWS_AS(evaluate(harmonic(), 0.0, -1), Error);
}

TEST_CASE("polynomial validation") {
  CHECK_THROWS_AS(polynomial({0.0, 1.0, 0.0, 1.0}), Error);
  CHECK_THROWS_AS(polynomial({0.0, 0.0, -1.0}), Error);
  CHECK_THROWS_AS(polynomial({1.0}), Error);
  CHECK_NOTHROW(polynomial({0.0, 0.3, -1.0, 0.0, 0.5}));
  CHECK(preset("double_well").coefficients == double_well().coefficients);
  CHECK_THROWS_AS(preset("quartic"), Error);
}

TEST_CASE("critical points of the presets") {
  auto hc = find_critical_points(harmonic());
  CHECK(hc.n0 == 1);
  CHECK(hc.maxima.empty());
  CHECK(std::abs(hc.minima[0].location) < 1e-12);
  CHECK(std::abs(hc.minima[0].value) < 1e-15);

  auto dw = find_critical_points(double_well());
  REQUIRE(dw.n0 == 2);
  REQUIRE(dw.maxima.size() == 1);
  CHECK(dw.minima[0].location == doctest::Approx(-1.0).epsilon(1e-12));
  CHECK(dw.minima[1].location == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(std::abs(dw.maxima[0].location) < 1e-12);
  CHECK(dw.maxima[0].value == doctest::Approx(0.25).epsilon(1e-14));
  CHECK(dw.barriers(0, 1) == doctest::Approx(0.25).epsilon(1e-12));
  CHECK(dw.barriers(1, 0) == doctest::Approx(0.25).epsilon(1e-12));

  auto spec = tilted_double_well(0.2);
  auto tc = find_critical_points(spec);
  REQUIRE(tc.n0 == 2);
  double left = bisect_tilted(0.2, -2.0, -0.5);
  double right = bisect_tilted(0.2, 0.5, 2.0);
  CHECK(tc.minima[0].location == doctest::Approx(left).epsilon(1e-10));
  CHECK(tc.minima[1].location == doctest::Approx(right).epsilon(1e-10));
  CHECK(tc.minima[0].value < tc.minima[1].value);
  CHECK(tc.global_minimum().location == doctest::Approx(left).epsilon(1e-10));
  for (const auto& c : tc.sorted()) CHECK(std::abs(evaluate(spec, c.location, 1)) <= 1e-10);

  // minima and maxima alternate
  auto all = dw.sorted();
  for (std::size_t i = 0; i + 1 < all.size(); ++i)
    CHECK((all[i].second_derivative > 0) != (all[i + 1].second_derivative > 0));
}

TEST_CASE("degenerate critical point is a Morse violation") {
  CHECK_THROWS_AS(find_critical_points(polynomial({0.0, 0.0, 0.0, 0.0, 1.0})), Error);
  try {
    // V' = x^2 (x - 1): double root at 0 without a sign change
    find_critical_points(polynomial({0.0, 0.0, 0.0, -1.0 / 3.0, 0.25}));
    FAIL("expected a Morse violation");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::MorseViolation);
  }
}

TEST_CASE("hypothesis diagnostics") {
  auto hd = check_hypothesis(harmonic(), {-5.0, 5.0}, 2001, {0.1, 0.2});
  CHECK(hd.min_gradient_outside == doctest::Approx(5.0).epsilon(1e-12));
  CHECK(hd.boltzmann_integrals[0] ==
        doctest::Approx(std::sqrt(2.0 * std::numbers::pi * 0.1)).epsilon(1e-6));
  CHECK(hd.pass());

  auto dd = check_hypothesis(double_well(), {-3.0, 3.0}, 2001, {0.1});
  CHECK(dd.max_second_derivative == doctest::Approx(26.0).epsilon(1e-12));
  CHECK(dd.max_third_derivative == doctest::Approx(18.0).epsilon(1e-12));
  CHECK(std::isfinite(dd.boltzmann_integrals[0]));
}

TEST_CASE("rescaled potential") {
  auto hr = rescale_potential(harmonic(), 0.37);
  CHECK(hr.coefficients[2] == doctest::Approx(0.5).epsilon(1e-15));

  const double h = 0.25;
  auto dw = double_well();
  auto vh = rescale_potential(dw, h);
  for (int i = 0; i < 10; ++i) {
    double x = -3.0 + 0.61 * i;
    double expect = evaluate(dw, std::sqrt(h) * x, 0) / h;
    CHECK(std::abs(evaluate(vh, x, 0) - expect) <= 1e-12 * std::max(1.0, std::abs(expect)));
  }
  CHECK_THROWS_AS(rescale_potential(dw, 0.0), Error);

  // third derivative scales by sqrt(h) on the mapped box
  const double hs = 0.01;
  auto v3 = rescale_potential(dw, hs);
  double m_orig = 0.0, m_scaled = 0.0;
  for (int i = 0; i <= 400; ++i) {
    double x = -3.0 + 6.0 * i / 400.0;
    m_orig = std::max(m_orig, std::abs(evaluate(dw, x, 3)));
    m_scaled = std::max(m_scaled, std::abs(evaluate(v3, x / std::sqrt(hs), 3)));
  }
  CHECK(m_scaled == doctest::Approx(std::sqrt(hs) * m_orig).epsilon(1e-12));

  // critical points map to x / sqrt(h) with values scaled by 1 / h
  for (auto spec : {double_well(), tilted_double_well(0.2)}) {
    for (double hh : {0.2, 0.1}) {
      auto c = find_critical_points(spec).sorted();
      auto cs = find_critical_points(rescale_potential(spec, hh)).sorted();
      REQUIRE(c.size() == cs.size());
      for (std::size_t i = 0; i < c.size(); ++i) {
        CHECK(std::abs(cs[i].location - c[i].location / std::sqrt(hh)) <= 1e-8);
        CHECK(std::abs(cs[i].value - c[i].value / hh) <= 1e-8);
        CHECK((cs[i].second_derivative > 0) == (c[i].second_derivative > 0));
      }
    }
  }
}

TEST_CASE("preset minimum counts") {
  CHECK(find_critical_points(harmonic()).n0 == 1);
  CHECK(find_critical_points(double_well()).n0 == 2);
  CHECK(find_critical_points(tilted_double_well()).n0 == 2);
}
