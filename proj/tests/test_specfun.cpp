#include <doctest.h>

#include <cmath>

#include <boost/math/special_functions/gamma.hpp>
#include <boost/math/special_functions/zeta.hpp>

#include "qsl/specfun.hpp"

using namespace qsl;

namespace {
// Akiyama-Tanigawa, independent of the library's recurrence (gives B_1 = +1/2)
Rational akiyama_tanigawa(int n) {
  std::vector<Rational> a(static_cast<std::size_t>(n) + 1);
  for (int m = 0; m <= n; ++m) {
    a[m] = Rational(1, m + 1);
    for (int j = m; j >= 1; --j) a[j - 1] = Rational(j) * (a[j - 1] - a[j]);
  }
  return a[0];
}
}  // namespace

TEST_SUITE("specfun") {
  TEST_CASE("Bernoulli numbers") {
    CHECK(bernoulli(0) == Rational(1));
    CHECK(bernoulli(1) == Rational(-1, 2));
    CHECK(bernoulli(2) == Rational(1, 6));
    CHECK(bernoulli(12) == Rational(-691, 2730));
    CHECK(bernoulli(3) == Rational(0));
    for (int n = 2; n <= 40; ++n) CHECK(bernoulli(n) == akiyama_tanigawa(n));
  }

  TEST_CASE("zeta at negative integers") {
    CHECK(zeta_neg_int(0) == Rational(-1, 2));
    CHECK(zeta_neg_int(1) == Rational(-1, 12));
    CHECK(zeta_neg_int(2) == Rational(0));
    CHECK(zeta_neg_int(3) == Rational(1, 120));
  }

  TEST_CASE("polylog") {
    CHECK(polylog(1, 0.5) == doctest::Approx(std::log(2.0)).epsilon(1e-14));
    CHECK(polylog(2, 1) == doctest::Approx(M_PI * M_PI / 6).epsilon(1e-14));
    CHECK(polylog(3, -1) == doctest::Approx(-0.75 * boost::math::zeta(3.0)).epsilon(1e-13));
    CHECK(polylog(1, 0.8) == doctest::Approx(-std::log(0.2)).epsilon(1e-13));
    CHECK(polylog(1, 0.999) == doctest::Approx(-std::log(0.001)).epsilon(1e-12));
    CHECK(polylog(0.5, -1) == doctest::Approx(-(1 - std::sqrt(2.0)) * boost::math::zeta(0.5)).epsilon(1e-12));
    CHECK_THROWS_AS(polylog(1, 1), DivergentInput);
    CHECK_THROWS_AS(polylog(2, 1.5), DomainError);
    // direct series oracle on a grid
    for (double s : {0.5, 1.5, 2.0, 3.0}) {
      for (double x : {-0.9, -0.3, 0.2, 0.7, 0.95}) {
        double ref = 0, p = 1;
        for (int k = 1; k < 20000; ++k) {
          p *= x;
          ref += p / std::pow(k, s);
        }
        CHECK(polylog(s, x) == doctest::Approx(ref).epsilon(1e-10));
      }
    }
  }

  TEST_CASE("high precision polylog matches double") {
    PrecisionGuard g(256);
    for (double x : {-3.0, -1.0, -0.4, 0.3, 0.9, 1.0}) {
      const double s = 2.5;
      if (x < -1) continue;
      CHECK(to_double(polylog_high(HighReal(s), HighReal(x))) == doctest::Approx(polylog(s, x)).epsilon(1e-14));
    }
    CHECK(to_double(polylog_high(HighReal(1), HighReal(-3))) == doctest::Approx(-std::log(4.0)).epsilon(1e-15));
  }

  TEST_CASE("Bose-Fermi integral closed forms") {
    CHECK(bose_fermi_integral(1, 0, 1, 1) == doctest::Approx(1.0));
    CHECK(bose_fermi_integral(3, 1, 1, 1) == doctest::Approx(2 * boost::math::zeta(3.0)).epsilon(1e-13));
    CHECK(bose_fermi_integral(3, 0, 1, 2) == doctest::Approx(std::sqrt(M_PI) / 4).epsilon(1e-14));
    CHECK(bose_fermi_integral(1, -1, 1, 1) == doctest::Approx(std::log(2.0)).epsilon(1e-14));
    CHECK_THROWS_AS(bose_fermi_integral(1, 1, 1, 1), DivergentInput);
    CHECK_THROWS_AS(bose_fermi_integral(2, 1, 1, 2), DivergentInput);
    CHECK_THROWS_AS(bose_fermi_integral(3, 1, 1.1, 1), PoleViolation);
    for (int d = 1; d <= 4; ++d) {
      for (int alpha : {1, 2}) {
        for (auto [q, z] : {std::pair{-1.0, 1.0}, {-1.0, 5.0}, {-0.5, 0.7}, {0.0, 2.0}, {0.5, 1.5}}) {
          const auto quad = bose_fermi_quadrature(d, q, z, alpha);
          CHECK(bose_fermi_integral(d, q, z, alpha) == doctest::Approx(quad.value).epsilon(1e-11));
        }
      }
    }
  }

  TEST_CASE("solid angle") {
    CHECK(solid_angle(1) == doctest::Approx(2));
    CHECK(solid_angle(2) == doctest::Approx(2 * M_PI));
    CHECK(solid_angle(3) == doctest::Approx(4 * M_PI));
    CHECK(solid_angle(4) == doctest::Approx(2 * M_PI * M_PI));
  }

  TEST_CASE("theta function") {
    CHECK(theta3_sum(50.0) == doctest::Approx(1.0).epsilon(1e-15));
    const double ref = std::pow(M_PI, 0.25) / boost::math::tgamma(0.75);
    CHECK(theta3_direct(M_PI) == doctest::Approx(ref).epsilon(1e-14));
    CHECK(theta3_poisson(M_PI) == doctest::Approx(ref).epsilon(1e-14));
    for (double a : {1e-4, 1e-3, 0.01, 0.1, 1.0, 3.0, 10.0}) {
      CHECK(std::abs(theta3_direct(a) - theta3_poisson(a)) <= 1e-12 * theta3_direct(a));
    }
    CHECK(theta3_power_minus_one(40.0, 3) == doctest::Approx(6 * std::exp(-40.0)).epsilon(1e-12));
    CHECK(theta3_power_minus_one(0.5, 2) == doctest::Approx(std::pow(theta3_direct(0.5), 2) - 1).epsilon(1e-14));
  }

  TEST_CASE("occupation jets") {
    auto j0 = occupation_jet_exact(0, 0.5, 2, 6);
    Rational pw(1);
    for (int n = 0; n <= 6; ++n) {
      CHECK(j0.derivative(n) == Rational(1, 2) * pw);
      pw *= -2;
    }
    auto j = occupation_jet_exact(0.5, 0.5, 1, 3);
    CHECK(j[0] == Rational(2, 3));  // z / (1 - zq)
    auto jf = occupation_jet_exact(-1, 1, 1, 2);
    CHECK(jf[0] == Rational(1, 2));
    CHECK(jf[1] == Rational(-1, 4));
    CHECK(jf[2] == Rational(0));
    auto jh = occupation_jet(0.5, 1.0, 1.0, 12, 256);
    auto je = occupation_jet_exact(0.5, 1.0, 1.0, 12);
    for (int n = 0; n <= 12; ++n) CHECK(to_double(jh[n]) == doctest::Approx(to_double(je[n])).epsilon(1e-15));
    CHECK_THROWS_AS(occupation_jet_exact(1, 1, 1, 3), PoleViolation);
  }

  TEST_CASE("derivative growth") {
    auto g0 = derivative_growth_sequence(0, 1, 1, 10, 256);
    REQUIRE(g0.size() == 10);
    for (const auto& p : g0) CHECK(p.growth == doctest::Approx(1.0).epsilon(1e-14));
    auto g = derivative_growth_sequence(0.5, 1.0, 1.0, 40, 256);
    REQUIRE(g.size() == 40);
    auto jet = occupation_jet_exact(0.5, 1.0, 1.0, 2);
    CHECK(g[0].growth == doctest::Approx(std::sqrt(std::abs(to_double(jet.derivative(2))))).epsilon(1e-14));
    for (const auto& p : g) CHECK(p.significant_digits >= 8);
    // too little precision for the requested digits
    CHECK_THROWS_AS(derivative_growth_sequence(0.5, 1.0, 1.0, 40, 64, 30), PrecisionExhausted);
  }

  TEST_CASE("CVZ alternating sum") {
    // sum (-1)^k / (k+1) = ln 2
    CHECK(cvz_alternating_sum([](int k) { return 1.0 / (k + 1); }, 26) == doctest::Approx(std::log(2.0)).epsilon(1e-15));
  }
}
