#include <doctest.h>

#include <cmath>

#include <boost/math/special_functions/zeta.hpp>

#include "qsl/asymptotics.hpp"
#include "qsl/specfun.hpp"
#include "qsl/spectral_sum.hpp"

using namespace qsl;

namespace {
const UnitSystem kNat = UnitSystem::natural();

std::vector<ExactPoint> high_sums(const DiscreteSpectrum& s, const ThermoState& st, const std::vector<double>& betas,
                                  double tol = 1e-70, int bits = 256) {
  std::vector<ExactPoint> out;
  for (double b : betas) {
    auto r = spectral_action_high(SumKind::Number, s, st.with_beta(b), kNat, tol, bits);
    out.push_back({b, r.value, precision_floor(r.tail_bound, to_double(r.value), bits)});
  }
  return out;
}

std::vector<double> dyadic(int j0, int j1) {
  std::vector<double> g;
  for (int j = j0; j <= j1; ++j) g.push_back(std::ldexp(1.0, -j));
  return g;
}
}  // namespace

TEST_SUITE("asymptotics") {
  TEST_CASE("expansion container") {
    AsymptoticExpansion e("test", RemainderClass::PowerBounded);
    e.set_exact(-2, Rational(3));
    e.set(1, HighReal(0.5));
    e.set_exact(4, Rational(0));
    CHECK(e.has(-2));
    CHECK_FALSE(e.has(0));
    CHECK(e.coefficient(-1) == 3.0);
    CHECK(e.coefficient(0.5) == 0.5);
    CHECK(e.coefficient(7) == 0.0);
    CHECK_THROWS_AS(e.term(6), DomainError);
    CHECK(e.evaluate(4.0) == doctest::Approx(3.0 / 4 + 0.5 * 2));
    CHECK(e.evaluate_truncated(4.0, 0) == doctest::Approx(0.75));
    CHECK(e.pruned().terms().size() == 2);
    CHECK(to_string(RemainderClass::Conjectural) == "Conjectural");
    PrecisionGuard g(256);
    CHECK(to_double(e.evaluate_high(HighReal(4))) == doctest::Approx(1.75));
  }

  TEST_CASE("massive torus coefficients") {
    auto e1 = massive_torus_expansion({1, 1.0}, 0.5, ThermoState(1, 1, 0), kNat);
    CHECK(e1.coefficient(-0.5) == doctest::Approx(std::sqrt(M_PI)).epsilon(1e-15));
    CHECK(e1.remainder() == RemainderClass::SuperPolynomial);
    const double L = 1.5, m = 0.7;
    auto e2 = massive_torus_expansion({2, L}, m, ThermoState(1, 1, -1), kNat);
    CHECK(e2.coefficient(-1) == doctest::Approx(L * L * 2 * M_PI * 2 * m * std::log(2.0) / 2).epsilon(1e-14));
    CHECK(massive_torus_expansion({3, 1.0}, 1, ThermoState(1, 0, 0.5), kNat).pruned().terms().empty());
  }

  TEST_CASE("massless torus leading coefficients") {
    CHECK(massless_torus_leading({1, 1.0}, ThermoState(1, 1, -1), kNat).coefficient(-1) ==
          doctest::Approx(2 * std::log(2.0)).epsilon(1e-15));
    const double L = 2.0;
    CHECK(massless_torus_leading({3, L}, ThermoState(1, 0.5, 1), kNat).coefficient(-3) ==
          doctest::Approx(4 * M_PI * 2 * polylog(3, 0.5 * 1.0) / 1.0 * L * L * L).epsilon(1e-14));
    for (int d = 1; d <= 4; ++d) {
      CHECK(massless_torus_leading({d, L}, ThermoState(1, 0.3, 0), kNat).coefficient(-d) ==
            doctest::Approx(0.3 * std::pow(L, d) * solid_angle(d) * std::tgamma(d)).epsilon(1e-14));
    }
  }

  TEST_CASE("1D zeta expansion reproduces the Bernoulli expansion at q = 0") {
    for (double z : {0.5, 1.0, 0.375}) {
      auto zeta = massless_1d_zeta_expansion(1.0, ThermoState(1, z, 0), kNat, 9);
      auto bern = massless_1d_q0_exact(z, 1.0, kNat, 5);
      REQUIRE(zeta.term(0).exact);
      CHECK(*zeta.term(0).exact == Rational(0));
      for (int tp = -2; tp <= 18; tp += 2) {
        const Rational a = zeta.has(tp) && zeta.term(tp).exact ? *zeta.term(tp).exact : Rational(0);
        const Rational b = bern.has(tp) ? *bern.term(tp).exact : Rational(0);
        CHECK(a == b);
      }
    }
    auto f = massless_1d_zeta_expansion(1.0, ThermoState(1, 1, -1), kNat, 6);
    CHECK(*f.term(0).exact == Rational(0));
    auto n0 = massless_1d_zeta_expansion(1.0, ThermoState(1, 0.7, -0.4), kNat, 0);
    CHECK(n0.terms().size() == 2);
    CHECK(n0.has(-2));
    CHECK(n0.has(0));
  }

  TEST_CASE("Bernoulli expansion of the q = 0 closed form") {
    auto e = massless_1d_q0_exact(1, 1, kNat, 3);
    CHECK(*e.term(2).exact == Rational(1, 6));
    CHECK(*e.term(6).exact == Rational(-1, 360));
    const double e1 = std::exp(1.0);
    CHECK(massless_1d_q0_closed_form(1, 1, kNat, 1) == doctest::Approx((e1 + 1) / (e1 - 1)).epsilon(1e-15));
    // at beta = 0.1 the 5-term series is far below double resolution
    CHECK(massless_1d_q0_exact(0.5, 1, kNat, 8).evaluate(0.1) ==
          doctest::Approx(massless_1d_q0_closed_form(0.5, 1, kNat, 0.1)).epsilon(1e-15));
  }

  TEST_CASE("massive 1D theta case") {
    auto tc = massive_1d_q0_theta(1, 1, 0.5, kNat);
    CHECK(tc.leading.coefficient(-0.5) == doctest::Approx(std::sqrt(M_PI)).epsilon(1e-15));
    const double b = 0.1;
    const double bound = 2 * std::sqrt(M_PI) / std::sqrt(b) * std::exp(-M_PI * M_PI / b);
    CHECK(std::abs(tc.exact(b) - tc.leading.evaluate(b)) <= bound + 1e-15 * tc.exact(b));
    auto s = DiscreteSpectrum::torus({1, 1.0}, Dispersion::massive(0.5), kNat);
    for (double beta : geometric_grid(0.01, std::pow(100.0, 1.0 / 9), 10)) {
      auto r = spectral_action(SumKind::Number, s, ThermoState(beta, 1, 0), kNat, 1e-15);
      CHECK(r.value == doctest::Approx(tc.exact(beta)).epsilon(1e-12));
    }
  }

  TEST_CASE("sphere massive coefficients") {
    const double R = 1.0, m = 0.5;
    const double s = kNat.hbar * kNat.hbar / (2 * m * R * R);
    auto e = sphere_massive_expansion(ThermoState(1, 1, 0), R, m, kNat);
    CHECK(e.coefficient(-1.5) == doctest::Approx(2 * std::pow(s, -1.5) * std::sqrt(M_PI) / 4).epsilon(1e-14));
    CHECK(e.coefficient(-0.5) == doctest::Approx(-0.5 * std::pow(s, -0.5) * std::sqrt(M_PI) / 2).epsilon(1e-14));
    auto f = sphere_massive_expansion(ThermoState(1, 1, -1), R, m, kNat);
    CHECK(f.coefficient(-1.5) ==
          doctest::Approx(2 * std::pow(s, -1.5) * bose_fermi_quadrature(3, -1, 1, 2).value).epsilon(1e-11));
    for (double q : {-1.0, -0.2, 0.0, 0.4})
      CHECK(sphere_massive_expansion(ThermoState(1, 0.9, q), 0.3, 2.0, kNat).coefficient(-0.5) < 0);
  }

  TEST_CASE("sphere massless expansion") {
    // q = 0: termwise equality with the Bernoulli-Laurent oracle
    for (double z : {1.0, 0.5}) {
      auto e = sphere_massless_expansion(ThermoState(1, z, 0), 1.0, kNat, 7);
      auto o = sphere_massless_q0_laurent(z, 1.0, kNat, 7);
      for (int tp = -6; tp <= 14; tp += 2) {
        CHECK(e.coefficient(tp / 2.0) == doctest::Approx(o.coefficient(tp / 2.0)).epsilon(1e-14));
      }
      CHECK(o.evaluate(0.01) == doctest::Approx(sphere_massless_q0_closed_form(z, 1.0, kNat, 0.01)).epsilon(1e-14));
    }
    // leading coefficient at q = -1: 2 h kappa^-3 (3/2) zeta(3)
    const double kappa = kNat.c * kNat.hbar;
    auto f = sphere_massless_expansion(ThermoState(1, 1, -1), 1.0, kNat, 3);
    CHECK(f.coefficient(-3) == doctest::Approx(2 / std::pow(kappa, 3) * 1.5 * boost::math::zeta(3.0)).epsilon(1e-14));
    CHECK(f.coefficient(-1) < 0);
    // and the expansion tracks the exact sums: residual after p <= 1 is O(beta^3)
    auto pts = high_sums(DiscreteSpectrum::sphere3({1.0}, Dispersion::massless(), kNat), ThermoState(1, 1, -1),
                         dyadic(4, 9));
    auto fit = order_fit(residuals(pts, f, 1));
    CHECK(fit.slope == doctest::Approx(3.0).epsilon(0.01));
    CHECK(sphere_massless_expansion(ThermoState(1, 0.5, 0.5), 1.0, kNat, 3).remainder() == RemainderClass::Conjectural);
  }

  TEST_CASE("conjectured torus expansion") {
    ThermoState st(1, 0.8, -0.5);
    auto a = conjecture_anzaf(1, 1.0, st, kNat, 6);
    auto z = massless_1d_zeta_expansion(1.0, st, kNat, 6);
    CHECK(a.remainder() == RemainderClass::Conjectural);
    for (int tp = -2; tp <= 12; tp += 2) CHECK(a.coefficient(tp / 2.0) == doctest::Approx(z.coefficient(tp / 2.0)));
    auto a2 = conjecture_anzaf(2, 1.0, ThermoState(1, 1, -1), kNat, 4).pruned();
    int negative = 0;
    for (const auto& [tp, t] : a2.terms()) negative += tp < 0;
    CHECK(negative == 2);
    CHECK(a2.coefficient(-1) == doctest::Approx(4 * std::log(2.0)).epsilon(1e-14));
  }

  TEST_CASE("relativistic leading term") {
    auto r1 = relativistic_leading(1, {0.1}, 1e-12);
    CHECK(r1.expansion.coefficient(-1) == doctest::Approx(2.0));
    auto r3 = relativistic_leading(3, dyadic(2, 6), 1e-10);
    CHECK(r3.expansion.coefficient(-3) == doctest::Approx(8 * M_PI));
    for (double s : r3.scaled) CHECK(s < 8 * M_PI);
  }

  TEST_CASE("order fits") {
    std::vector<ResidualPoint> pts;
    for (double b : dyadic(1, 10)) pts.push_back({b, b * b * b, 0.0});
    auto f = order_fit(pts);
    CHECK(std::abs(f.slope - 3.0) <= 1e-10);
    CHECK(f.r_squared == doctest::Approx(1.0));
    CHECK_FALSE(f.flagged);
    CHECK_THROWS_AS(order_fit({{0.1, 1e-80, 1e-70}, {0.05, 1e-3, 0}}), DegenerateFit);

    // massive 1D q = 0: residual at the floor for beta <= 0.05
    auto e = massive_torus_expansion({1, 1.0}, 1.0, ThermoState(1, 1, 0), kNat);
    auto s = DiscreteSpectrum::torus({1, 1.0}, Dispersion::massive(1.0), kNat);
    auto res = residuals(high_sums(s, ThermoState(1, 1, 0), {0.05, 0.025, 0.0125}, 1e-74), e, 10);
    for (const auto& r : res) CHECK(std::abs(r.residual) <= r.floor);

    // 1D Fermi zeta expansion cut after p = 3
    auto z = massless_1d_zeta_expansion(1.0, ThermoState(1, 1, -1), kNat, 3);
    auto s1 = DiscreteSpectrum::torus({1, 1.0}, Dispersion::massless(), kNat);
    auto fb = order_fit(residuals(high_sums(s1, ThermoState(1, 1, -1), dyadic(4, 10)), z, 3));
    CHECK(fb.slope >= 3.85);
  }

  TEST_CASE("super-polynomial check") {
    std::vector<ResidualPoint> pts;
    for (double b : dyadic(3, 8)) pts.push_back({b, std::exp(-1.0 / b), 1e-300});
    CHECK(superpolynomial_check(pts, 4).pass);
    std::vector<ResidualPoint> poly;
    for (double b : dyadic(3, 8)) poly.push_back({b, b * b, 0});
    CHECK_FALSE(superpolynomial_check(poly, 3).pass);
    CHECK(superpolynomial_check(poly, 1).pass);
  }

  TEST_CASE("conjecture probe report") {
    auto p = probe_anzaf(2, 1.0, ThermoState(1, 1, -1), kNat, dyadic(4, 8));
    CHECK(p.conjectured == doctest::Approx(4 * std::log(2.0)));
    CHECK(p.betas.size() == 5);
    CHECK(p.report.find("\"conjectured\"") != std::string::npos);
    CHECK_THROWS_AS(probe_anzaf(1, 1.0, ThermoState(1, 1, -1), kNat, dyadic(4, 8)), DomainError);
  }
}
