#include <doctest.h>

#include <cmath>

#include "qsl/qstat.hpp"
#include "qsl/qstat_sums.hpp"

using namespace qsl;

namespace {
const UnitSystem kNat = UnitSystem::natural();
const double kE = std::exp(1.0);

DiscreteSpectrum one_line(double eps, std::uint64_t g = 1) { return DiscreteSpectrum::explicit_lines({{eps, g}}); }
}  // namespace

TEST_SUITE("qstat") {
  TEST_CASE("occupation numbers") {
    CHECK(occupation(0.0, ThermoState(1, 0.5, 0)) == doctest::Approx(0.5));
    CHECK(occupation(1.0, ThermoState(1, 1, 1)) == doctest::Approx(1 / (kE - 1)).epsilon(1e-14));
    CHECK(occupation(1.0, ThermoState(1, 1, -1)) == doctest::Approx(1 / (kE + 1)).epsilon(1e-14));
    CHECK_THROWS_AS(occupation(0.0, ThermoState(1, 1, 1)), PoleViolation);
  }

  TEST_CASE("level populations") {
    CHECK(level_population({1.0, 3}, ThermoState(1, 1, 0)) == doctest::Approx(3 / kE).epsilon(1e-14));
    CHECK(level_population({7.3, 11}, ThermoState(1, 0, 0.3)) == 0.0);
    CHECK(level_population({1.0, 2}, ThermoState(1, 1, 1)) == doctest::Approx(2 / (kE - 1)).epsilon(1e-14));
  }

  TEST_CASE("log grand partition, one line") {
    CHECK(log_grand_partition(one_line(0), ThermoState(1, 0.5, 1), 1e-14).value == doctest::Approx(std::log(2.0)));
    CHECK(log_grand_partition(one_line(0), ThermoState(1, 1, -1), 1e-14).value == doctest::Approx(std::log(2.0)));
    // q -> 0 limit of the eps = 1 line
    const double z = 1.0;
    const double lz0 = log_grand_partition(one_line(1), ThermoState(1, z, 0), 1e-14).value;
    CHECK(lz0 == doctest::Approx(z / kE).epsilon(1e-14));
    double prev = 1.0;
    for (double q : {1e-2, 1e-3, 1e-4, 1e-5}) {
      const double diff = std::abs(log_grand_partition(one_line(1), ThermoState(1, z, q), 1e-14).value - lz0);
      CHECK(diff < prev);
      prev = diff;
    }
    CHECK(prev < 1e-5);
  }

  TEST_CASE("Landau potential and PV") {
    CHECK(pressure_volume(one_line(0), ThermoState(1, 2, 0), 1e-14) == doctest::Approx(2.0));
    CHECK(pressure_volume(one_line(0), ThermoState(1, 1, -1), 1e-14) == doctest::Approx(std::log(2.0)));
    CHECK(pressure_volume(one_line(0), ThermoState(2, 0.5, 1), 1e-14) == doctest::Approx(std::log(2.0) / 2));
    CHECK(landau_potential(one_line(0), ThermoState(2, 0.5, 1), 1e-14) == doctest::Approx(-std::log(2.0) / 2));
  }

  TEST_CASE("entropy functional") {
    OccupationProfile p{{{{0.0, 1}, 1.0}}};
    CHECK(entropy_functional(p, 0) == doctest::Approx(1.0));
    CHECK(entropy_functional(p, 1) == doctest::Approx(2 * std::log(2.0)));
    // Fermi: nu = 1 is a filled level, zero entropy
    CHECK(entropy_functional(OccupationProfile{{{{0.0, 1}, 0.5}}}, -1) == doctest::Approx(std::log(2.0)));
    CHECK(entropy_functional(OccupationProfile{{{{0.0, 1}, 0.0}}}, 0.5) == 0.0);
    CHECK_THROWS_AS(entropy_functional(OccupationProfile{{{{0.0, 1}, -0.1}}}, 0), DomainError);
    CHECK_THROWS_AS(entropy_functional(OccupationProfile{{{{0.0, 1}, 1.5}}}, -1), DomainError);

    // q -> 0 on three lines: |S_q - S_0| = O(q), first-order coefficient sum g nu^2 / 2
    OccupationProfile three{{{{0.1, 1}, 0.3}, {{0.5, 2}, 0.7}, {{1.0, 3}, 1.4}}};
    const double s0 = entropy_functional(three, 0);
    double c1 = 0;
    for (const auto& e : three.entries) c1 += e.line.multiplicity * e.nu * e.nu / 2;
    for (double q : {1e-3, 1e-4, 1e-5}) {
      const double ds = entropy_functional(three, q) - s0;
      CHECK(ds / q == doctest::Approx(c1).epsilon(10 * q + 1e-6));
    }
  }

  TEST_CASE("profile totals") {
    OccupationProfile p{{{{1.0, 2}, 0.5}, {{3.0, 1}, 0.25}}};
    CHECK(p.total_number() == doctest::Approx(1.25));
    CHECK(p.total_energy() == doctest::Approx(1.75));
  }

  TEST_CASE("equilibrium entropy") {
    CHECK(equilibrium_entropy(one_line(1), ThermoState(1, 0, 0), 1e-14).value == 0.0);
    CHECK(equilibrium_entropy(one_line(1), ThermoState(1, 1, 0), 1e-14).value == doctest::Approx(2 / kE));
    // S = beta (E - mu N) + ln Z at equilibrium
    auto sp = DiscreteSpectrum::explicit_lines({{0.2, 1}, {0.9, 3}, {1.7, 2}});
    for (double q : {-1.0, -0.3, 0.0, 0.6, 1.0}) {
      ThermoState st(1.3, 0.7, q);
      const double s = equilibrium_entropy(sp, st, 1e-14).value;
      const auto prof = equilibrium_profile(sp.lines(10), st);
      const double lnz = log_grand_partition(sp, st, 1e-14).value;
      const double expect = st.beta() * (prof.total_energy() - st.chemical_potential() * prof.total_number()) + lnz;
      CHECK(s == doctest::Approx(expect).epsilon(1e-12));
    }
  }

  TEST_CASE("integrands") {
    CHECK(integrand(SumKind::Number, 1, ThermoState(1, 1, -1), kNat) == doctest::Approx(1 / (kE + 1)));
    CHECK(integrand(SumKind::Energy, 2, ThermoState(1, 1, 0), kNat) == doctest::Approx(2 / (kE * kE)));
    // LP_q - LP_0 = q z^2 e^{-2x} / 2 + O(q^2)
    const double lp0 = integrand(SumKind::LP, 1, ThermoState(1, 0.3, 0), kNat);
    for (double q : {1e-5, -1e-5, 1e-7}) {
      const double diff = integrand(SumKind::LP, 1, ThermoState(1, 0.3, q), kNat) - lp0;
      CHECK(diff == doctest::Approx(q * 0.09 * std::exp(-2.0) / 2).epsilon(1e-4));
    }
    CHECK(std::abs(integrand(SumKind::LP, 1, ThermoState(1, 0.3, 1e-6), kNat) - lp0) <= 1e-8);
    CHECK(to_string(SumKind::Entropy) == "entropy");
  }

  TEST_CASE("derivative theorem") {
    auto c = derivative_theorem_check(one_line(1), ThermoState(1, 0.5, 0.5), 0, 1e-5);
    CHECK(c.discrepancy <= 1e-8);
    auto c0 = derivative_theorem_check(one_line(1), ThermoState(1, 0.5, 0), 0, 1e-5);
    CHECK(c0.rhs == doctest::Approx(0.5 / kE).epsilon(1e-14));
    CHECK(c0.discrepancy <= 1e-9);
    auto c3 = derivative_theorem_check(one_line(1, 3), ThermoState(1, 0.5, 0.5), 0, 1e-5);
    CHECK(c3.rhs == doctest::Approx(3 * c.rhs).epsilon(1e-14));
    CHECK(c3.discrepancy <= 1e-8);
  }
}
