#pragma once

// Pointwise quon statistics: occupation numbers, the q-entropy functional and
// the spectral-action integrands. Spectrum-level quantities (ln Z, Landau
// potential, equilibrium entropy) live in qstat_sums.hpp.

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "qsl/core_model.hpp"

namespace qsl {

/// One eigenvalue of the one-particle Hamiltonian with its degeneracy g(eps).
struct SpectralLine {
  double energy;
  std::uint64_t multiplicity;
};

/// Candidate per-level populations nu(eps) (not necessarily the equilibrium ones).
struct OccupationProfile {
  struct Entry {
    SpectralLine line;
    double nu;
  };
  std::vector<Entry> entries;

  /// sum g*nu*eps
  double total_energy() const;
  /// sum g*nu
  double total_number() const;
};

enum class SumKind { Number, LP, Entropy, Energy };

std::string to_string(SumKind kind);

/// Occupation 1/(z^-1 e^x - q) of reduced energy x = beta*eps, written as
/// z e^-x / (1 - zq e^-x). Zero for z = 0. Generic over the floating type.
template <class Real>
Real occupation_reduced(const Real& x, const Real& z, const Real& q) {
  using std::exp;
  if (z == 0) return Real(0);
  const Real w = exp(-x);
  return z * w / (1 - z * q * w);
}

/// Per-level integrand at reduced energy x = beta*eps. `h` multiplies the
/// Number and LP integrands; Energy returns nu*eps = nu*x/beta; Entropy is in
/// units of k_B.
template <class Real>
Real integrand_reduced(SumKind kind, const Real& x, const Real& z, const Real& q, const Real& h, const Real& beta) {
  using std::exp;
  using std::log;
  using std::log1p;
  if (z == 0) return Real(0);
  switch (kind) {
    case SumKind::Number:
      return h * occupation_reduced(x, z, q);
    case SumKind::LP:
      if (q == 0) return h * z * exp(-x);
      return -h * log1p(-z * q * exp(-x)) / q;
    case SumKind::Energy:
      return occupation_reduced(x, z, q) * x / beta;
    case SumKind::Entropy: {
      const Real nu = occupation_reduced(x, z, q);
      if (nu == 0) return Real(0);
      // ln(nu) = ln z - x - ln(1 - zq e^-x), exact even when nu underflows
      const Real log_nu = log(z) - x - log1p(-z * q * exp(-x));
      if (q == 0) return nu * (1 - log_nu);
      const Real qnu = q * nu;
      return (1 + qnu) * log1p(qnu) / q - nu * log_nu;
    }
  }
  return Real(0);
}

/// nu_q(eps) = 1/(z^-1 e^{beta eps} - q). Throws PoleViolation when the state is
/// not admissible at eps.
double occupation(double eps, const ThermoState& state);

/// g(eps) * nu_q(eps).
double level_population(const SpectralLine& line, const ThermoState& state);

/// S_q({nu}) in units of k_B; q = 0 uses the Boltzmann form sum g nu (1 - ln nu).
/// nu = 0 contributes 0. Throws DomainError for nu < 0 or 1 + q nu <= 0.
double entropy_functional(const OccupationProfile& profile, double q);

/// Equilibrium profile nu = nu_q(eps) on the given lines.
OccupationProfile equilibrium_profile(const std::vector<SpectralLine>& lines, const ThermoState& state);

/// Spectral-action integrand f_kind at energy eps (physical units).
double integrand(SumKind kind, double eps, const ThermoState& state, const UnitSystem& units);

}  // namespace qsl
