#pragma once

// Spectrum-level thermodynamics built on the spectral sums.

#include "qsl/spectral_sum.hpp"

namespace qsl {

/// ln Z_q = -(1/q) sum g ln(1 - zq e^{-beta eps}), or z sum g e^{-beta eps} at q = 0.
SumResult log_grand_partition(const DiscreteSpectrum& spectrum, const ThermoState& state, double tol);

/// Omega_q = -(1/beta) ln Z_q.
double landau_potential(const DiscreteSpectrum& spectrum, const ThermoState& state, double tol);

/// PV = -Omega_q = k_B T ln Z_q.
double pressure_volume(const DiscreteSpectrum& spectrum, const ThermoState& state, double tol);

/// S_q at the equilibrium occupations, in units of k_B.
SumResult equilibrium_entropy(const DiscreteSpectrum& spectrum, const ThermoState& state, double tol);

struct DerivativeCheck {
  double lhs;  ///< -(1/beta) d ln Z / d eps_level by central difference
  double rhs;  ///< g nu_q(eps_level)
  double discrepancy;
};

/// Central-difference check that the occupation numbers are energy derivatives of ln Z.
/// Infinite spectra are cut at the radius certifying 1e-14.
DerivativeCheck derivative_theorem_check(const DiscreteSpectrum& spectrum, const ThermoState& state,
                                         std::size_t level_index, double h_step);

}  // namespace qsl
