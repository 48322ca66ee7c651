#pragma once

// Continuum limit of the number spectral action: S = C beta^{-d/alpha} plus an
// optional condensate addend a h z / (1 - zq).

#include "qsl/core_model.hpp"

namespace qsl {

struct ContinuumCase {
  int d;
  Dispersion dispersion;  ///< Massless or Massive
  ThermoState state;
  double volume;
  UnitSystem units;
};

struct CondensateSpec {
  double a = 0.0;
};

/// C = V Omega_d / (h^{d-1} c^d) I_1   (massless)
/// C = V Omega_d (2m)^{d/2} / h^{d-1} I_2   (massive)
/// with I_alpha = int y^{d-1} / (z^{-1} e^{y^alpha} - q) dy. The endpoint zq = 1
/// is accepted when the integral converges.
double continuum_coefficient(const ContinuumCase& c, double tol = 1e-13);

/// Same coefficient with the integral done by quadrature (cross-check).
double continuum_coefficient_quadrature(const ContinuumCase& c, double tol = 1e-12);

struct CriticalDensity {
  bool finite;
  double value;             ///< Gamma(d/alpha) zeta(d/alpha) / alpha when finite
  double quadrature_value;  ///< independent quadrature of the same integral
};

/// Integral at zq = 1: finite exactly when d > alpha.
CriticalDensity critical_density(int d, const Dispersion& dispersion, double tol = 1e-12);

/// int_lower^inf y^{d-1}/(e^{y^alpha} - 1) dy, used to exhibit the divergence at the origin.
double critical_integral_from(double lower, int d, const Dispersion& dispersion);

/// Whether a condensate is possible at all in this dimension.
bool condensation_possible(int d, const Dispersion& dispersion);

/// a h z / (1 - zq). Throws DomainError for a > 0 when condensation is impossible or q <= 0.
double condensate_term(const CondensateSpec& spec, const ContinuumCase& c);

/// C beta^{-d/alpha} + condensate_term; requires zq < 1.
double continuum_spectral_action(const ContinuumCase& c, const CondensateSpec& spec, double beta, double tol = 1e-13);

}  // namespace qsl
