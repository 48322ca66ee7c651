#pragma once

// Thermodynamic state, unit systems, dispersion relations and geometries
// shared by every other module. All types here are immutable values.

#include <cstdint>
#include <string>
#include <variant>

#include "qsl/errors.hpp"

namespace qsl {

/// Deformation parameter q of the quon statistics: -1 Fermi, 0 Boltzmann, 1 Bose.
class DeformationParameter {
public:
  explicit DeformationParameter(double q);
  double value() const noexcept { return q_; }
  operator double() const noexcept { return q_; }

private:
  double q_;
};

/// Thermodynamic point (beta, z, q). beta > 0 and z >= 0 are enforced on
/// construction; the pole condition depends on the spectrum and is checked by
/// validate_state at evaluation time.
class ThermoState {
public:
  ThermoState(double beta, double z, double q);

  double beta() const noexcept { return beta_; }
  double z() const noexcept { return z_; }
  double q() const noexcept { return q_.value(); }
  double chemical_potential() const;  ///< ln(z)/beta; -inf for z = 0

  ThermoState with_beta(double beta) const { return {beta, z_, q_.value()}; }
  ThermoState with_z(double z) const { return {beta_, z, q_.value()}; }
  ThermoState with_q(double q) const { return {beta_, z_, q}; }

private:
  double beta_;
  double z_;
  DeformationParameter q_;
};

enum class UnitMode { Natural, SI };

struct UnitSystem {
  double h;
  double hbar;
  double c;
  double kB;
  UnitMode mode;

  static UnitSystem natural();
  static UnitSystem si();
};

enum class DispersionKind { Massless, Massive, Relativistic };

struct Dispersion {
  DispersionKind kind = DispersionKind::Massless;
  double mass = 0.0;

  static Dispersion massless() { return {DispersionKind::Massless, 0.0}; }
  static Dispersion massive(double m);
  static Dispersion relativistic(double m);

  /// Power of |p| in H: 1 for massless and relativistic, 2 for massive.
  int alpha() const noexcept { return kind == DispersionKind::Massive ? 2 : 1; }
};

std::string to_string(DispersionKind kind);

struct Torus {
  int d;
  double L;
};

struct Sphere3 {
  double R;
};

struct Continuum {
  int d;
  double V;
};

using Geometry = std::variant<Torus, Sphere3, Continuum>;

/// Checks d >= 1 and positive lengths/volumes; throws ValidationError.
void validate_geometry(const Geometry& g);

struct Admissibility {
  bool admissible;
  double pole_parameter;  ///< z*q*exp(-beta*eps_min); must stay below 1 when q > 0
  std::string violated_bound;
};

/// Non-throwing admissibility verdict against the bottom of the spectrum.
Admissibility check_state(const ThermoState& state, double eps_min);

/// Throws PoleViolation when z*q*exp(-beta*eps_min) >= 1.
void validate_state(const ThermoState& state, double eps_min);

/// Natural cutoff Lambda: 1/beta (massless, relativistic) or 1/sqrt(beta) (massive).
double cutoff_from_beta(double beta, const Dispersion& dispersion);

}  // namespace qsl
