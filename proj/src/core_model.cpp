#include "qsl/core_model.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

namespace qsl {

DeformationParameter::DeformationParameter(double q) : q_(q) {
  if (!(q >= -1.0 && q <= 1.0)) {
    std::ostringstream os;
    os << "deformation parameter q=" << q << " violates -1 <= q <= 1";
    throw ValidationError(os.str());
  }
}

ThermoState::ThermoState(double beta, double z, double q) : beta_(beta), z_(z), q_(q) {
  if (!(beta > 0.0) || !std::isfinite(beta)) {
    std::ostringstream os;
    os << "beta=" << beta << " violates beta > 0";
    throw ValidationError(os.str());
  }
  if (!(z >= 0.0) || !std::isfinite(z)) {
    std::ostringstream os;
    os << "activity z=" << z << " violates z >= 0";
    throw ValidationError(os.str());
  }
}

double ThermoState::chemical_potential() const {
  if (z_ == 0.0) return -std::numeric_limits<double>::infinity();
  return std::log(z_) / beta_;
}

UnitSystem UnitSystem::natural() {
  return {1.0, 1.0 / (2.0 * std::numbers::pi), 1.0, 1.0, UnitMode::Natural};
}

UnitSystem UnitSystem::si() {
  constexpr double h = 6.626070040e-34;
  return {h, h / (2.0 * std::numbers::pi), 299792458.0, 1.3806488e-23, UnitMode::SI};
}

Dispersion Dispersion::massive(double m) {
  if (!(m > 0.0)) throw ValidationError("massive dispersion requires m > 0");
  return {DispersionKind::Massive, m};
}

Dispersion Dispersion::relativistic(double m) {
  if (!(m > 0.0)) throw ValidationError("relativistic dispersion requires m > 0");
  return {DispersionKind::Relativistic, m};
}

std::string to_string(DispersionKind kind) {
  switch (kind) {
    case DispersionKind::Massless: return "massless";
    case DispersionKind::Massive: return "massive";
    case DispersionKind::Relativistic: return "relativistic";
  }
  return "unknown";
}

void validate_geometry(const Geometry& g) {
  std::visit(
      [](const auto& v) {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, Torus>) {
          if (v.d < 1) throw ValidationError("torus dimension d must be >= 1");
          if (!(v.L > 0.0)) throw ValidationError("torus side L must be > 0");
        } else if constexpr (std::is_same_v<T, Sphere3>) {
          if (!(v.R > 0.0)) throw ValidationError("sphere radius R must be > 0");
        } else {
          if (v.d < 1) throw ValidationError("continuum dimension d must be >= 1");
          if (!(v.V > 0.0)) throw ValidationError("continuum volume V must be > 0");
        }
      },
      g);
}

Admissibility check_state(const ThermoState& state, double eps_min) {
  const double q = state.q();
  if (q <= 0.0 || state.z() == 0.0) return {true, 0.0, {}};
  const double pole = state.z() * q * std::exp(-state.beta() * eps_min);
  if (pole < 1.0) return {true, pole, {}};
  std::ostringstream os;
  os << "z*q*exp(-beta*eps_min)=" << pole << " violates z < exp(beta*eps_min)/q";
  return {false, pole, os.str()};
}

void validate_state(const ThermoState& state, double eps_min) {
  auto verdict = check_state(state, eps_min);
  if (!verdict.admissible) throw PoleViolation(verdict.violated_bound);
}

double cutoff_from_beta(double beta, const Dispersion& dispersion) {
  if (!(beta > 0.0)) throw ValidationError("cutoff requires beta > 0");
  return dispersion.kind == DispersionKind::Massive ? 1.0 / std::sqrt(beta) : 1.0 / beta;
}

}  // namespace qsl
