#include "qsl/continuum.hpp"

#include <cmath>
#include <sstream>

#include "qsl/specfun.hpp"

namespace qsl {

namespace {

void check_case(const ContinuumCase& c) {
  validate_geometry(Continuum{c.d, c.volume});
  if (c.dispersion.kind == DispersionKind::Relativistic)
    throw DomainError("continuum cases cover massless and massive dispersions only");
}

double prefactor(const ContinuumCase& c) {
  const double h = c.units.h;
  double p = c.volume * solid_angle(c.d) / std::pow(h, c.d - 1);
  if (c.dispersion.kind == DispersionKind::Massless) {
    p /= std::pow(c.units.c, c.d);
  } else {
    p *= std::pow(2.0 * c.dispersion.mass, c.d / 2.0);
  }
  return p;
}

}  // namespace

double continuum_coefficient(const ContinuumCase& c, double tol) {
  check_case(c);
  const auto& s = c.state;
  if (s.z() == 0.0) return 0.0;
  return prefactor(c) * bose_fermi_integral(c.d, s.q(), s.z(), c.dispersion.alpha(), tol);
}

double continuum_coefficient_quadrature(const ContinuumCase& c, double tol) {
  check_case(c);
  const auto& s = c.state;
  if (s.z() == 0.0) return 0.0;
  return prefactor(c) * bose_fermi_quadrature(c.d, s.q(), s.z(), c.dispersion.alpha(), tol).value;
}

bool condensation_possible(int d, const Dispersion& dispersion) { return d > dispersion.alpha(); }

CriticalDensity critical_density(int d, const Dispersion& dispersion, double tol) {
  if (d < 1) throw DomainError("critical_density requires d >= 1");
  const int alpha = dispersion.alpha();
  if (!condensation_possible(d, dispersion)) return {false, INFINITY, INFINITY};
  const double closed = bose_fermi_integral(d, 1.0, 1.0, alpha, tol);
  const double quad = bose_fermi_quadrature(d, 1.0, 1.0, alpha, tol).value;
  return {true, closed, quad};
}

double critical_integral_from(double lower, int d, const Dispersion& dispersion) {
  if (!(lower > 0.0)) throw DomainError("lower limit must be > 0");
  return bose_fermi_quadrature_from(lower, d, 1.0, 1.0, dispersion.alpha(), 1e-12).value;
}

double condensate_term(const CondensateSpec& spec, const ContinuumCase& c) {
  if (spec.a < 0.0) throw DomainError("condensate strength must be >= 0");
  if (spec.a == 0.0) return 0.0;
  if (!condensation_possible(c.d, c.dispersion)) {
    std::ostringstream os;
    os << "no condensate in d=" << c.d << " for the " << to_string(c.dispersion.kind) << " dispersion";
    throw DomainError(os.str());
  }
  const double q = c.state.q();
  if (!(q > 0.0)) throw DomainError("a condensate term needs q in (0,1]");
  const double zq = c.state.z() * q;
  if (!(zq < 1.0)) throw PoleViolation("condensate term needs zq < 1");
  return spec.a * c.units.h * c.state.z() / (1.0 - zq);
}

double continuum_spectral_action(const ContinuumCase& c, const CondensateSpec& spec, double beta, double tol) {
  if (!(beta > 0.0)) throw ValidationError("beta must be > 0");
  if (c.state.q() > 0.0 && !(c.state.z() * c.state.q() < 1.0))
    throw PoleViolation("continuum spectral action requires zq < 1");
  const double C = continuum_coefficient(c, tol);
  return C * std::pow(beta, -static_cast<double>(c.d) / c.dispersion.alpha()) + condensate_term(spec, c);
}

}  // namespace qsl
