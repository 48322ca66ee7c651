#include "qsl/qstat.hpp"

#include <sstream>

namespace qsl {

double OccupationProfile::total_energy() const {
  double e = 0.0;
  for (const auto& entry : entries) e += static_cast<double>(entry.line.multiplicity) * entry.nu * entry.line.energy;
  return e;
}

double OccupationProfile::total_number() const {
  double n = 0.0;
  for (const auto& entry : entries) n += static_cast<double>(entry.line.multiplicity) * entry.nu;
  return n;
}

std::string to_string(SumKind kind) {
  switch (kind) {
    case SumKind::Number: return "number";
    case SumKind::LP: return "lp";
    case SumKind::Entropy: return "entropy";
    case SumKind::Energy: return "energy";
  }
  return "unknown";
}

double occupation(double eps, const ThermoState& state) {
  validate_state(state, eps);
  return occupation_reduced(state.beta() * eps, state.z(), state.q());
}

double level_population(const SpectralLine& line, const ThermoState& state) {
  return static_cast<double>(line.multiplicity) * occupation(line.energy, state);
}

double entropy_functional(const OccupationProfile& profile, double q) {
  double s = 0.0;
  for (const auto& entry : profile.entries) {
    const double nu = entry.nu;
    if (nu < 0.0) throw DomainError("entropy functional requires nu >= 0");
    if (1.0 + q * nu <= 0.0) {
      std::ostringstream os;
      os << "entropy functional requires 1 + q nu > 0 (q=" << q << ", nu=" << nu << ")";
      throw DomainError(os.str());
    }
    if (nu == 0.0) continue;
    double level;
    if (q == 0.0) {
      level = nu * (1.0 - std::log(nu));
    } else {
      level = (1.0 + q * nu) * std::log1p(q * nu) / q - nu * std::log(nu);
    }
    s += static_cast<double>(entry.line.multiplicity) * level;
  }
  return s;
}

OccupationProfile equilibrium_profile(const std::vector<SpectralLine>& lines, const ThermoState& state) {
  OccupationProfile p;
  p.entries.reserve(lines.size());
  for (const auto& line : lines) p.entries.push_back({line, occupation(line.energy, state)});
  return p;
}

double integrand(SumKind kind, double eps, const ThermoState& state, const UnitSystem& units) {
  validate_state(state, eps);
  return integrand_reduced<double>(kind, state.beta() * eps, state.z(), state.q(), units.h, state.beta());
}

}  // namespace qsl
